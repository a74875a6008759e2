//! Finite-level and de Rham realizations of morphisms.
//!
//! Reduction mod n identifies T_ℤ/nT_ℤ with the n-torsion realization, so a
//! lattice morphism reduces coefficientwise; the compatibility square and the
//! tower maps n·m → n are re-checked explicitly. The de Rham side is the
//! extension of scalars to K with the same Hodge filtration, and a
//! biextension representative (φ₁, φ₂) carries the connection components
//! γᵢ = −φᵢ whose curvature pairing recovers −(φ₁ − φ₂).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::exact::{span_contains, KScalar, Mat, MatK};
use crate::hodge::Mhs;
use crate::homspace::{BiextData, HomLattice, MultilinearMap};
use crate::{Error, Result};

/// The free module (ℤ/n)^r underlying T_ℤ/nT_ℤ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRealization {
    pub modulus: u64,
    pub rank: usize,
}

impl FiniteRealization {
    /// n^r elements.
    pub fn carrier_size(&self) -> BigInt {
        BigInt::from(self.modulus).pow(self.rank as u32)
    }
}

pub fn reduce_mod_n(h: &Mhs, n: u64) -> Result<FiniteRealization> {
    if n < 2 {
        return Err(Error::BadModulus);
    }
    Ok(FiniteRealization { modulus: n, rank: h.rank() })
}

/// A multilinear map between finite realizations, entries in [0, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMap {
    pub modulus: u64,
    pub source_ranks: Vec<usize>,
    pub target_rank: usize,
    pub coeffs: crate::exact::IntMat,
}

fn rem_euclid(x: &BigInt, n: &BigInt) -> BigInt {
    let r = x % n;
    if r.is_negative() {
        r + n
    } else {
        r
    }
}

/// Reduce a lattice morphism mod n; the map must lie in its Hom-lattice.
pub fn reduce_map_mod_n(lat: &HomLattice, phi: &MultilinearMap, n: u64) -> Result<FiniteMap> {
    if n < 2 {
        return Err(Error::BadModulus);
    }
    if !lat.contains(phi) {
        return Err(Error::NotInLattice);
    }
    let n_big = BigInt::from(n);
    Ok(FiniteMap {
        modulus: n,
        source_ranks: phi.source_ranks().to_vec(),
        target_rank: phi.target_rank(),
        coeffs: phi.coeffs().map(|x| rem_euclid(x, &n_big)),
    })
}

/// reduction ∘ Φ = (Φ mod n) ∘ (reduction ⊗ … ⊗ reduction) on every basis
/// tensor, computed on both sides.
pub fn commute_check(phi: &MultilinearMap, reduced: &FiniteMap) -> bool {
    if phi.source_ranks() != reduced.source_ranks || phi.target_rank() != reduced.target_rank {
        return false;
    }
    let n = BigInt::from(reduced.modulus);
    let prod = phi.coeffs().cols();
    for s in 0..prod {
        for t in 0..phi.target_rank() {
            // left: apply Φ over ℤ, then reduce; right: apply the reduced map
            // to the reduced basis tensor (which is the basis tensor itself)
            let left = rem_euclid(phi.coeffs().at(t, s), &n);
            let right = rem_euclid(reduced.coeffs.at(t, s), &n);
            if left != right {
                return false;
            }
        }
    }
    true
}

/// The projection (ℤ/nm)^r → (ℤ/n)^r carries the reduction of Φ mod n·m to
/// its reduction mod n.
pub fn tower_compatible(lat: &HomLattice, phi: &MultilinearMap, n: u64, m: u64) -> Result<bool> {
    let coarse = reduce_map_mod_n(lat, phi, n.checked_mul(m).ok_or(Error::BadModulus)?)?;
    let fine = reduce_map_mod_n(lat, phi, n)?;
    let n_big = BigInt::from(n);
    Ok(coarse.coeffs.map(|x| rem_euclid(x, &n_big)) == fine.coeffs)
}

/// T_dR: scalars extended to K, Hodge filtration carried along unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeRhamSpace {
    pub rank: usize,
    pub hodge_steps: BTreeMap<i64, MatK>,
}

pub fn de_rham(h: &Mhs) -> DeRhamSpace {
    let hodge_steps = h.hodge_jumps().into_iter().map(|p| (p, h.hodge_at(p))).collect();
    DeRhamSpace { rank: h.rank(), hodge_steps }
}

/// The de Rham realization of a morphism: its coefficient tensor read over K.
/// Compatibility with the Hodge filtration is re-asserted directly.
pub fn de_rham_map(lat: &HomLattice, phi: &MultilinearMap) -> Result<MatK> {
    if !lat.contains(phi) {
        return Err(Error::NotInLattice);
    }
    let map_k = phi.to_k();
    let source = lat.tensor_source();
    let target = lat.target();
    let ctx = target.ctx();
    for p in source.hodge_jumps() {
        let space = source.hodge_at(p);
        let target_space = target.hodge_at(p);
        for i in 0..space.rows() {
            let image = map_k.apply(ctx, space.row(i))?;
            if !image.iter().all(KScalar::is_zero) && !span_contains(ctx, &target_space, &image) {
                return Err(Error::BadBiextension(format!(
                    "de Rham image of an F^{p} vector leaves F^{p}"
                )));
            }
        }
    }
    Ok(map_k)
}

/// Connection components and curvature pairing of a biextension
/// representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvatureReport {
    pub gamma1: MatK,
    pub gamma2: MatK,
    /// Υ with Υ(g₁, g₂′) − Υ(g₁′, g₂) = R((g₁,g₂), (g₁′,g₂′)).
    pub upsilon: MatK,
    pub identity_holds: bool,
}

/// Horizontality of the trivializations forces γᵢ = −φᵢ; the curvature 2-form
/// R of the resulting connection is evaluated on basis pairs and the pairing
/// Υ extracted from it. The identity flag asserts Υ = −(φ₁ − φ₂) = −λ_K
/// entry-exactly.
pub fn curvature(b: &BiextData) -> Result<CurvatureReport> {
    b.validate()?;
    let gamma1 = b.phi1().map(|x| -x);
    let gamma2 = b.phi2().map(|x| -x);
    let (r1, r2) = (b.sources()[0].rank(), b.sources()[1].rank());
    let rt = b.target().rank();

    let eval = |m: &MatK, i: usize, j: usize| -> Vec<KScalar> {
        (0..rt).map(|t| m.at(t, i * r2 + j).clone()).collect()
    };
    // R((t₁′,t₂′),(t₁″,t₂″)) = γ₁(t₁′,t₂″) + γ₂(t₁″,t₂′) − γ₁(t₁″,t₂′) − γ₂(t₁′,t₂″)
    // on basis vectors t₁ = e_a of the first factor, t₂ = e_b of the second.
    let r_form = |a1: Option<usize>, b1: Option<usize>, a2: Option<usize>, b2: Option<usize>| {
        let mut acc = vec![KScalar::zero(); rt];
        let mut add = |m: &MatK, i: Option<usize>, j: Option<usize>, sign: i32| {
            if let (Some(i), Some(j)) = (i, j) {
                for (t, slot) in acc.iter_mut().enumerate() {
                    let v = eval(m, i, j)[t].clone();
                    *slot = if sign > 0 { &*slot + &v } else { &*slot - &v };
                }
            }
        };
        add(&gamma1, a1, b2, 1);
        add(&gamma2, a2, b1, 1);
        add(&gamma1, a2, b1, -1);
        add(&gamma2, a1, b2, -1);
        acc
    };

    // Υ(e_a, e_b) = R((e_a, 0), (0, e_b))
    let mut upsilon = Mat::from_fn(rt, r1 * r2, |_, _| KScalar::zero());
    for a in 0..r1 {
        for bb in 0..r2 {
            let v = r_form(Some(a), None, None, Some(bb));
            for t in 0..rt {
                upsilon.set(t, a * r2 + bb, v[t].clone());
            }
        }
    }
    // invariant: Υ = γ₁ − γ₂ entry-exactly
    let gamma_diff = Mat::from_fn(rt, r1 * r2, |t, s| gamma1.at(t, s) - gamma2.at(t, s));
    if upsilon != gamma_diff {
        return Err(Error::BadBiextension("curvature does not equal gamma1 - gamma2".into()));
    }
    let minus_class = b.lambda().to_k().map(|x| -x);
    let identity_holds = upsilon == minus_class;
    Ok(CurvatureReport { gamma1, gamma2, upsilon, identity_holds })
}

/// The alternating 2-form on basis pairs, for cross-checking the Υ
/// extraction: R((g₁,g₂),(g₁′,g₂′)) = Υ(g₁,g₂′) − Υ(g₁′,g₂).
pub fn curvature_two_form(
    report: &CurvatureReport,
    r2: usize,
    g1: usize,
    g2: usize,
    g1p: usize,
    g2p: usize,
) -> Vec<KScalar> {
    let rt = report.upsilon.rows();
    (0..rt)
        .map(|t| {
            report.upsilon.at(t, g1 * r2 + g2p) - report.upsilon.at(t, g1p * r2 + g2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int_mat, rat, FieldContext};
    use crate::hodge::tate;
    use num_traits::Zero;
    use crate::homspace::{biext_from_map, hom_multilinear};
    use crate::motives::{elliptic, kummer};

    fn ctx() -> FieldContext {
        FieldContext::new(1).unwrap()
    }

    fn j_setup() -> (HomLattice, MultilinearMap) {
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        let lat = hom_multilinear(&[e.clone(), e], &tate(ctx(), 1)).unwrap();
        let j = MultilinearMap::new(vec![2, 2], 1, int_mat(vec![vec![0, 1, -1, 0]])).unwrap();
        (lat, j)
    }

    #[test]
    fn carrier_sizes() {
        assert_eq!(
            reduce_mod_n(&tate(ctx(), 1), 5).unwrap().carrier_size(),
            BigInt::from(5)
        );
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        assert_eq!(reduce_mod_n(&e, 2).unwrap().carrier_size(), BigInt::from(4));
        let empty = crate::hodge::quotient_by_weight(&tate(ctx(), 2), 3).unwrap();
        assert_eq!(reduce_mod_n(&empty, 7).unwrap().carrier_size(), BigInt::from(1));
        assert!(matches!(reduce_mod_n(&e, 1), Err(Error::BadModulus)));
    }

    #[test]
    fn reduction_commutes() {
        let (lat, j) = j_setup();
        let red = reduce_map_mod_n(&lat, &j, 5).unwrap();
        assert!(commute_check(&j, &red));
        assert_eq!(red.coeffs, int_mat(vec![vec![0, 1, 4, 0]]));

        let zero = MultilinearMap::zero(vec![2, 2], 1);
        let red0 = reduce_map_mod_n(&lat, &zero, 5).unwrap();
        assert!(red0.coeffs.row_vecs().iter().flatten().all(Zero::is_zero));

        // multiples of n vanish
        let five_j = j.scaled(5);
        let red5 = reduce_map_mod_n(&lat, &five_j, 5).unwrap();
        assert!(red5.coeffs.row_vecs().iter().flatten().all(Zero::is_zero));
        assert!(commute_check(&five_j, &red5));
    }

    #[test]
    fn reduction_mod_shifts() {
        let (lat, j) = j_setup();
        for m in [2u64, 3, 5] {
            let shifted_flat: Vec<BigInt> = j
                .flat()
                .iter()
                .zip(j.scaled(m as i64).flat())
                .map(|(a, b)| a + b)
                .collect();
            let shifted =
                MultilinearMap::from_flat(vec![2, 2], 1, &shifted_flat).unwrap();
            assert_eq!(
                reduce_map_mod_n(&lat, &shifted, m).unwrap().coeffs,
                reduce_map_mod_n(&lat, &j, m).unwrap().coeffs
            );
        }
    }

    #[test]
    fn tower_maps() {
        let (lat, j) = j_setup();
        for (n, m) in [(2u64, 6u64), (3, 4), (5, 2), (12, 2)] {
            assert!(tower_compatible(&lat, &j, n, m).unwrap());
        }
    }

    #[test]
    fn de_rham_spaces_and_maps() {
        let t1 = tate(ctx(), 1);
        let dr = de_rham(&t1);
        assert_eq!(dr.rank, 1);
        assert_eq!(dr.hodge_steps[&-1].rows(), 1);
        assert!(!dr.hodge_steps.contains_key(&0));

        let k = kummer(ctx(), &rat_k(1, 2));
        let endos = crate::homspace::hom_lattice(&k, &k).unwrap();
        let id = MultilinearMap::new(vec![2], 2, int_mat(vec![vec![1, 0], vec![0, 1]])).unwrap();
        let dr_id = de_rham_map(&endos, &id).unwrap();
        assert_eq!(dr_id, id.to_k());

        // J maps F⁰(E⊗E) into F⁰(ℤ(1)) = 0
        let (lat, j) = j_setup();
        assert!(de_rham_map(&lat, &j).is_ok());
    }

    fn rat_k(n: i64, d: i64) -> KScalar {
        KScalar::from_rat(rat(n, d))
    }

    #[test]
    fn curvature_identity_for_j() {
        let (lat, j) = j_setup();
        let b = biext_from_map(&lat, &j, None).unwrap();
        let report = curvature(&b).unwrap();
        assert!(report.identity_holds);
        let minus_j = j.to_k().map(|x| -x);
        assert_eq!(report.upsilon, minus_j);

        // zero map: everything vanishes
        let zero = MultilinearMap::zero(vec![2, 2], 1);
        let b0 = biext_from_map(&lat, &zero, None).unwrap();
        let r0 = curvature(&b0).unwrap();
        assert!(r0.identity_holds);
        assert!(r0.upsilon.row_vecs().iter().flatten().all(KScalar::is_zero));
    }

    #[test]
    fn curvature_is_split_independent() {
        let (lat, j) = j_setup();
        let canonical = curvature(&biext_from_map(&lat, &j, None).unwrap()).unwrap();
        // shift φ₁ by an arbitrary bilinear form; the class (and Υ) is unchanged
        let shift = Mat::from_fn(1, 4, |_, c| {
            let base = j.to_k();
            &KScalar::omega() + base.at(0, c)
        });
        let alt = curvature(&biext_from_map(&lat, &j, Some(shift)).unwrap()).unwrap();
        assert_eq!(canonical.upsilon, alt.upsilon);
        assert!(alt.identity_holds);
    }

    #[test]
    fn two_form_antisymmetry() {
        let (lat, j) = j_setup();
        let report = curvature(&biext_from_map(&lat, &j, None).unwrap()).unwrap();
        // R((g1,g2),(g1',g2')) = Υ(g1,g2') − Υ(g1',g2) changes sign under swap
        for (a, b, c, d) in [(0, 0, 1, 1), (0, 1, 1, 0), (1, 0, 0, 1)] {
            let forward = curvature_two_form(&report, 2, a, b, c, d);
            let backward = curvature_two_form(&report, 2, c, d, a, b);
            for (x, y) in forward.iter().zip(&backward) {
                assert_eq!(x, &(-y));
            }
        }
    }
}
