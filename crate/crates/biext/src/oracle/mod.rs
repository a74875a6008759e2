//! Independent brute-force verification of solver outputs and deterministic
//! instance generation for the property suites.
//!
//! The oracle enumerates every integer map with coefficients in a small box
//! and keeps those satisfying the filtration constraints, checked directly
//! against the stored subspace bases rather than through the solver. Hard
//! size guards (≤ 9 unknowns, bound ≤ 3) keep the enumeration at desk scale.

pub mod suites;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::exact::{
    clear_denominators, rref, span_contains, FieldScalar, KScalar, Mat, MatQ, Rat,
};
use crate::hodge::Mhs;
use crate::homspace::{HomLattice, MultilinearMap};
use crate::motives::{MotiveSpec, PeriodPresentation};
use crate::{Error, Result};

/// Size knobs for generated instances. Generation is a pure function of the
/// profile, so equal profiles give byte-identical motives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceProfile {
    pub max_lattice_rank: u32,
    pub elliptic_factors: u32,
    pub torus_rank: u32,
    pub height_bound: u32,
    pub seed: u64,
}

/// SplitMix64: tiny, deterministic, platform-independent.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn rat(&mut self, height: u32) -> Rat {
        let h = i64::from(height.max(1));
        crate::exact::rat(self.int_in(-h, h), self.int_in(1, h))
    }

    pub fn nonzero_rat(&mut self, height: u32) -> Rat {
        loop {
            let r = self.rat(height);
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn k_scalar(&mut self, height: u32) -> KScalar {
        KScalar::new(self.rat(height), self.rat(height))
    }
}

/// A random period presentation: lattice rank up to the bound, the stated
/// number of elliptic factors and torus directions, scalars of bounded
/// height. The output always builds and passes 1-motive validation.
pub fn random_motive(profile: &InstanceProfile) -> MotiveSpec {
    let mut rng = Rng::new(profile.seed);
    let r = rng.below(u64::from(profile.max_lattice_rank) + 1) as usize;
    let g = profile.elliptic_factors as usize;
    let t = profile.torus_rank as usize;
    let h = profile.height_bound;
    let moduli: Vec<KScalar> =
        (0..g).map(|_| KScalar::new(rng.rat(h), rng.nonzero_rat(h))).collect();
    let abelian_lifts = Mat::from_fn(g, r, |_, _| rng.k_scalar(h));
    let torus_lifts = Mat::from_fn(t, r, |_, _| rng.k_scalar(h));
    let extension_periods = Mat::from_fn(t, 2 * g, |_, _| rng.k_scalar(h));
    let p = PeriodPresentation::new(r, moduli, t, abelian_lifts, torus_lifts, extension_periods)
        .expect("shapes agree and moduli are non-rational");
    MotiveSpec::Periods(p)
}

const MAX_UNKNOWNS: usize = 9;
const MAX_BOUND: i64 = 3;

/// Integer functionals whose common zero locus is the membership condition
/// f(U) ⊆ V over all filtration steps, derived by row reduction of each
/// target step (independently of the solver's constraint assembly).
fn direct_functionals(a: &Mhs, b: &Mhs) -> Result<Vec<Vec<i128>>> {
    let ambient = a.rank() * b.rank();
    let mut rational_rows: Vec<Vec<Rat>> = Vec::new();
    let mut push_rows = |u_space: &MatQ, remainder_funcs: &[Vec<Rat>]| {
        for ui in 0..u_space.rows() {
            let u = u_space.row(ui);
            for c in remainder_funcs {
                let mut row = vec![Rat::zero(); ambient];
                for (s, us) in u.iter().enumerate() {
                    if us.is_zero() {
                        continue;
                    }
                    for (t, ct) in c.iter().enumerate() {
                        if !ct.is_zero() {
                            row[s * b.rank() + t] = us * ct;
                        }
                    }
                }
                rational_rows.push(row);
            }
        }
    };
    for w in a.weight_jumps() {
        let funcs = remainder_functionals_q(&b.weight_at(w));
        push_rows(&a.weight_at(w), &funcs);
    }
    // K-subspace steps contribute the 1- and ω-components separately
    let ctx = a.ctx();
    for p in a.hodge_jumps() {
        let u_space = a.hodge_at(p);
        let funcs = remainder_functionals_k(ctx, &b.hodge_at(p));
        for ui in 0..u_space.rows() {
            let u = u_space.row(ui);
            for c in &funcs {
                let mut row_re = vec![Rat::zero(); ambient];
                let mut row_im = vec![Rat::zero(); ambient];
                for (s, us) in u.iter().enumerate() {
                    for (t, ct) in c.iter().enumerate() {
                        let prod = ctx.mul(us, ct);
                        row_re[s * b.rank() + t] = prod.re;
                        row_im[s * b.rank() + t] = prod.im;
                    }
                }
                rational_rows.push(row_re);
                rational_rows.push(row_im);
            }
        }
    }
    let cleared = if rational_rows.is_empty() {
        return Ok(Vec::new());
    } else {
        clear_denominators(&Mat::from_rows(rational_rows)?)
    };
    let mut out = Vec::new();
    for row in cleared.row_vecs() {
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let mut small = Vec::with_capacity(row.len());
        for x in &row {
            if x.abs() > BigInt::from(1u64 << 40) {
                return Err(Error::SizeGuard("oracle constraint coefficients too large".into()));
            }
            small.push(x.to_i128().expect("bounded above"));
        }
        out.push(small);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Functionals vanishing exactly on a rational row span: reducing a vector
/// against the RREF basis leaves remainder e_c − Σᵢ Rᵢ[c]·e_{pᵢ} in each
/// non-pivot coordinate c.
fn remainder_functionals_q(space: &MatQ) -> Vec<Vec<Rat>> {
    let cols = space.cols();
    let (r, pivots) = rref(&(), space);
    let mut out = Vec::new();
    for c in 0..cols {
        if pivots.contains(&c) {
            continue;
        }
        let mut f = vec![Rat::zero(); cols];
        f[c] = Rat::from(BigInt::from(1));
        for (i, &p) in pivots.iter().enumerate() {
            f[p] = -r.at(i, c).clone();
        }
        out.push(f);
    }
    out
}

fn remainder_functionals_k(
    ctx: &crate::exact::FieldContext,
    space: &Mat<KScalar>,
) -> Vec<Vec<KScalar>> {
    let cols = space.cols();
    let (r, pivots) = rref(ctx, space);
    let mut out = Vec::new();
    for c in 0..cols {
        if pivots.contains(&c) {
            continue;
        }
        let mut f = vec![KScalar::zero(); cols];
        f[c] = KScalar::one();
        for (i, &p) in pivots.iter().enumerate() {
            f[p] = KScalar::f_neg(r.at(i, c));
        }
        out.push(f);
    }
    out
}

/// Depth-first walk over the box [−bound, bound]^n with incremental partial
/// sums; visits exactly the common zeros of the functionals.
fn enumerate_zero_locus(
    n: usize,
    bound: i64,
    functionals: &[Vec<i128>],
    visit: &mut dyn FnMut(&[i64]),
) {
    let m = functionals.len();
    let mut x = vec![0i64; n];
    let mut partials = vec![0i128; (n + 1) * m.max(1)];
    walk(0, n, bound, functionals, &mut x, &mut partials, visit);
}

fn walk(
    depth: usize,
    n: usize,
    bound: i64,
    functionals: &[Vec<i128>],
    x: &mut Vec<i64>,
    partials: &mut Vec<i128>,
    visit: &mut dyn FnMut(&[i64]),
) {
    let m = functionals.len();
    if depth == n {
        if (0..m).all(|f| partials[n * m + f] == 0) {
            visit(x);
        }
        return;
    }
    for val in -bound..=bound {
        x[depth] = val;
        for f in 0..m {
            let prev = partials[depth * m + f];
            partials[(depth + 1) * m + f] = prev + functionals[f][depth] * i128::from(val);
        }
        walk(depth + 1, n, bound, functionals, x, partials, visit);
    }
}

/// True when the integer map (as rb×ra matrix in flat form) satisfies every
/// filtration constraint, checked by exact span membership.
fn satisfies_directly(a: &Mhs, b: &Mhs, flat: &[BigInt]) -> bool {
    let rb = b.rank();
    let apply_q = |u: &[Rat]| -> Vec<Rat> {
        (0..rb)
            .map(|t| {
                let mut acc = Rat::zero();
                for (s, us) in u.iter().enumerate() {
                    if !us.is_zero() {
                        acc += us * Rat::from(flat[s * rb + t].clone());
                    }
                }
                acc
            })
            .collect()
    };
    for w in a.weight_jumps() {
        let space = a.weight_at(w);
        let target = b.weight_at(w);
        for i in 0..space.rows() {
            let image = apply_q(space.row(i));
            if !image.iter().all(Zero::is_zero) && !span_contains(&(), &target, &image) {
                return false;
            }
        }
    }
    let ctx = a.ctx();
    for p in a.hodge_jumps() {
        let space = a.hodge_at(p);
        let target = b.hodge_at(p);
        for i in 0..space.rows() {
            let u = space.row(i);
            let image: Vec<KScalar> = (0..rb)
                .map(|t| {
                    let mut acc = KScalar::zero();
                    for (s, us) in u.iter().enumerate() {
                        let coeff = KScalar::from_rat(Rat::from(flat[s * rb + t].clone()));
                        acc = &acc + &ctx.mul(us, &coeff);
                    }
                    acc
                })
                .collect();
            if !image.iter().all(KScalar::is_zero) && !span_contains(ctx, &target, &image) {
                return false;
            }
        }
    }
    true
}

fn guard(unknowns: usize, bound: i64) -> Result<()> {
    if unknowns > MAX_UNKNOWNS {
        return Err(Error::SizeGuard(format!("{unknowns} unknowns exceed {MAX_UNKNOWNS}")));
    }
    if !(0..=MAX_BOUND).contains(&bound) {
        return Err(Error::SizeGuard(format!("bound {bound} exceeds {MAX_BOUND}")));
    }
    Ok(())
}

/// Exhaustively enumerate all integer maps A → B with coefficients in
/// [−bound, bound] satisfying the filtration constraints.
pub fn brute_force_hom(a: &Mhs, b: &Mhs, bound: i64) -> Result<Vec<MultilinearMap>> {
    a.ctx().require(b.ctx())?;
    let unknowns = a.rank() * b.rank();
    guard(unknowns, bound)?;
    let functionals = direct_functionals(a, b)?;
    let mut found: Vec<Vec<BigInt>> = Vec::new();
    enumerate_zero_locus(unknowns, bound, &functionals, &mut |x| {
        found.push(x.iter().map(|&v| BigInt::from(v)).collect());
    });
    // survivors are re-verified by exact membership, independently of the
    // functional prefilter
    let mut maps = Vec::new();
    for flat in found {
        if satisfies_directly(a, b, &flat) {
            maps.push(MultilinearMap::from_flat(vec![a.rank()], b.rank(), &flat)?);
        }
    }
    Ok(maps)
}

/// Result of comparing a solver lattice against the brute-force enumeration.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub agreed: bool,
    pub brute_count: usize,
    pub lattice_count: usize,
    /// Box points found by brute force but missing from the lattice.
    pub missing_from_lattice: Vec<Vec<BigInt>>,
    /// Lattice box points rejected by the direct constraint check.
    pub extra_in_lattice: Vec<Vec<BigInt>>,
}

/// Set equality between the brute-force maps and the lattice points of the
/// solver output within the same coefficient box.
pub fn compare_with_oracle(lat: &HomLattice, bound: i64) -> Result<OracleReport> {
    let source = lat.tensor_source();
    let target = lat.target();
    let unknowns = source.rank() * target.rank();
    guard(unknowns, bound)?;
    let brute: Vec<Vec<BigInt>> =
        brute_force_hom(source, target, bound)?.iter().map(MultilinearMap::flat).collect();

    // enumerate the lattice's own box points: prefilter by its ℚ-span, then
    // confirm exact membership
    let span_q = crate::exact::int_to_rat(lat.lattice().basis());
    let funcs = remainder_functionals_q(&crate::exact::row_span(&(), &span_q));
    let mut int_funcs: Vec<Vec<i128>> = Vec::new();
    if lat.lattice().rank() < unknowns {
        let cleared = clear_denominators(&Mat::from_rows(funcs)?);
        for row in cleared.row_vecs() {
            let mut small = Vec::with_capacity(row.len());
            for x in &row {
                if x.abs() > BigInt::from(1u64 << 40) {
                    return Err(Error::SizeGuard("lattice coefficients too large".into()));
                }
                small.push(x.to_i128().expect("bounded above"));
            }
            int_funcs.push(small);
        }
    }
    let mut lattice_points: Vec<Vec<BigInt>> = Vec::new();
    enumerate_zero_locus(unknowns, bound, &int_funcs, &mut |x| {
        let v: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        if lat.lattice().contains(&v) {
            lattice_points.push(v);
        }
    });

    let mut brute_sorted = brute.clone();
    brute_sorted.sort();
    let mut lattice_sorted = lattice_points.clone();
    lattice_sorted.sort();
    let missing_from_lattice: Vec<Vec<BigInt>> = brute_sorted
        .iter()
        .filter(|v| lattice_sorted.binary_search(v).is_err())
        .take(5).cloned()
        .collect();
    let extra_in_lattice: Vec<Vec<BigInt>> = lattice_sorted
        .iter()
        .filter(|v| brute_sorted.binary_search(v).is_err())
        .take(5).cloned()
        .collect();
    Ok(OracleReport {
        agreed: brute_sorted == lattice_sorted,
        brute_count: brute_sorted.len(),
        lattice_count: lattice_sorted.len(),
        missing_from_lattice,
        extra_in_lattice,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int_mat, rat, FieldContext, IntLattice};
    use crate::hodge::tate;
    use crate::homspace::{hom_lattice, hom_multilinear};
    use crate::motives::{elliptic, kummer};

    fn ctx() -> FieldContext {
        FieldContext::new(1).unwrap()
    }

    #[test]
    fn scalar_multiples_of_the_identity() {
        let t1 = tate(ctx(), 1);
        let maps = brute_force_hom(&t1, &t1, 2).unwrap();
        assert_eq!(maps.len(), 5); // -2, -1, 0, 1, 2
    }

    #[test]
    fn cm_box_count() {
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        let maps = brute_force_hom(&e, &e, 1).unwrap();
        // aI + bJ with a, b ∈ {-1, 0, 1}
        assert_eq!(maps.len(), 9);
    }

    #[test]
    fn pure_weight_mismatch_is_zero_only() {
        let maps = brute_force_hom(&tate(ctx(), 0), &tate(ctx(), 1), 2).unwrap();
        assert_eq!(maps.len(), 1);
        assert!(maps[0].is_zero());
    }

    #[test]
    fn oracle_agrees_with_solver_on_cm() {
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        let lat = hom_lattice(&e, &e).unwrap();
        let report = compare_with_oracle(&lat, 2).unwrap();
        assert!(report.agreed, "{report:?}");
        assert_eq!(report.brute_count, 25); // rank-2 lattice, box coefficients
    }

    #[test]
    fn oracle_agrees_on_bilinear_forms() {
        let k1 = kummer(ctx(), &KScalar::from_rat(rat(1, 2)));
        let k2 = kummer(ctx(), &KScalar::from_rat(rat(1, 3)));
        let lat = hom_multilinear(&[k1, k2], &tate(ctx(), 1)).unwrap();
        let report = compare_with_oracle(&lat, 2).unwrap();
        assert!(report.agreed, "{report:?}");
    }

    #[test]
    fn corrupted_lattice_is_reported() {
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        // overwrite with a wrong lattice: drop J and keep a stray map instead
        let wrong = IntLattice::from_rows(&int_mat(vec![vec![1, 0, 0, 1], vec![0, 1, 0, 0]]));
        let lat = hom_lattice(&e, &e).unwrap().with_lattice(wrong);
        let report = compare_with_oracle(&lat, 1).unwrap();
        assert!(!report.agreed);
        assert!(!report.missing_from_lattice.is_empty() || !report.extra_in_lattice.is_empty());
    }

    #[test]
    fn size_guards_fire() {
        let e = elliptic(ctx(), &KScalar::omega()).unwrap();
        let four = crate::hodge::tensor_mhs(&e, &e).unwrap();
        assert!(matches!(
            brute_force_hom(&four, &four, 2),
            Err(Error::SizeGuard(_))
        ));
        assert!(matches!(brute_force_hom(&e, &e, 7), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn random_motives_are_valid_and_deterministic() {
        let profile = InstanceProfile {
            max_lattice_rank: 1,
            elliptic_factors: 1,
            torus_rank: 1,
            height_bound: 2,
            seed: 1,
        };
        let m1 = random_motive(&profile);
        let m2 = random_motive(&profile);
        assert_eq!(m1, m2);
        let h = m1.build(ctx()).unwrap();
        assert!(crate::hodge::validate_one_motive(&h).ok());

        let zero_profile = InstanceProfile {
            max_lattice_rank: 0,
            elliptic_factors: 0,
            torus_rank: 0,
            height_bound: 2,
            seed: 2,
        };
        let z = random_motive(&zero_profile).build(ctx()).unwrap();
        assert_eq!(z.rank(), 0);
    }
}
