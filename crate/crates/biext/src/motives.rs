//! Builders that turn 1-motive descriptions into validated Hodge structures.
//!
//! The general entry point is a [`PeriodPresentation`]: generator-level data
//! for `[ℤ^r → G]` with G an extension of a product of elliptic curves by a
//! split torus. Its Hodge structure has lattice ℤ^{r+2g+t} on the ordered
//! basis (x₁..x_r, a₁..a_{2g}, y₁..y_t) and F⁰ the kernel of the period
//! matrix. Lattice parts, tori, elliptic curves and Kummer motives are the
//! obvious special cases.

use std::collections::BTreeMap;

use crate::exact::{kernel, FieldContext, KScalar, Mat, MatK, MatQ, Rat};
use crate::hodge::{direct_sum, gr_profile, internal_hom, tate, Mhs};
use crate::{Error, Result};

/// Generator-level description of a 1-motive. Lie coordinates on the elliptic
/// factors are taken in units where E_{τ_j} has periods (τ_j, 1); torus
/// directions are in units of 2πi, so the torus period is 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodPresentation {
    pub lattice_rank: usize,
    pub elliptic_moduli: Vec<KScalar>,
    pub torus_rank: usize,
    /// g×r: Lie coordinates of the lattice images on the abelian part.
    pub abelian_lifts: MatK,
    /// t×r: Lie coordinates of the lattice images on the torus.
    pub torus_lifts: MatK,
    /// t×2g: torus coordinates of the abelian homology basis (the extension).
    pub extension_periods: MatK,
}

impl PeriodPresentation {
    pub fn new(
        lattice_rank: usize,
        elliptic_moduli: Vec<KScalar>,
        torus_rank: usize,
        abelian_lifts: MatK,
        torus_lifts: MatK,
        extension_periods: MatK,
    ) -> Result<Self> {
        let g = elliptic_moduli.len();
        let shape_ok = |m: &MatK, rows: usize, cols: usize| {
            (m.rows(), m.cols()) == (rows, cols)
                || ((rows == 0 || cols == 0) && m.rows() * m.cols() == 0)
        };
        if !shape_ok(&abelian_lifts, g, lattice_rank) {
            return Err(Error::Shape(format!(
                "abelian lifts must be {g}x{lattice_rank}, got {}x{}",
                abelian_lifts.rows(),
                abelian_lifts.cols()
            )));
        }
        if !shape_ok(&torus_lifts, torus_rank, lattice_rank) {
            return Err(Error::Shape(format!(
                "torus lifts must be {torus_rank}x{lattice_rank}, got {}x{}",
                torus_lifts.rows(),
                torus_lifts.cols()
            )));
        }
        if !shape_ok(&extension_periods, torus_rank, 2 * g) {
            return Err(Error::Shape(format!(
                "extension periods must be {torus_rank}x{}, got {}x{}",
                2 * g,
                extension_periods.rows(),
                extension_periods.cols()
            )));
        }
        for tau in &elliptic_moduli {
            if tau.is_rational() {
                return Err(Error::DegenerateModulus(tau.to_string()));
            }
        }
        Ok(PeriodPresentation {
            lattice_rank,
            elliptic_moduli,
            torus_rank,
            abelian_lifts,
            torus_lifts,
            extension_periods,
        })
    }

    pub fn rank(&self) -> usize {
        self.lattice_rank + 2 * self.elliptic_moduli.len() + self.torus_rank
    }

    /// The (g+t) × (r+2g+t) period matrix: abelian rows
    /// [lifts | blockdiag(τ_j, 1) | 0], torus rows [lifts | extension | id].
    pub fn period_matrix(&self) -> MatK {
        let (r, g, _t) = (self.lattice_rank, self.elliptic_moduli.len(), self.torus_rank);
        let n = self.rank();
        Mat::from_fn(g + self.torus_rank, n, |row, col| {
            if row < g {
                let j = row;
                if col < r {
                    if self.abelian_lifts.rows() > 0 {
                        self.abelian_lifts.at(j, col).clone()
                    } else {
                        KScalar::zero()
                    }
                } else if col < r + 2 * g {
                    let k = col - r;
                    if k == 2 * j {
                        self.elliptic_moduli[j].clone()
                    } else if k == 2 * j + 1 {
                        KScalar::one()
                    } else {
                        KScalar::zero()
                    }
                } else {
                    KScalar::zero()
                }
            } else {
                let i = row - g;
                if col < r {
                    self.torus_lifts.at(i, col).clone()
                } else if col < r + 2 * g {
                    self.extension_periods.at(i, col - r).clone()
                } else if col == r + 2 * g + i {
                    KScalar::one()
                } else {
                    KScalar::zero()
                }
            }
        })
    }
}

/// Hodge realization of a period presentation: W₋₂ spans the torus
/// directions, W₋₁ adds the elliptic homology, and F⁰ is the kernel of the
/// period matrix (dimension r+g).
pub fn build_from_periods(ctx: FieldContext, p: &PeriodPresentation) -> Result<Mhs> {
    let (r, g, t) = (p.lattice_rank, p.elliptic_moduli.len(), p.torus_rank);
    let n = p.rank();
    if n == 0 {
        return Mhs::new(ctx, 0, BTreeMap::new(), BTreeMap::new());
    }
    let periods = p.period_matrix();
    if crate::exact::rank(&ctx, &periods) != g + t {
        return Err(Error::RankDeficientPeriods);
    }
    let coord_span = |from: usize, len: usize| -> MatQ {
        Mat::from_fn(len, n, |row, col| {
            if col == from + row {
                Rat::from(num_bigint::BigInt::from(1))
            } else {
                Rat::from(num_bigint::BigInt::from(0))
            }
        })
    };
    let mut weight_steps = BTreeMap::new();
    if t > 0 {
        weight_steps.insert(-2, coord_span(r + 2 * g, t));
    }
    if 2 * g + t > 0 {
        weight_steps.insert(-1, coord_span(r, 2 * g + t));
    }
    weight_steps.insert(0, Mat::identity(n));

    let f0 = kernel(&ctx, &periods);
    debug_assert_eq!(f0.rows(), r + g);
    let mut hodge_steps = BTreeMap::new();
    hodge_steps.insert(-1, Mat::identity(n));
    hodge_steps.insert(0, f0);
    Mhs::new(ctx, n, weight_steps, hodge_steps)
}

/// [ℤ^r → 0]: pure weight 0, F⁰ everything.
pub fn lattice_motive(ctx: FieldContext, r: usize) -> Mhs {
    let id_q: MatQ = Mat::identity(r);
    let id_k: MatK = Mat::identity(r);
    Mhs::new(ctx, r, BTreeMap::from([(0, id_q)]), BTreeMap::from([(0, id_k)]))
        .expect("well-formed by construction")
}

/// A split torus of rank t: pure weight −2, F⁰ = 0.
pub fn torus_motive(ctx: FieldContext, t: usize) -> Mhs {
    direct_sum(ctx, &vec![tate(ctx, 1); t]).expect("one context")
}

/// H₁ of the elliptic curve with period lattice ℤτ + ℤ; τ must have a
/// nonzero ω-part.
pub fn elliptic(ctx: FieldContext, tau: &KScalar) -> Result<Mhs> {
    let p = PeriodPresentation::new(
        0,
        vec![tau.clone()],
        0,
        Mat::empty(0),
        Mat::empty(0),
        Mat::empty(0),
    )?;
    build_from_periods(ctx, &p)
}

/// The Kummer motive [ℤ → G_m] with extension parameter π (the logarithm of
/// the marked point, in units of 2πi).
pub fn kummer(ctx: FieldContext, pi: &KScalar) -> Mhs {
    let p = PeriodPresentation::new(
        1,
        Vec::new(),
        1,
        Mat::empty(1),
        Mat::from_rows(vec![vec![pi.clone()]]).expect("1x1"),
        Mat::empty(0),
    )
    .expect("shapes are fixed");
    build_from_periods(ctx, &p).expect("kummer periods are never degenerate")
}

/// Cartier dual at the Hodge level: maps into ℤ(1). The weight profile
/// reflects through −1 and the elliptic part self-dualizes.
pub fn cartier_dual(h: &Mhs) -> Result<Mhs> {
    if !h.is_one_motive_type() {
        return Err(Error::NotOneMotive);
    }
    internal_hom(h, &tate(*h.ctx(), 1))
}

/// z-fold direct sum, the tensor product with the weight-0 motive ℤ^z.
pub fn tensor_weight0(h: &Mhs, z: usize) -> Mhs {
    direct_sum(*h.ctx(), &vec![h.clone(); z]).expect("one context")
}

/// Symbolic motive descriptions, the input language of files and suites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MotiveSpec {
    Lattice(usize),
    Torus(usize),
    Elliptic(KScalar),
    Kummer(KScalar),
    Tate(u32),
    Periods(PeriodPresentation),
    Sum(Vec<MotiveSpec>),
    Dual(Box<MotiveSpec>),
}

impl MotiveSpec {
    pub fn build(&self, ctx: FieldContext) -> Result<Mhs> {
        match self {
            MotiveSpec::Lattice(r) => Ok(lattice_motive(ctx, *r)),
            MotiveSpec::Torus(t) => Ok(torus_motive(ctx, *t)),
            MotiveSpec::Elliptic(tau) => elliptic(ctx, tau),
            MotiveSpec::Kummer(pi) => Ok(kummer(ctx, pi)),
            MotiveSpec::Tate(n) => Ok(tate(ctx, *n)),
            MotiveSpec::Periods(p) => build_from_periods(ctx, p),
            MotiveSpec::Sum(parts) => {
                let built: Result<Vec<Mhs>> = parts.iter().map(|s| s.build(ctx)).collect();
                direct_sum(ctx, &built?)
            }
            MotiveSpec::Dual(inner) => cartier_dual(&inner.build(ctx)?),
        }
    }
}

/// Re-index the standard basis: new_basis[perm[i]] = old_basis[i]. Filtration
/// subspaces are carried along and re-canonicalised.
pub fn permute_basis(h: &Mhs, perm: &[usize]) -> Result<Mhs> {
    let n = h.rank();
    if perm.len() != n {
        return Err(Error::Shape("permutation length differs from rank".into()));
    }
    let mut inverse = vec![usize::MAX; n];
    for (i, &p) in perm.iter().enumerate() {
        if p >= n || inverse[p] != usize::MAX {
            return Err(Error::Shape("not a permutation".into()));
        }
        inverse[p] = i;
    }
    let permute_q = |m: &MatQ| -> MatQ { Mat::from_fn(m.rows(), n, |r, c| m.at(r, inverse[c]).clone()) };
    let permute_k = |m: &MatK| -> MatK { Mat::from_fn(m.rows(), n, |r, c| m.at(r, inverse[c]).clone()) };
    let weight_steps = h
        .weight_jumps()
        .into_iter()
        .map(|w| (w, permute_q(&h.weight_at(w))))
        .collect();
    let hodge_steps = h
        .hodge_jumps()
        .into_iter()
        .map(|p| (p, permute_k(&h.hodge_at(p))))
        .collect();
    Mhs::new(*h.ctx(), n, weight_steps, hodge_steps)
}

/// Gr₀ rank, the size of the lattice part; inputs to rank decompositions.
pub fn lattice_part_rank(h: &Mhs) -> usize {
    gr_profile(h).rank_at(0)
}
