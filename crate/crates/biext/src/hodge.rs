//! Mixed Hodge structures with an integral lattice.
//!
//! An [`Mhs`] of rank r has lattice ℤ^r, an increasing weight filtration by
//! ℚ-subspaces of ℚ^r and a decreasing Hodge filtration by K-subspaces of
//! K^r. Filtrations are stored only at their jumps, with canonical (RREF)
//! bases, so equal structures compare equal structurally. The 1-motive shape
//! (weights in {0, −1, −2}, F⁰ complementary to the toric part and onto the
//! lattice part) is a separate, stricter validation.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{
    clear_denominators, int_to_rat, kernel, mul_int, rational_kernel, snf_with_transform, solve,
    span_contains, span_intersect, FieldContext, FieldScalar, IntLattice, IntMat, KScalar, Mat,
    MatK, MatQ, Rat,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mhs {
    ctx: FieldContext,
    rank: usize,
    weight_steps: BTreeMap<i64, MatQ>,
    hodge_steps: BTreeMap<i64, MatK>,
}

impl Mhs {
    /// Normalises the given filtration steps: bases are reduced to RREF,
    /// zero steps dropped, and consecutive equal steps merged so the stored
    /// keys are exactly the jumps.
    pub fn new(
        ctx: FieldContext,
        rank: usize,
        weight_steps: BTreeMap<i64, MatQ>,
        hodge_steps: BTreeMap<i64, MatK>,
    ) -> Result<Mhs> {
        let mut w_norm: BTreeMap<i64, MatQ> = BTreeMap::new();
        for (w, m) in weight_steps {
            if m.cols() != rank && m.rows() > 0 {
                return Err(Error::Shape(format!(
                    "weight step at {w} lives in dimension {}, expected {rank}",
                    m.cols()
                )));
            }
            let r = crate::exact::row_span(&(), &m);
            if r.rows() > 0 {
                w_norm.insert(w, r);
            }
        }
        // keep the first key of every run of equal steps (the jump)
        let mut prev: Option<&MatQ> = None;
        let mut dedup_w = BTreeMap::new();
        for (w, m) in &w_norm {
            if prev != Some(m) {
                dedup_w.insert(*w, m.clone());
            }
            prev = Some(m);
        }

        let mut h_norm: BTreeMap<i64, MatK> = BTreeMap::new();
        for (p, m) in hodge_steps {
            if m.cols() != rank && m.rows() > 0 {
                return Err(Error::Shape(format!(
                    "Hodge step at {p} lives in dimension {}, expected {rank}",
                    m.cols()
                )));
            }
            let r = crate::exact::row_span(&ctx, &m);
            if r.rows() > 0 {
                h_norm.insert(p, r);
            }
        }
        // keep the last key of every run of equal steps
        let mut dedup_h: BTreeMap<i64, MatK> = BTreeMap::new();
        let keys: Vec<i64> = h_norm.keys().copied().collect();
        for (i, p) in keys.iter().enumerate() {
            let here = &h_norm[p];
            let next = keys.get(i + 1).map(|q| &h_norm[q]);
            if next != Some(here) {
                dedup_h.insert(*p, here.clone());
            }
        }

        Ok(Mhs { ctx, rank, weight_steps: dedup_w, hodge_steps: dedup_h })
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// W_w: the value stored at the largest jump ≤ w; zero below all jumps.
    pub fn weight_at(&self, w: i64) -> MatQ {
        self.weight_steps
            .range(..=w)
            .next_back()
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Mat::empty(self.rank))
    }

    /// F^p: the value stored at the smallest jump ≥ p; zero above all jumps.
    pub fn hodge_at(&self, p: i64) -> MatK {
        self.hodge_steps
            .range(p..)
            .next()
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| Mat::empty(self.rank))
    }

    pub fn weight_at_k(&self, w: i64) -> MatK {
        self.weight_at(w).to_k()
    }

    pub fn weight_jumps(&self) -> Vec<i64> {
        self.weight_steps.keys().copied().collect()
    }

    pub fn hodge_jumps(&self) -> Vec<i64> {
        self.hodge_steps.keys().copied().collect()
    }

    /// Dimensions of the Hodge steps keyed by their jumps.
    pub fn hodge_dims(&self) -> BTreeMap<i64, usize> {
        self.hodge_steps.iter().map(|(p, m)| (*p, m.rows())).collect()
    }

    pub fn is_one_motive_type(&self) -> bool {
        validate_one_motive(self).ok()
    }
}

/// Ranks of the graded pieces Gr^W_w, nonzero entries only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrProfile(BTreeMap<i64, usize>);

impl GrProfile {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, usize)>) -> Self {
        GrProfile(pairs.into_iter().filter(|&(_, n)| n > 0).collect())
    }

    pub fn rank_at(&self, w: i64) -> usize {
        self.0.get(&w).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn scale(&self, z: usize) -> GrProfile {
        if z == 0 {
            return GrProfile(BTreeMap::new());
        }
        GrProfile(self.0.iter().map(|(&w, &n)| (w, n * z)).collect())
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, usize)> + '_ {
        self.0.iter().map(|(&w, &n)| (w, n))
    }
}

impl fmt::Display for GrProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (w, n)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{w}: {n}")?;
        }
        write!(f, "}}")
    }
}

pub fn gr_profile(h: &Mhs) -> GrProfile {
    let jumps = h.weight_jumps();
    GrProfile::from_pairs(jumps.into_iter().map(|w| {
        let here = h.weight_at(w).rows();
        let below = h.weight_at(w - 1).rows();
        (w, here - below)
    }))
}

/// A named violation of the MHS axioms (or of the 1-motive shape).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    WeightNotExhaustive,
    WeightNotIncreasing { lower: i64, upper: i64 },
    HodgeNotExhaustive,
    HodgeNotDecreasing { lower: i64, upper: i64 },
    HodgeSymmetry { weight: i64, p: i64 },
    OneMotiveWeights { weight: i64 },
    OneMotiveLatticePart,
    OneMotiveToricPart,
    OneMotiveHodgeDimension { twice_expected: usize, twice_actual: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WeightNotExhaustive => {
                write!(f, "weight filtration does not exhaust the lattice")
            }
            Violation::WeightNotIncreasing { lower, upper } => {
                write!(f, "W_{lower} is not contained in W_{upper}")
            }
            Violation::HodgeNotExhaustive => {
                write!(f, "Hodge filtration does not exhaust the lattice")
            }
            Violation::HodgeNotDecreasing { lower, upper } => {
                write!(f, "F^{upper} is not contained in F^{lower}")
            }
            Violation::HodgeSymmetry { weight, p } => {
                write!(f, "Hodge symmetry fails on Gr_{weight} at p = {p}")
            }
            Violation::OneMotiveWeights { weight } => {
                write!(f, "weight {weight} outside {{0, -1, -2}}")
            }
            Violation::OneMotiveLatticePart => write!(f, "F^0 does not project onto all of Gr_0"),
            Violation::OneMotiveToricPart => write!(f, "F^0 meets the toric part W_-2"),
            Violation::OneMotiveHodgeDimension { twice_expected, twice_actual } => write!(
                f,
                "2·dim F^0 = {twice_actual}, expected {twice_expected} (= 2·rk Gr_0 + rk Gr_-1)"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

/// Check the MHS axioms: monotone exhaustive filtrations and per-weight Hodge
/// symmetry F^p(Gr_w) ⊕ conj(F^{w+1−p}(Gr_w)) = Gr_w ⊗ K.
pub fn validate_mhs(h: &Mhs) -> ValidationReport {
    let mut violations = Vec::new();
    if h.rank > 0 {
        match h.weight_steps.values().next_back() {
            Some(top) if top.rows() == h.rank => {}
            _ => violations.push(Violation::WeightNotExhaustive),
        }
        match h.hodge_steps.values().next() {
            Some(bottom) if bottom.rows() == h.rank => {}
            _ => violations.push(Violation::HodgeNotExhaustive),
        }
    }
    let w_keys = h.weight_jumps();
    for pair in w_keys.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (a, b) = (&h.weight_steps[&lo], &h.weight_steps[&hi]);
        if !(0..a.rows()).all(|i| span_contains(&(), b, a.row(i))) {
            violations.push(Violation::WeightNotIncreasing { lower: lo, upper: hi });
        }
    }
    let p_keys = h.hodge_jumps();
    for pair in p_keys.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let (a, b) = (&h.hodge_steps[&lo], &h.hodge_steps[&hi]);
        if !(0..b.rows()).all(|i| span_contains(&h.ctx, a, b.row(i))) {
            violations.push(Violation::HodgeNotDecreasing { lower: lo, upper: hi });
        }
    }
    if !violations.is_empty() {
        // symmetry on graded pieces presumes well-formed filtrations
        return ValidationReport { violations };
    }

    if h.rank > 0 {
        let (p_lo, p_hi) = (p_keys[0], p_keys[p_keys.len() - 1]);
        for &w in &w_keys {
            let Some(gr) = GrPiece::at(h, w) else { continue };
            let mut induced: BTreeMap<i64, MatK> = BTreeMap::new();
            for p in p_lo..=p_hi + 1 {
                for q in [p, w + 1 - p] {
                    induced.entry(q).or_insert_with(|| gr.induced_hodge(h, q));
                }
            }
            for p in p_lo..=p_hi + 1 {
                let u = &induced[&p];
                let v = induced[&(w + 1 - p)].conj();
                let spans = crate::exact::span_sum(&h.ctx, u, &v).expect("same ambient");
                if u.rows() + v.rows() != gr.dim || spans.rows() != gr.dim {
                    violations.push(Violation::HodgeSymmetry { weight: w, p });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// MHS axioms plus the 1-motive shape: weights within {0, −1, −2}, F⁰ onto
/// the lattice part, F⁰ disjoint from the toric part, and the dimension count
/// dim F⁰ = rk Gr₀ + rk Gr₋₁ / 2.
pub fn validate_one_motive(h: &Mhs) -> ValidationReport {
    let mut report = validate_mhs(h);
    for w in h.weight_jumps() {
        if !(-2..=0).contains(&w) {
            report.violations.push(Violation::OneMotiveWeights { weight: w });
        }
    }
    if !report.ok() {
        return report;
    }
    let profile = gr_profile(h);
    let g0 = profile.rank_at(0);
    let g1 = profile.rank_at(-1);
    let f0 = h.hodge_at(0);
    if let Some(gr) = GrPiece::at(h, 0) {
        let image = gr.induced_hodge(h, 0);
        if image.rows() != gr.dim {
            report.violations.push(Violation::OneMotiveLatticePart);
        }
    }
    let toric = h.weight_at_k(-2);
    let meets = span_intersect(&h.ctx, &f0, &toric).expect("same ambient");
    if meets.rows() != 0 {
        report.violations.push(Violation::OneMotiveToricPart);
    }
    if 2 * f0.rows() != 2 * g0 + g1 {
        report.violations.push(Violation::OneMotiveHodgeDimension {
            twice_expected: 2 * g0 + g1,
            twice_actual: 2 * f0.rows(),
        });
    }
    report
}

/// A graded piece Gr_w = W_w / W_{w−1} over K, with a chosen lift of a basis.
struct GrPiece {
    dim: usize,
    w: i64,
    /// vstack(basis of W_{w−1}, lift rows), a basis of W_w over K
    stacked: MatK,
    prev_rows: usize,
}

impl GrPiece {
    fn at(h: &Mhs, w: i64) -> Option<GrPiece> {
        let prev = h.weight_at(w - 1);
        let cur = h.weight_at(w);
        let dim = cur.rows() - prev.rows();
        if dim == 0 {
            return None;
        }
        let mut span = prev.clone();
        let mut lift_rows = Vec::new();
        for row in cur.row_vecs() {
            if !span_contains(&(), &span, &row) {
                lift_rows.push(row.clone());
                span = crate::exact::row_span(
                    &(),
                    &span.vstack(&Mat::from_rows(vec![row]).unwrap()).unwrap(),
                );
            }
        }
        debug_assert_eq!(lift_rows.len(), dim);
        let lift = Mat::from_rows(lift_rows).unwrap();
        let stacked = prev.vstack(&lift).unwrap().to_k();
        Some(GrPiece { dim, w, stacked, prev_rows: prev.rows() })
    }

    /// Gr_w-coordinates of the image of F^q ∩ (W_w ⊗ K).
    fn induced_hodge(&self, h: &Mhs, q: i64) -> MatK {
        let w_k = h.weight_at_k(self.w);
        let inter = span_intersect(&h.ctx, &h.hodge_at(q), &w_k).expect("same ambient");
        let mut rows = Vec::new();
        for i in 0..inter.rows() {
            let coords = solve(&h.ctx, &self.stacked.transpose(), inter.row(i))
                .expect("vectors of W_w expand in its basis");
            rows.push(coords[self.prev_rows..].to_vec());
        }
        if rows.is_empty() {
            return Mat::empty(self.dim);
        }
        crate::exact::row_span(&h.ctx, &Mat::from_rows(rows).unwrap())
    }
}

/// ℤ(n): rank 1, pure weight −2n, F^{−n} everything and F^{−n+1} zero.
pub fn tate(ctx: FieldContext, n: u32) -> Mhs {
    let full_q: MatQ = Mat::identity(1);
    let full_k: MatK = Mat::identity(1);
    let n = i64::from(n);
    Mhs::new(ctx, 1, BTreeMap::from([(-2 * n, full_q)]), BTreeMap::from([(-n, full_k)]))
        .expect("well-formed by construction")
}

fn kron_row<T: FieldScalar>(ctx: &T::Ctx, u: &[T], v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(T::f_mul(ctx, a, b));
        }
    }
    out
}

fn span_of_rows<T: FieldScalar>(ctx: &T::Ctx, rows: Vec<Vec<T>>, ambient: usize) -> Mat<T> {
    if rows.is_empty() {
        return Mat::empty(ambient);
    }
    crate::exact::row_span(ctx, &Mat::from_rows(rows).expect("rectangular"))
}

/// Tensor product: rank r_A·r_B on the lexicographic tensor basis,
/// W_n = Σ_{i+j=n} W_i ⊗ W_j and F^p = Σ_{a+b=p} F^a ⊗ F^b.
pub fn tensor_mhs(a: &Mhs, b: &Mhs) -> Result<Mhs> {
    a.ctx.require(&b.ctx)?;
    let rank = a.rank * b.rank;
    if rank == 0 {
        return Mhs::new(a.ctx, 0, BTreeMap::new(), BTreeMap::new());
    }
    let (wa, wb) = (a.weight_jumps(), b.weight_jumps());
    let mut weight_steps = BTreeMap::new();
    if let (Some(&wa_min), Some(&wb_min), Some(&wa_max), Some(&wb_max)) =
        (wa.first(), wb.first(), wa.last(), wb.last())
    {
        for n in wa_min + wb_min..=wa_max + wb_max {
            let mut rows = Vec::new();
            for &i in &wa {
                let ma = &a.weight_steps[&i];
                let mb = b.weight_at(n - i);
                for r in 0..ma.rows() {
                    for s in 0..mb.rows() {
                        rows.push(kron_row(&(), ma.row(r), mb.row(s)));
                    }
                }
            }
            weight_steps.insert(n, span_of_rows(&(), rows, rank));
        }
    }
    let (pa, pb) = (a.hodge_jumps(), b.hodge_jumps());
    let mut hodge_steps = BTreeMap::new();
    if let (Some(&pa_min), Some(&pb_min), Some(&pa_max), Some(&pb_max)) =
        (pa.first(), pb.first(), pa.last(), pb.last())
    {
        for n in pa_min + pb_min..=pa_max + pb_max {
            let mut rows = Vec::new();
            for &p in &pa {
                let ma = &a.hodge_steps[&p];
                let mb = b.hodge_at(n - p);
                for r in 0..ma.rows() {
                    for s in 0..mb.rows() {
                        rows.push(kron_row(&a.ctx, ma.row(r), mb.row(s)));
                    }
                }
            }
            hodge_steps.insert(n, span_of_rows(&a.ctx, rows, rank));
        }
    }
    Mhs::new(a.ctx, rank, weight_steps, hodge_steps)
}

/// Tensor product of a list of factors, left to right.
pub fn tensor_many(factors: &[Mhs]) -> Result<Mhs> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Shape("tensor product of an empty list of factors".into()))?;
    let mut acc = first.clone();
    for f in rest {
        acc = tensor_mhs(&acc, f)?;
    }
    Ok(acc)
}

/// Constraint rows (over the given scalars) expressing f(U) ⊆ V for a map
/// ℤ^{ra} → ℤ^{rb} flattened as x[a·rb + t].
fn map_constraints<T: FieldScalar>(
    ctx: &T::Ctx,
    source_space: &Mat<T>,
    target_space: &Mat<T>,
    _rb: usize,
) -> Vec<Vec<T>> {
    let ann = kernel(ctx, target_space);
    let mut out = Vec::new();
    for ui in 0..source_space.rows() {
        let u = source_space.row(ui);
        for ci in 0..ann.rows() {
            out.push(kron_row(ctx, u, ann.row(ci)));
        }
    }
    out
}

/// Internal hom: lattice of all integer maps ℤ^{rA} → ℤ^{rB} with
/// W_n = {f : f(W_i A) ⊆ W_{i+n} B} and F^p = {f : f(F^q A) ⊆ F^{q+p} B}.
/// Basis index (a, t) ↦ a·rB + t.
pub fn internal_hom(a: &Mhs, b: &Mhs) -> Result<Mhs> {
    a.ctx.require(&b.ctx)?;
    let rank = a.rank * b.rank;
    if rank == 0 {
        return Mhs::new(a.ctx, 0, BTreeMap::new(), BTreeMap::new());
    }
    let (wa, wb) = (a.weight_jumps(), b.weight_jumps());
    let mut weight_steps = BTreeMap::new();
    if let (Some(&wa_min), Some(&wa_max), Some(&wb_min), Some(&wb_max)) =
        (wa.first(), wa.last(), wb.first(), wb.last())
    {
        for n in wb_min - wa_max..=wb_max - wa_min {
            let mut constraints = Vec::new();
            for &i in &wa {
                constraints.extend(map_constraints(
                    &(),
                    &a.weight_steps[&i],
                    &b.weight_at(i + n),
                    b.rank,
                ));
            }
            let space = if constraints.is_empty() {
                Mat::identity(rank)
            } else {
                rational_kernel(&Mat::from_rows(constraints)?)
            };
            weight_steps.insert(n, space);
        }
    }
    let (pa, pb) = (a.hodge_jumps(), b.hodge_jumps());
    let mut hodge_steps = BTreeMap::new();
    if let (Some(&pa_min), Some(&pa_max), Some(&pb_min), Some(&pb_max)) =
        (pa.first(), pa.last(), pb.first(), pb.last())
    {
        for p in pb_min - pa_max..=pb_max - pa_min {
            let mut constraints = Vec::new();
            for &q in &pa {
                constraints.extend(map_constraints(
                    &a.ctx,
                    &a.hodge_steps[&q],
                    &b.hodge_at(q + p),
                    b.rank,
                ));
            }
            let space = if constraints.is_empty() {
                Mat::identity(rank)
            } else {
                kernel(&a.ctx, &Mat::from_rows(constraints)?)
            };
            hodge_steps.insert(p, space);
        }
    }
    Mhs::new(a.ctx, rank, weight_steps, hodge_steps)
}

/// Integral model of a rational subspace: the saturated lattice ℤ^r ∩ U
/// together with the projection ℤ^r → ℤ^{r−s} whose kernel is exactly it.
pub struct SaturatedSubspace {
    pub lattice: IntLattice,
    /// r × (r−s): right multiplication is the quotient projection.
    pub projection: IntMat,
}

pub fn saturated_subspace(space: &MatQ, ambient: usize) -> SaturatedSubspace {
    let lattice = if space.rows() == 0 {
        IntLattice::zero(ambient)
    } else {
        IntLattice::from_rows(&clear_denominators(space)).saturate()
    };
    let s = lattice.rank();
    let projection = if s == 0 {
        IntMat::identity_int(ambient)
    } else {
        let (diag, _, v) = snf_with_transform(lattice.basis());
        debug_assert!(diag.iter().all(|d| d.is_one()), "saturated lattice has trivial SNF");
        Mat::from_fn(ambient, ambient - s, |r, c| v.at(r, s + c).clone())
    };
    SaturatedSubspace { lattice, projection }
}

/// Quotient by W_{−k}: the lattice becomes ℤ^r / (ℤ^r ∩ W_{−k}), re-presented
/// on a standard basis; W and F are pushed forward along the projection.
pub fn quotient_by_weight(h: &Mhs, k: i64) -> Result<Mhs> {
    let sub = saturated_subspace(&h.weight_at(-k), h.rank);
    let proj_q = int_to_rat(&sub.projection);
    let proj_k = proj_q.to_k();
    let new_rank = h.rank - sub.lattice.rank();
    let mut weight_steps = BTreeMap::new();
    for w in h.weight_jumps() {
        if w <= -k {
            continue;
        }
        let image = h.weight_at(w).mul(&(), &proj_q)?;
        weight_steps.insert(w, image);
    }
    let mut hodge_steps = BTreeMap::new();
    for p in h.hodge_jumps() {
        let image = h.hodge_at(p).mul(&h.ctx, &proj_k)?;
        hodge_steps.insert(p, image);
    }
    Mhs::new(h.ctx, new_rank, weight_steps, hodge_steps)
}

/// Block-diagonal direct sum.
pub fn direct_sum(ctx: FieldContext, parts: &[Mhs]) -> Result<Mhs> {
    for p in parts {
        ctx.require(&p.ctx)?;
    }
    let rank: usize = parts.iter().map(Mhs::rank).sum();
    let offsets: Vec<usize> = parts
        .iter()
        .scan(0usize, |acc, p| {
            let o = *acc;
            *acc += p.rank;
            Some(o)
        })
        .collect();
    let embed_q = |rows: &MatQ, offset: usize| -> Vec<Vec<Rat>> {
        (0..rows.rows())
            .map(|i| {
                let mut v = vec![Rat::zero(); rank];
                v[offset..offset + rows.cols()].clone_from_slice(rows.row(i));
                v
            })
            .collect()
    };
    let embed_k = |rows: &MatK, offset: usize| -> Vec<Vec<KScalar>> {
        (0..rows.rows())
            .map(|i| {
                let mut v = vec![KScalar::zero(); rank];
                v[offset..offset + rows.cols()].clone_from_slice(rows.row(i));
                v
            })
            .collect()
    };
    let mut w_keys: Vec<i64> = parts.iter().flat_map(Mhs::weight_jumps).collect();
    w_keys.sort_unstable();
    w_keys.dedup();
    let mut weight_steps = BTreeMap::new();
    for w in w_keys {
        let mut rows = Vec::new();
        for (p, &o) in parts.iter().zip(&offsets) {
            rows.extend(embed_q(&p.weight_at(w), o));
        }
        weight_steps.insert(w, span_of_rows(&(), rows, rank));
    }
    let mut p_keys: Vec<i64> = parts.iter().flat_map(Mhs::hodge_jumps).collect();
    p_keys.sort_unstable();
    p_keys.dedup();
    let mut hodge_steps = BTreeMap::new();
    for pk in p_keys {
        let mut rows = Vec::new();
        for (p, &o) in parts.iter().zip(&offsets) {
            rows.extend(embed_k(&p.hodge_at(pk), o));
        }
        hodge_steps.insert(pk, span_of_rows(&ctx, rows, rank));
    }
    Mhs::new(ctx, rank, weight_steps, hodge_steps)
}

/// Integral graded piece: a ℤ-basis of (W_w ∩ ℤ^r)/(W_{w−1} ∩ ℤ^r) given by
/// lifted rows, plus the coordinate map along them.
pub struct IntegerGr {
    pub dim: usize,
    /// dim × r: rows are lattice lifts of the chosen Gr basis.
    pub lift: IntMat,
    basis_w: IntMat,
    quotient_cols: IntMat,
}

impl IntegerGr {
    pub fn at(h: &Mhs, w: i64) -> IntegerGr {
        let cur = saturated_subspace(&h.weight_at(w), h.rank).lattice;
        let prev = saturated_subspace(&h.weight_at(w - 1), h.rank).lattice;
        let nw = cur.rank();
        let np = prev.rank();
        let dim = nw - np;
        let basis_w = cur.basis().clone();
        if dim == 0 {
            return IntegerGr {
                dim,
                lift: Mat::empty(h.rank),
                basis_w,
                quotient_cols: Mat::empty(0),
            };
        }
        // coordinates of the lower lattice in the basis of the upper one
        let coeff_rows: Vec<Vec<BigInt>> = prev
            .basis_rows()
            .iter()
            .map(|row| {
                let sol = solve(
                    &(),
                    &int_to_rat(&basis_w).transpose(),
                    &row.iter().map(|x| Rat::from(x.clone())).collect::<Vec<_>>(),
                )
                .expect("lower weight lattice lies in the upper one");
                sol.iter()
                    .map(|x| {
                        debug_assert!(x.is_integer());
                        x.numer().clone()
                    })
                    .collect()
            })
            .collect();
        let (v, v_inv) = if np == 0 {
            (IntMat::identity_int(nw), IntMat::identity_int(nw))
        } else {
            let coeff = Mat::from_rows(coeff_rows).expect("rectangular");
            let (diag, _, v) = snf_with_transform(&coeff);
            debug_assert!(diag.iter().all(|d| d.is_one()));
            let v_inv = int_inverse_unimodular(&v);
            (v, v_inv)
        };
        let quotient_cols = Mat::from_fn(nw, dim, |r, c| v.at(r, np + c).clone());
        let section = Mat::from_fn(dim, nw, |r, c| v_inv.at(np + r, c).clone());
        let lift = mul_int(&section, &basis_w).expect("shapes agree");
        IntegerGr { dim, lift, basis_w, quotient_cols }
    }

    /// Gr-coordinates of an integral vector of W_w ∩ ℤ^r; `None` outside.
    pub fn coords(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        if self.dim == 0 {
            return if x.iter().all(Zero::is_zero) || self.basis_w.rows() > 0 {
                Some(Vec::new())
            } else {
                None
            };
        }
        let rhs: Vec<Rat> = x.iter().map(|v| Rat::from(v.clone())).collect();
        let sol = solve(&(), &int_to_rat(&self.basis_w).transpose(), &rhs)?;
        let mut a = Vec::with_capacity(sol.len());
        for v in sol {
            if !v.is_integer() {
                return None;
            }
            a.push(v.numer().clone());
        }
        let a_mat = Mat::from_rows(vec![a]).expect("rectangular");
        Some(mul_int(&a_mat, &self.quotient_cols).expect("shapes agree").row(0).to_vec())
    }
}

/// Inverse of a unimodular integer matrix.
pub fn int_inverse_unimodular(m: &IntMat) -> IntMat {
    let n = m.rows();
    let mq = int_to_rat(m);
    Mat::from_fn(n, n, |r, c| {
        // column c of the inverse solves m·x = e_c; read entry r
        let mut e = vec![Rat::zero(); n];
        e[c] = Rat::one();
        let x = solve(&(), &mq, &e).expect("unimodular matrices are invertible");
        debug_assert!(x[r].is_integer());
        x[r].numer().clone()
    })
}
