//! Dense matrices and exact row reduction over a field.
//!
//! `Mat<T>` is plain row-major storage; the field algorithms (reduced row
//! echelon form, kernels, subspace arithmetic) are generic over
//! [`FieldScalar`] so they serve both ℚ and K = ℚ(ω). Subspaces are always
//! passed around as matrices whose rows form a basis; in canonical form the
//! rows are the RREF of the span, which makes subspace equality plain
//! structural equality.

use crate::exact::scalar::{FieldScalar, KScalar, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type MatQ = Mat<Rat>;
pub type MatK = Mat<KScalar>;

impl<T: Clone> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// An empty matrix with zero rows and a definite column count.
    pub fn empty(cols: usize) -> Self {
        Mat { rows: 0, cols, data: Vec::new() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl MatQ {
    /// Extend scalars from ℚ to K.
    pub fn to_k(&self) -> MatK {
        self.map(|x| KScalar::from_rat(x.clone()))
    }
}

impl MatK {
    pub fn conj(&self) -> MatK {
        self.map(KScalar::conj)
    }
}

impl<T: FieldScalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| T::f_zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { T::f_one() } else { T::f_zero() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::f_is_zero)
    }

    pub fn mul(&self, ctx: &T::Ctx, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Mat::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = T::f_zero();
            for k in 0..self.cols {
                acc = T::f_add(ctx, &acc, &T::f_mul(ctx, self.at(r, k), other.at(k, c)));
            }
            acc
        }))
    }

    /// Image of a (row) vector: v ↦ v·selfᵗ, i.e. apply each row as a functional.
    pub fn apply(&self, ctx: &T::Ctx, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "applying {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = T::f_zero();
                for c in 0..self.cols {
                    acc = T::f_add(ctx, &acc, &T::f_mul(ctx, self.at(r, c), &v[c]));
                }
                acc
            })
            .collect())
    }
}

/// Reduced row echelon form with the pivot columns; zero rows are dropped.
/// The result is the canonical basis of the row span.
pub fn rref<T: FieldScalar>(ctx: &T::Ctx, m: &Mat<T>) -> (Mat<T>, Vec<usize>) {
    let mut rows = m.row_vecs();
    let cols = m.cols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(i) = (r..rows.len()).find(|&i| !rows[i][c].f_is_zero()) else {
            continue;
        };
        rows.swap(r, i);
        let inv = T::f_inv(ctx, &rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = T::f_mul(ctx, x, &inv);
        }
        for j in 0..rows.len() {
            if j != r && !rows[j][c].f_is_zero() {
                let factor = rows[j][c].clone();
                for k in 0..cols {
                    let t = T::f_mul(ctx, &factor, &rows[r][k]);
                    rows[j][k] = T::f_sub(ctx, &rows[j][k], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (Mat::from_rows(rows).expect("rows stay rectangular"), pivots)
}

/// Canonical basis (RREF rows) of the row span.
pub fn row_span<T: FieldScalar>(ctx: &T::Ctx, m: &Mat<T>) -> Mat<T> {
    rref(ctx, m).0
}

pub fn rank<T: FieldScalar>(ctx: &T::Ctx, m: &Mat<T>) -> usize {
    rref(ctx, m).0.rows()
}

/// Basis (as rows) of the right kernel {v : m·v = 0}, read off the RREF free
/// columns. Together with `rank` this realises rank + nullity = cols.
pub fn kernel<T: FieldScalar>(ctx: &T::Ctx, m: &Mat<T>) -> Mat<T> {
    let (r, pivots) = rref(ctx, m);
    let cols = m.cols();
    let mut basis = Vec::new();
    for q in 0..cols {
        if pivots.contains(&q) {
            continue;
        }
        let mut v = vec![T::f_zero(); cols];
        v[q] = T::f_one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = T::f_neg(r.at(i, q));
        }
        basis.push(v);
    }
    if basis.is_empty() {
        Mat::empty(cols)
    } else {
        Mat::from_rows(basis).expect("kernel rows are rectangular")
    }
}

/// Reduce a vector against RREF rows; the remainder is zero exactly when the
/// vector lies in the span.
pub fn reduce_against<T: FieldScalar>(
    ctx: &T::Ctx,
    basis: &Mat<T>,
    pivots: &[usize],
    v: &[T],
) -> Vec<T> {
    let mut v = v.to_vec();
    for (i, &p) in pivots.iter().enumerate() {
        if v[p].f_is_zero() {
            continue;
        }
        let factor = v[p].clone();
        for c in 0..v.len() {
            let t = T::f_mul(ctx, &factor, basis.at(i, c));
            v[c] = T::f_sub(ctx, &v[c], &t);
        }
    }
    v
}

/// Membership of a vector in the row span of an arbitrary basis matrix.
pub fn span_contains<T: FieldScalar>(ctx: &T::Ctx, span: &Mat<T>, v: &[T]) -> bool {
    let (r, pivots) = rref(ctx, span);
    reduce_against(ctx, &r, &pivots, v).iter().all(T::f_is_zero)
}

/// Canonical basis of the sum of two row spans.
pub fn span_sum<T: FieldScalar>(ctx: &T::Ctx, a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    Ok(row_span(ctx, &a.vstack(b)?))
}

/// Canonical basis of the intersection of two row spans.
pub fn span_intersect<T: FieldScalar>(ctx: &T::Ctx, a: &Mat<T>, b: &Mat<T>) -> Result<Mat<T>> {
    if a.cols() != b.cols() {
        return Err(Error::Shape("intersection of spans in different ambient spaces".into()));
    }
    if a.rows() == 0 || b.rows() == 0 {
        return Ok(Mat::empty(a.cols()));
    }
    // x = c·a lies in span(b) iff c kills a·ann(b)ᵗ.
    let ann_b = kernel(ctx, b);
    if ann_b.rows() == 0 {
        return Ok(row_span(ctx, a));
    }
    let m = a.mul(ctx, &ann_b.transpose())?;
    let coeffs = kernel(ctx, &m.transpose());
    let mut rows = Vec::new();
    for i in 0..coeffs.rows() {
        let mut v = vec![T::f_zero(); a.cols()];
        for j in 0..a.rows() {
            for c in 0..a.cols() {
                let t = T::f_mul(ctx, coeffs.at(i, j), a.at(j, c));
                v[c] = T::f_add(ctx, &v[c], &t);
            }
        }
        rows.push(v);
    }
    if rows.is_empty() {
        return Ok(Mat::empty(a.cols()));
    }
    Ok(row_span(ctx, &Mat::from_rows(rows)?))
}

/// Solve m·x = rhs (column form); `None` if inconsistent.
pub fn solve<T: FieldScalar>(ctx: &T::Ctx, m: &Mat<T>, rhs: &[T]) -> Option<Vec<T>> {
    assert_eq!(m.rows(), rhs.len(), "solve: shape mismatch");
    let augmented = Mat::from_fn(m.rows(), m.cols() + 1, |r, c| {
        if c < m.cols() {
            m.at(r, c).clone()
        } else {
            rhs[r].clone()
        }
    });
    let (red, pivots) = rref(ctx, &augmented);
    if pivots.contains(&m.cols()) {
        return None; // pivot in the RHS column: inconsistent
    }
    let mut x = vec![T::f_zero(); m.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = red.at(i, m.cols()).clone();
    }
    Some(x)
}
