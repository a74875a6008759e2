//! Integer matrices and lattices: Hermite and Smith normal forms, integer
//! kernels, saturation.
//!
//! Lattices are stored in row Hermite normal form: upper echelon, positive
//! pivots, entries above each pivot reduced into `[0, pivot)`. The form is
//! unique, so two lattices are equal exactly when their stored bases are.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exact::mat::{Mat, MatQ};
use crate::exact::scalar::Rat;
use crate::{Error, Result};

pub type IntMat = Mat<BigInt>;

pub fn int_mat(rows: Vec<Vec<i64>>) -> IntMat {
    Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
        .expect("rectangular")
}

pub fn mul_int(a: &IntMat, b: &IntMat) -> Result<IntMat> {
    if a.cols() != b.rows() {
        return Err(Error::Shape(format!(
            "integer product of {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(Mat::from_fn(a.rows(), b.cols(), |r, c| {
        let mut acc = BigInt::zero();
        for k in 0..a.cols() {
            acc += a.at(r, k) * b.at(k, c);
        }
        acc
    }))
}

pub fn int_to_rat(m: &IntMat) -> MatQ {
    m.map(|x| Rat::from(x.clone()))
}

/// Scale each row by the lcm of its denominators, then divide by the gcd of
/// its entries and normalise the leading sign. Preserves the row span over ℚ.
pub fn clear_denominators(m: &MatQ) -> IntMat {
    Mat::from_rows(
        (0..m.rows())
            .map(|r| {
                let row = m.row(r);
                let lcm = row
                    .iter()
                    .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let ints: Vec<BigInt> =
                    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                primitive_row(ints)
            })
            .collect(),
    )
    .expect("rectangular")
}

/// Divide by the gcd of the entries and make the first nonzero entry positive.
pub fn primitive_row(row: Vec<BigInt>) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for x in &row {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return row;
    }
    if let Some(first) = row.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            g = -g;
        }
    }
    row.into_iter().map(|x| x / &g).collect()
}

struct HnfResult {
    /// Echelon form with zero rows kept at the bottom.
    echelon: IntMat,
    /// Unimodular transform with `transform · input = echelon`.
    transform: IntMat,
    rank: usize,
}

fn hnf_in_place(m: &IntMat) -> HnfResult {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.row_vecs();
    let mut u: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| {
            (0..rows)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // Choose the row with the smallest nonzero entry in column c as
            // the pivot; the Euclidean reductions below shrink the others.
            let pivot = (r..rows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by_key(|&i| a[i][c].abs());
            let Some(i) = pivot else { break };
            a.swap(r, i);
            u.swap(r, i);
            let mut clean = true;
            for j in r + 1..rows {
                if a[j][c].is_zero() {
                    continue;
                }
                let q = a[j][c].div_floor(&a[r][c]);
                row_subtract(&mut a, j, r, &q);
                row_subtract(&mut u, j, r, &q);
                if !a[j][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            negate_row(&mut a, r);
            negate_row(&mut u, r);
        }
        for j in 0..r {
            let q = a[j][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                row_subtract(&mut a, j, r, &q);
                row_subtract(&mut u, j, r, &q);
            }
        }
        r += 1;
    }
    HnfResult {
        echelon: Mat::from_rows(a).expect("rectangular"),
        transform: Mat::from_rows(u).expect("rectangular"),
        rank: r,
    }
}

fn row_subtract(rows: &mut [Vec<BigInt>], j: usize, r: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (source, dest) = if r < j {
        let (a, b) = rows.split_at_mut(j);
        (&a[r], &mut b[0])
    } else {
        let (a, b) = rows.split_at_mut(r);
        (&b[0], &mut a[j])
    };
    for (d, s) in dest.iter_mut().zip(source.iter()) {
        *d -= q * s;
    }
}

fn negate_row(rows: &mut [Vec<BigInt>], r: usize) {
    for x in rows[r].iter_mut() {
        *x = -std::mem::take(x);
    }
}

/// Canonical row Hermite normal form of the row span; zero rows dropped.
pub fn hnf(m: &IntMat) -> IntMat {
    let res = hnf_in_place(m);
    Mat::from_rows(res.echelon.row_vecs().into_iter().take(res.rank).collect())
        .map(|h| if res.rank == 0 { Mat::empty(m.cols()) } else { h })
        .expect("rectangular")
}

/// Basis of the left kernel {x : x·m = 0}, returned in HNF. The transform
/// rows opposite the zero rows of the echelon form span it, so the result is
/// automatically saturated.
pub fn row_kernel(m: &IntMat) -> IntMat {
    let res = hnf_in_place(m);
    let rows: Vec<Vec<BigInt>> =
        res.transform.row_vecs().into_iter().skip(res.rank).collect();
    if rows.is_empty() {
        return Mat::empty(m.rows());
    }
    hnf(&Mat::from_rows(rows).expect("rectangular"))
}

/// Basis of the right kernel {x : m·x = 0}, as rows, in HNF.
pub fn right_kernel(m: &IntMat) -> IntMat {
    row_kernel(&m.transpose())
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IntMat) -> BigInt {
    assert_eq!(m.rows(), m.cols(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.row_vecs();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(i) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

pub fn is_unimodular(m: &IntMat) -> bool {
    m.rows() == m.cols() && det(m).abs().is_one()
}

/// Smith normal form: returns (diagonal, U, V) with U·m·V diagonal, each
/// diagonal entry nonnegative and dividing the next, U and V unimodular.
pub fn snf_with_transform(m: &IntMat) -> (Vec<BigInt>, IntMat, IntMat) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.row_vecs();
    let mut u: Vec<Vec<BigInt>> = identity_rows(rows);
    let mut v: Vec<Vec<BigInt>> = identity_rows(cols);
    let steps = rows.min(cols);
    for t in 0..steps {
        'outer: loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            col_swap(&mut a, t, bj);
            col_swap_square(&mut v, t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_subtract(&mut a, i, t, &q);
                row_subtract(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_subtract(&mut a, j, t, &q);
                col_subtract(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        let one = BigInt::from(-1);
                        row_subtract(&mut a, t, i, &one);
                        row_subtract(&mut u, t, i, &one);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        if a[t][t].is_negative() {
            negate_row(&mut a, t);
            negate_row(&mut u, t);
        }
    }
    let diag = (0..steps).map(|t| a[t][t].clone()).collect();
    (
        diag,
        Mat::from_rows(u).expect("rectangular"),
        Mat::from_rows(v).expect("rectangular"),
    )
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

fn col_swap(rows: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for row in rows.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn col_swap_square(rows: &mut [Vec<BigInt>], a: usize, b: usize) {
    col_swap(rows, a, b);
}

/// col_j -= q * col_t
fn col_subtract(rows: &mut [Vec<BigInt>], j: usize, t: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in rows.iter_mut() {
        let s = row[t].clone();
        row[j] -= q * s;
    }
}

/// A sublattice of ℤ^N in canonical Hermite normal form. Equality of values
/// is equality of lattices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    ambient: usize,
    basis: IntMat,
}

impl IntLattice {
    pub fn from_rows(m: &IntMat) -> Self {
        IntLattice { ambient: m.cols(), basis: hnf(m) }
    }

    pub fn zero(ambient: usize) -> Self {
        IntLattice { ambient, basis: Mat::empty(ambient) }
    }

    /// The full standard lattice ℤ^N.
    pub fn standard(ambient: usize) -> Self {
        IntLattice { ambient, basis: Mat::identity_int(ambient) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<BigInt>> {
        self.basis.row_vecs()
    }

    /// Membership by back-substitution along the echelon pivots.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut v = v.to_vec();
        for i in 0..self.basis.rows() {
            let p = (0..self.ambient)
                .find(|&c| !self.basis.at(i, c).is_zero())
                .expect("basis rows are nonzero");
            if v[p].is_zero() {
                continue;
            }
            let (q, rem) = v[p].div_rem(self.basis.at(i, p));
            if !rem.is_zero() {
                return false;
            }
            for c in 0..self.ambient {
                let t = &q * self.basis.at(i, c);
                v[c] -= t;
            }
        }
        v.iter().all(Zero::is_zero)
    }

    pub fn sum(&self, other: &IntLattice) -> Result<IntLattice> {
        if self.ambient != other.ambient {
            return Err(Error::Shape("lattice sum in different ambient spaces".into()));
        }
        Ok(IntLattice::from_rows(&self.basis.vstack(&other.basis)?))
    }

    pub fn intersect(&self, other: &IntLattice) -> Result<IntLattice> {
        if self.ambient != other.ambient {
            return Err(Error::Shape("lattice intersection in different ambient spaces".into()));
        }
        if self.rank() == 0 || other.rank() == 0 {
            return Ok(IntLattice::zero(self.ambient));
        }
        let stacked = self.basis.vstack(&other.basis)?;
        let relations = row_kernel(&stacked);
        let mut rows = Vec::new();
        for i in 0..relations.rows() {
            let mut v = vec![BigInt::zero(); self.ambient];
            for j in 0..self.basis.rows() {
                for c in 0..self.ambient {
                    let t = relations.at(i, j) * self.basis.at(j, c);
                    v[c] += t;
                }
            }
            rows.push(v);
        }
        if rows.is_empty() {
            return Ok(IntLattice::zero(self.ambient));
        }
        Ok(IntLattice::from_rows(&Mat::from_rows(rows)?))
    }

    /// (L ⊗ ℚ) ∩ ℤ^N, computed as a double integer kernel. The result has the
    /// same rank and a torsion-free quotient ℤ^N / saturation.
    pub fn saturate(&self) -> IntLattice {
        let ann = right_kernel(&self.basis);
        IntLattice { ambient: self.ambient, basis: right_kernel(&ann) }
    }

    pub fn is_saturated(&self) -> bool {
        self.saturate() == *self
    }
}

impl IntMat {
    pub fn identity_int(n: usize) -> IntMat {
        Mat::from_fn(n, n, |r, c| if r == c { BigInt::one() } else { BigInt::zero() })
    }
}
