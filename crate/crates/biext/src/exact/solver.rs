//! The constrained integer kernel: the saturated lattice of integer vectors
//! killed by a family of K-linear functionals.
//!
//! Each K-constraint splits into its 1- and ω-components, giving two rational
//! functionals; after clearing denominators the solution lattice is an
//! integer kernel, which the Hermite transform produces already saturated.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use crate::exact::lattice::{clear_denominators, right_kernel, IntLattice};
use crate::exact::mat::{kernel, Mat, MatQ};
use crate::exact::scalar::KScalar;
use crate::{Error, Result};

/// ℚ-basis (as rows) of {v : m·v = 0}; every returned row is killed exactly.
pub fn rational_kernel(m: &MatQ) -> MatQ {
    kernel(&(), m)
}

/// All x ∈ ℤ^ambient with c·x = 0 for every constraint row c over K.
/// An empty constraint list returns the full lattice ℤ^ambient.
pub fn solve_integer_constraints(
    constraints: &[Vec<KScalar>],
    ambient: usize,
) -> Result<IntLattice> {
    for row in constraints {
        if row.len() != ambient {
            return Err(Error::Shape(format!(
                "constraint of length {} on {} unknowns",
                row.len(),
                ambient
            )));
        }
    }
    if constraints.is_empty() {
        return Ok(IntLattice::standard(ambient));
    }
    let mut rational_rows: Vec<Vec<_>> = Vec::with_capacity(2 * constraints.len());
    for row in constraints {
        rational_rows.push(row.iter().map(|x| x.re.clone()).collect());
        rational_rows.push(row.iter().map(|x| x.im.clone()).collect());
    }
    let stacked = clear_denominators(&Mat::from_rows(rational_rows)?);
    // Dedupe primitive rows; overlapping filtration steps generate many
    // repeated functionals.
    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut rows = Vec::new();
    for row in stacked.row_vecs() {
        if row.iter().all(num_traits::Zero::is_zero) {
            continue;
        }
        if seen.insert(row.clone()) {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(IntLattice::standard(ambient));
    }
    let d = Mat::from_rows(rows)?;
    Ok(IntLattice::from_rows(&right_kernel(&d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::lattice::int_mat;
    use crate::exact::scalar::{rat, KScalar};

    #[test]
    fn irrational_slope_forces_zero() {
        // x1 - w*x2 = 0 has no nonzero integer solutions since w is not rational
        let c = vec![KScalar::one(), -&KScalar::omega()];
        let l = solve_integer_constraints(&[c], 2).unwrap();
        assert_eq!(l.rank(), 0);
    }

    #[test]
    fn rational_slope_gives_a_line() {
        // x1 - (1/2) x2 = 0 -> basis (1, 2)
        let c = vec![KScalar::one(), KScalar::from_rat(rat(-1, 2))];
        let l = solve_integer_constraints(&[c], 2).unwrap();
        assert_eq!(l, IntLattice::from_rows(&int_mat(vec![vec![1, 2]])));
    }

    #[test]
    fn no_constraints_is_everything() {
        let l = solve_integer_constraints(&[], 3).unwrap();
        assert_eq!(l, IntLattice::standard(3));
    }

    #[test]
    fn solutions_are_saturated_and_exact() {
        let c1 = vec![
            KScalar::from_int(2),
            KScalar::from_int(-2),
            KScalar::from_int(0),
        ];
        let c2 = vec![
            KScalar::from_rat(rat(1, 3)),
            KScalar::from_rat(rat(1, 3)),
            KScalar::from_rat(rat(-2, 3)),
        ];
        let l = solve_integer_constraints(&[c1.clone(), c2.clone()], 3).unwrap();
        assert!(l.is_saturated());
        for row in l.basis_rows() {
            for c in [&c1, &c2] {
                let mut acc = KScalar::zero();
                for (ci, xi) in c.iter().zip(row.iter()) {
                    let term = KScalar::new(&ci.re * xi, &ci.im * xi);
                    acc = &acc + &term;
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn box_completeness_small() {
        // for every vector with entries in [-2,2] satisfying the constraints,
        // membership in the solution lattice must hold
        let c = vec![
            KScalar::from_int(1),
            KScalar::from_int(1),
            KScalar::from_int(-1),
        ];
        let l = solve_integer_constraints(std::slice::from_ref(&c), 3).unwrap();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                for z in -2i64..=2 {
                    let satisfied = x + y - z == 0;
                    let v = vec![BigInt::from(x), BigInt::from(y), BigInt::from(z)];
                    assert_eq!(l.contains(&v), satisfied, "({x},{y},{z})");
                }
            }
        }
    }
}
