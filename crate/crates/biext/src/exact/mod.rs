//! Exact scalars and integral/rational linear algebra.
//!
//! Everything downstream reduces to the four workhorses here: Hermite normal
//! form, rational kernels, lattice saturation and the constrained integer
//! kernel of [`solve_integer_constraints`].

mod lattice;
mod mat;
mod scalar;
mod solver;

pub use lattice::{
    clear_denominators, det, hnf, int_mat, int_to_rat, is_unimodular, mul_int, primitive_row,
    right_kernel, row_kernel, snf_with_transform, IntLattice, IntMat,
};
pub use mat::{
    kernel, rank, reduce_against, row_span, rref, solve, span_contains, span_intersect, span_sum,
    Mat, MatK, MatQ,
};
pub use scalar::{parse_rat, rat, FieldContext, FieldScalar, KScalar, Rat};
pub use solver::{rational_kernel, solve_integer_constraints};
