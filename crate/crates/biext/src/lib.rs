//! Exact-arithmetic computations with 1-motives over ℂ through their Hodge
//! realizations.
//!
//! A 1-motive `[X → G]` is represented here by its Hodge realization: a free
//! ℤ-module together with a weight filtration over ℚ and a Hodge filtration
//! over a fixed imaginary quadratic field K = ℚ(ω), ω² = −d. On that data the
//! crate computes the groups of multilinear morphisms `Hom(M₁, …, Mₗ; M)`,
//! equivalently the groups of isomorphism classes of biextensions, as
//! explicit integer lattices, along with Weil pairings,
//! Cartier duals, mod-n and de Rham realizations, and the rank bookkeeping of
//! the tensor/quotient constructions that reduce the multilinear case to the
//! bilinear one.
//!
//! Everything is exact: scalars are rationals or elements of K, lattices are
//! kept in Hermite normal form, and every solver output can be re-checked by
//! the brute-force oracle in [`oracle`].

pub mod exact;
pub mod hodge;
pub mod homspace;
pub mod motives;
pub mod oracle;
pub mod realize;

pub mod guide;

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field context mismatch: d = {0} vs d = {1}")]
    ContextMismatch(u64, u64),
    #[error("{0} must be squarefree and positive")]
    BadFieldParameter(u64),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("degenerate elliptic modulus {0}: its ω-part vanishes, so Hodge symmetry fails at weight -1")]
    DegenerateModulus(String),
    #[error("period matrix is rank-deficient")]
    RankDeficientPeriods,
    #[error("negative Tate twist")]
    NegativeTwist,
    #[error("operation requires a Hodge structure of 1-motive type")]
    NotOneMotive,
    #[error("map does not lie in the computed morphism lattice")]
    NotInLattice,
    #[error("modulus must be at least 2")]
    BadModulus,
    #[error("instance too large for exhaustive enumeration: {0}")]
    SizeGuard(String),
    #[error("invalid biextension data: {0}")]
    BadBiextension(String),
    #[error("cannot parse scalar literal {0:?}")]
    BadLiteral(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
