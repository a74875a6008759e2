//! The guide (book/src) as doc-tested modules: every Rust code fence in the
//! book compiles and runs under `cargo test --doc`, so the chapters cannot
//! drift from the library. Render the narrative with `mdbook serve book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/scalars.md")]
pub mod scalars {}

#[doc = include_str!("../../../book/src/hodge-structures.md")]
pub mod hodge_structures {}

#[doc = include_str!("../../../book/src/one-motives.md")]
pub mod one_motives {}

#[doc = include_str!("../../../book/src/morphisms.md")]
pub mod morphisms {}

#[doc = include_str!("../../../book/src/pairings.md")]
pub mod pairings {}

#[doc = include_str!("../../../book/src/realizations.md")]
pub mod realizations {}

#[doc = include_str!("../../../book/src/decomposition.md")]
pub mod decomposition {}

#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle_guide {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
