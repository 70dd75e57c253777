//! Algebraic positivity of real square matrices.
//!
//! A real matrix `A` is algebraically positive (AP) when `p(A)` is entrywise
//! positive for some real polynomial `p`. The crate decides AP with two
//! independent oracles (a spectral test and a linear-programming certificate
//! search), implements the sign-pattern calculus used to reason about whole
//! pattern classes, and rebuilds the full classification of irreducible 3x3
//! sign patterns into RAP / AAP / DNA classes.
//!
//! Modules:
//! - [`mat`]: dense small-matrix numerics (characteristic polynomial, eigenpairs, Horner evaluation).
//! - [`ap`]: the two AP oracles and their reconciliation.
//! - [`signpat`]: sign patterns, sampling, the B-matrix rule, equivalence group, subclass relation.
//! - [`digraph`]: digraphs, strong connectivity, the 26 irreducible 3-vertex classes.
//! - [`classify3`]: 3x3 classification cascade backed by the shipped pattern table.
//! - [`atlas`]: exhaustive enumeration and report emission.

pub mod ap;
pub mod atlas;
pub mod classify3;
pub mod digraph;
mod error;
pub mod mat;
pub mod signpat;

pub use error::{Error, Result};
