//! Equilateral sets in finite-dimensional normed spaces.
//!
//! The crate is organised around the objects that show up when one tries to
//! build, certify or bound equilateral configurations:
//!
//! * [`norms`] evaluates every norm family used here and synthesises smooth
//!   strictly convex norms through prescribed boundary points.
//! * [`codes`] builds greedy almost-orthogonal sign codes.
//! * [`cayley_menger`] decides Euclidean embeddability of finite metrics and
//!   constructs the embedding.
//! * [`constructions`] contains the explicit equilateral builders.
//! * [`bounds_lab`] houses the known-bounds ledger and the rank, rounding and
//!   approximation machinery used by upper-bound arguments.
//! * [`search`] verifies, extends and searches for equilateral sets.
//!
//! Everything is a pure function of its inputs; randomised procedures take an
//! explicit seed.

pub mod bounds_lab;
pub mod cayley_menger;
pub mod codes;
pub mod constructions;
pub mod json;
pub mod norms;
pub mod search;

mod error;
mod linalg;
mod lp;

pub use error::Error;
pub use norms::{Exponent, NormSpec};

pub type Result<T, E = Error> = std::result::Result<T, E>;
