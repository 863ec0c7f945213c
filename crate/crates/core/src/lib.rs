//! Finite-dimensional real and complex Jordan triple systems.
//!
//! A [`TripleSystem`] is a real-trilinear product on `ℝⁿ` stored as a dense
//! structure tensor. Complex and quaternionic factors are realified; complex
//! ones carry their multiplication-by-`i` map so complex linearity can be
//! tested rather than assumed.

pub mod derivations;
pub mod error;
pub mod factors;
pub mod numerics;
pub mod report;
pub mod repro;
pub mod sampling;
pub mod structure;
pub mod triple;

pub use derivations::{derivation_space, DerivationKind, DerivationSpace};
pub use error::{Result, TripleError};
pub use factors::{build_factor, complexify, direct_sum, extend_map_complex, FactorSpec};
pub use report::{Report, Status, Witness};
pub use triple::{Element, LinearMap, NormKind, ProductKind, TripleSystem};
