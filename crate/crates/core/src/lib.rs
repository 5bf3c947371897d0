//! Numerical tools for entanglement monogamy and polygamy on small qubit
//! systems: dense linear algebra, state builders, correlation measures,
//! the bound families, and a batch harness behind the `qcorr` binary.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod states;

pub use error::{Error, Result};
