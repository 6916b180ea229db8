//! Twin-group reflection representations, the partial Brauer algebra, and
//! desk-scale Schur–Weyl duality checks.

pub mod cache;
pub mod cli;
pub mod density;
pub mod diagrams;
pub mod duality;
pub mod error;
pub mod hecke_twin;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod tensor_action;

pub use error::{Error, Result};
pub use linalg::{Matrix, Nullspace};
pub use scalars::{Complex64, Field, QContext, Rational, Scalar};
