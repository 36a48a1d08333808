//! Numerical kernel for generalized complex geometry in dimension 4.

pub mod chart;
pub mod cli;
pub mod conventions;
pub mod error;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod models;
pub mod multilinear;
pub mod spinor;
pub mod verify;

pub use error::{GcxError, Result};
pub use jet::Jet;
pub use multilinear::{clifford, pairing, Form, GcVec, GcVector, Multiform};
