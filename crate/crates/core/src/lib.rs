//! Reidemeister torsion of based chain complexes and of surface-group representations
//! with adjoint coefficients, with exact arithmetic throughout.

pub mod error;
pub mod field;
pub mod matrix;
pub mod chain;
pub mod random;
pub mod symplectic;
pub mod lie;
pub mod surface;
pub mod fixtures;
pub mod pairings;
pub mod json;

pub use error::{Error, Result};
pub use field::{Approx, FieldKind, Quad, Rational, Scalar};
pub use matrix::Matrix;
