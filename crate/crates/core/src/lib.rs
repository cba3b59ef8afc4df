//! Numerical machinery for Hilfer-type fractional evolution equations with
//! multi-point nonlocal conditions: special functions, discrete ψ-fractional
//! calculus on grids, resolvent operator families, a right-hand-side
//! expression language, the mild-solution Picard solver and independent
//! numerical certificates.

pub mod error;
pub mod linalg;
pub mod special;
pub mod grid;
pub mod calculus;
pub mod resolvent;

pub use error::{Error, Result};
pub use linalg::SquareMatrix;
pub use special::MLAccuracy;
