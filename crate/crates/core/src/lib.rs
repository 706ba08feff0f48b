//! Shape reconstruction of obstacles immersed in 2D Stokes flow.

pub mod data;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod inverse;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
