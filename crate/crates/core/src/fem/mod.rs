//! Taylor-Hood (P2 velocity / P1 pressure) kernel for real and complex
//! Stokes systems on annular meshes.

mod assembly;
mod boundary;
mod dofmap;
pub mod element;
mod field;
pub mod mms;
pub mod quadrature;
mod solver;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};

pub(crate) use assembly::adjoint_rhs;
pub use assembly::{
    assemble_ccbm_adjoint, assemble_ccbm_state, assemble_mixed_neumann, eliminate_dofs,
    solve_mixed_neumann, StokesOperators,
};
pub use boundary::{boundary_integral_flux, boundary_stress_and_normal_derivative, BoundarySample};
pub use dofmap::DofMap;
pub use field::{interpolate_p2, ComplexStokesField, RealStokesField, StokesField};
pub use solver::{
    relative_residual, solve_sparse, solve_spd, Factorization, SparseMatrix, SparseSystem,
    RESIDUAL_TOL,
};

use crate::geometry::Point;

/// Field element of an assembled system: `f64` or `Complex64`.
pub trait Scalar:
    faer::traits::ComplexField
    + Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Mul<f64, Output = Self>
    + From<f64>
    + 'static
{
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
    fn conjugate(self) -> Self;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn conjugate(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
}

/// A vector-valued function on the outer unit circle, parametrized by angle.
pub trait BoundaryTrace: Sync {
    fn value(&self, theta: f64) -> Point;
}

impl<F: Fn(f64) -> Point + Sync> BoundaryTrace for F {
    fn value(&self, theta: f64) -> Point {
        self(theta)
    }
}

/// Angle of a point, in [0, 2π).
pub fn angle_of(p: Point) -> f64 {
    let t = p[1].atan2(p[0]);
    if t < 0.0 {
        t + std::f64::consts::TAU
    } else {
        t
    }
}
