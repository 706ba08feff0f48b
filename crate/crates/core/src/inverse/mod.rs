//! CCBM shape optimization: cost, adjoint, shape gradient on the obstacle
//! boundary, Sobolev descent and the reconstruction loop.

mod descent;
mod evaluate;
mod gradient;
mod oracle;
mod run;

pub use descent::{descent_energy, descent_field, h1_norm_sq, step_size};
pub use evaluate::{
    evaluate_cost, evaluate_ls_cost_diagnostic, evaluate_shape, sigma_misfit, solve_adjoint,
    solve_state, CostBreakdown, ShapeEvaluation, SigmaTrace,
};
pub use gradient::{directional_derivative, shape_gradient, GradientSample, ShapeGradientDensity};
pub use oracle::{fd_directional_derivative, random_smooth_fields};
pub use run::{
    run_reconstruction, write_history_csv, IterationRecord, Reconstruction, ReconstructionError,
    ReconstructionSettings, Termination, HISTORY_HEADER,
};

use crate::error::{Error, Result};

/// Parameters of the descent loop.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DescentConfig {
    /// Weight of the volume term in the descent-field inner product.
    pub eta: f64,
    /// Step scale.
    pub mu: f64,
    pub eps_j: f64,
    pub eps_t: f64,
    pub max_iters: usize,
    /// Remesh after every this many iterations; 0 disables remeshing.
    pub remesh_every: usize,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            eta: 0.5,
            mu: 0.5,
            eps_j: 1e-12,
            eps_t: 1e-12,
            max_iters: 300,
            remesh_every: 0,
        }
    }
}

impl DescentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::Config(format!(
                "eta must lie in (0, 1], got {}",
                self.eta
            )));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Config(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        if !(self.eps_j > 0.0) || !(self.eps_t > 0.0) {
            return Err(Error::Config("eps_j and eps_t must be positive".into()));
        }
        Ok(())
    }
}
