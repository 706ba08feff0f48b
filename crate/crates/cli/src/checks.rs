//! Verification runs: shape-gradient certification and manufactured-solution
//! convergence.

use std::fmt::Write as _;

use ccbm_core::fem::mms::{convergence_study, observed_orders, MmsLevel};
use ccbm_core::geometry::generate_annulus_mesh;
use ccbm_core::inverse::{
    directional_derivative, evaluate_shape, fd_directional_derivative, random_smooth_fields,
};

use crate::experiment::prepare_data;
use crate::{CliError, RunConfig};

/// Finite-difference steps, largest first; the last one is the certified step.
pub const FD_STEPS: [f64; 4] = [1e-3, 5e-4, 2.5e-4, 1e-4];
pub const FD_TOLERANCE: f64 = 0.02;
pub const FIELDS: usize = 5;
/// Allowed growth of the relative mismatch as `t` halves.
pub const RICHARDSON_SLACK: f64 = 1e-3;

pub const MMS_REFINEMENTS: usize = 3;
/// Minimum observed orders for velocity L², velocity H¹ and pressure L².
pub const MMS_MIN_ORDERS: [f64; 3] = [2.7, 1.8, 1.8];

#[derive(Clone, Debug)]
pub struct FieldCheck {
    /// `⟨G n, V⟩_Γ`.
    pub analytic: f64,
    /// Central differences at each of [`FD_STEPS`].
    pub fd: Vec<f64>,
}

impl FieldCheck {
    pub fn mismatch(&self, k: usize) -> f64 {
        (self.fd[k] - self.analytic).abs() / self.fd[k].abs().max(1e-12)
    }

    /// The FD values converge as `t` halves and the mismatch does not grow
    /// beyond [`RICHARDSON_SLACK`] over the first three steps.
    pub fn richardson_ok(&self) -> bool {
        let scale = self.fd[0].abs().max(1e-12);
        let (d1, d2) = (
            (self.fd[0] - self.fd[1]).abs(),
            (self.fd[1] - self.fd[2]).abs(),
        );
        let converging = d2 < d1 || d1 <= 1e-12 * scale;
        let settled = (0..2).all(|k| self.mismatch(k + 1) <= self.mismatch(k) + RICHARDSON_SLACK);
        converging && settled
    }
}

#[derive(Clone, Debug)]
pub struct GradientCheck {
    pub fields: Vec<FieldCheck>,
}

impl GradientCheck {
    /// Largest relative mismatch at the smallest step.
    pub fn max_mismatch(&self) -> f64 {
        let k = FD_STEPS.len() - 1;
        self.fields
            .iter()
            .map(|f| f.mismatch(k))
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_mismatch() <= FD_TOLERANCE && self.fields.iter().all(FieldCheck::richardson_ok)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("field,t,fd,analytic,rel_mismatch\n");
        for (i, f) in self.fields.iter().enumerate() {
            for (k, t) in FD_STEPS.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i},{t:e},{:e},{:e},{:e}",
                    f.fd[k],
                    f.analytic,
                    f.mismatch(k)
                );
            }
        }
        s
    }
}

/// Compares `⟨G n, V⟩_Γ` with central differences on the initial shape of
/// `cfg`, for [`FIELDS`] random fields drawn from the config seed.
pub fn gradient_check(cfg: &RunConfig) -> Result<GradientCheck, CliError> {
    let data = prepare_data(cfg)?;
    let mesh = generate_annulus_mesh(&cfg.initial, cfg.sigma_nodes, cfg.gamma_nodes, cfg.h)?;
    let ev = evaluate_shape(&mesh, cfg.alpha, &data, &data.g)?;
    let fields = random_smooth_fields(&mesh, cfg.seed, FIELDS)
        .iter()
        .map(|v| {
            let fd = FD_STEPS
                .iter()
                .map(|&t| fd_directional_derivative(&mesh, cfg.alpha, &data, &data.g, v, t))
                .collect::<ccbm_core::Result<Vec<f64>>>()?;
            Ok(FieldCheck {
                analytic: directional_derivative(&ev.gradient, &mesh, v),
                fd,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(GradientCheck { fields })
}

#[derive(Clone, Debug)]
pub struct MmsCheck {
    pub levels: Vec<MmsLevel>,
    /// Per level pair: velocity L², velocity H¹, pressure L².
    pub orders: Vec<[f64; 3]>,
}

impl MmsCheck {
    pub fn min_orders(&self) -> [f64; 3] {
        let mut m = [f64::INFINITY; 3];
        for o in &self.orders {
            for k in 0..3 {
                m[k] = m[k].min(o[k]);
            }
        }
        m
    }

    pub fn passed(&self) -> bool {
        let m = self.min_orders();
        (0..3).all(|k| m[k] >= MMS_MIN_ORDERS[k])
    }

    pub fn table(&self) -> String {
        let mut s = String::from("h,triangles,velocity_l2,velocity_h1,pressure_l2\n");
        for l in &self.levels {
            let e = l.errors;
            let _ = writeln!(
                s,
                "{:e},{},{:e},{:e},{:e}",
                l.h, l.triangles, e.velocity_l2, e.velocity_h1, e.pressure_l2
            );
        }
        s
    }
}

pub fn mms_check(alpha: f64) -> Result<MmsCheck, CliError> {
    let levels = convergence_study(alpha, MMS_REFINEMENTS)?;
    let orders = observed_orders(&levels);
    Ok(MmsCheck { levels, orders })
}
