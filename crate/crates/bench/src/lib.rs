//! Shared fixtures for the criterion benchmarks.

use std::f64::consts::TAU;

use ccbm_core::data::{generate_measurement, CauchyData, DataResolution, GRule};
use ccbm_core::geometry::{generate_annulus_mesh, BoundaryCurve, TriangleMesh};
use ccbm_core::Result;

pub const SIGMA_NODES: usize = 100;
pub const GAMMA_NODES: usize = 70;

pub fn mesh_width() -> f64 {
    TAU / SIGMA_NODES as f64
}

/// The inversion mesh around an initial circle of radius `r`.
pub fn circle_mesh(r: f64) -> Result<TriangleMesh> {
    generate_annulus_mesh(
        &[BoundaryCurve::circle([0.0, 0.0], r)],
        SIGMA_NODES,
        GAMMA_NODES,
        mesh_width(),
    )
}

/// Synthetic data for the radius-0.5 circle on a 2x finer mesh.
pub fn circle_data() -> Result<CauchyData> {
    generate_measurement(
        &[BoundaryCurve::circle([0.0, 0.0], 0.5)],
        GRule::Rotational,
        1.0,
        DataResolution::finer_than(SIGMA_NODES, GAMMA_NODES, mesh_width(), 2),
    )
}
