//! Synthetic Cauchy data on the outer circle: a prescribed traction `g` and
//! the velocity trace `f` it produces around the true obstacle.

mod io;

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fem::{
    angle_of, boundary_integral_flux, solve_mixed_neumann, BoundaryTrace, StokesOperators,
};
use crate::geometry::{generate_annulus_mesh_with, BoundaryCurve, BoundaryTag, MeshOptions, Point};
use crate::rng;

pub use io::{read_cauchy_data, write_cauchy_data};

/// Prescribed traction on the outer circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GRule {
    Zero,
    /// `(sin θ, −cos θ)`
    Rotational,
    Constant(Point),
}

impl BoundaryTrace for GRule {
    fn value(&self, theta: f64) -> Point {
        match *self {
            GRule::Zero => [0.0, 0.0],
            GRule::Rotational => [theta.sin(), -theta.cos()],
            GRule::Constant(c) => c,
        }
    }
}

impl FromStr for GRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            ["zero"] => Ok(GRule::Zero),
            ["rotational"] => Ok(GRule::Rotational),
            ["constant", a, b] => {
                let p = |t: &str| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad number '{t}' in g rule")))
                };
                Ok(GRule::Constant([p(a)?, p(b)?]))
            }
            _ => Err(Error::Config(format!(
                "unknown g rule '{s}' (expected zero, rotational or 'constant gx gy')"
            ))),
        }
    }
}

impl fmt::Display for GRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GRule::Zero => write!(f, "zero"),
            GRule::Rotational => write!(f, "rotational"),
            GRule::Constant(c) => write!(f, "constant {} {}", c[0], c[1]),
        }
    }
}

/// Measured Dirichlet trace `f` sampled by angle, with the traction rule
/// that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CauchyData {
    pub g: GRule,
    /// Strictly increasing angles in [0, 2π).
    pub theta: Vec<f64>,
    pub values: Vec<Point>,
    pub delta: f64,
    pub seed: u64,
    /// Width of the mesh the data was computed on, when known.
    pub mesh_width: Option<f64>,
    /// `∮ f·n` of the noiseless finite element trace, when known.
    pub flux: Option<f64>,
}

impl CauchyData {
    pub fn new(g: GRule, theta: Vec<f64>, values: Vec<Point>) -> Result<Self> {
        let data = Self {
            g,
            theta,
            values,
            delta: 0.0,
            seed: 0,
            mesh_width: None,
            flux: None,
        };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.len() != self.values.len() {
            return Err(Error::Argument("angle and value counts differ".into()));
        }
        if self.theta.len() < 4 {
            return Err(Error::Argument("at least four samples are required".into()));
        }
        let ok_range = self.theta.iter().all(|t| (0.0..TAU).contains(t));
        let increasing = self.theta.windows(2).all(|w| w[1] > w[0]);
        if !ok_range || !increasing {
            return Err(Error::Argument(
                "sample angles must increase strictly within [0, 2π)".into(),
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Periodic trapezoid weights in θ (half the distance between neighbours).
    fn weights(&self) -> Vec<f64> {
        let n = self.theta.len();
        (0..n)
            .map(|k| {
                let prev = if k == 0 {
                    self.theta[n - 1] - TAU
                } else {
                    self.theta[k - 1]
                };
                let next = if k + 1 == n {
                    self.theta[0] + TAU
                } else {
                    self.theta[k + 1]
                };
                0.5 * (next - prev)
            })
            .collect()
    }

    /// `‖v‖_{L²(Σ)}` of sampled values by the periodic trapezoid rule.
    pub fn l2_norm_of(&self, v: &[Point]) -> f64 {
        self.weights()
            .iter()
            .zip(v)
            .map(|(w, p)| w * (p[0] * p[0] + p[1] * p[1]))
            .sum::<f64>()
            .sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_of(&self.values)
    }
}

impl BoundaryTrace for CauchyData {
    fn value(&self, theta: f64) -> Point {
        interpolate_trace(self, theta)
    }
}

/// Resolution of the data-generation mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataResolution {
    pub sigma_nodes: usize,
    pub gamma_nodes: usize,
    pub h: f64,
}

impl DataResolution {
    /// `factor` times finer than an inversion mesh with the given resolution.
    pub fn finer_than(sigma_nodes: usize, gamma_nodes: usize, h: f64, factor: usize) -> Self {
        Self {
            sigma_nodes: sigma_nodes * factor,
            gamma_nodes: gamma_nodes * factor,
            h: h / factor as f64,
        }
    }
}

/// Solves the forward traction problem around `truth` on a dedicated mesh and
/// samples the velocity at its outer vertices. Outer vertices are shifted by
/// half a spacing so they never coincide with those of an inversion mesh.
pub fn generate_measurement(
    truth: &[BoundaryCurve],
    g: GRule,
    alpha: f64,
    res: DataResolution,
) -> Result<CauchyData> {
    let mesh = generate_annulus_mesh_with(
        truth,
        MeshOptions {
            sigma_nodes: res.sigma_nodes,
            gamma_nodes: res.gamma_nodes,
            h_target: res.h,
            sigma_phase: 0.5,
        },
    )?;
    let ops = StokesOperators::new(&mesh);
    let (u, pinned) = solve_mixed_neumann(&mesh, &ops, alpha, &g)?;
    if pinned {
        log::info!("data generation needed a pressure pin");
    }
    let flux = boundary_integral_flux(&u, &mesh, &ops.dofs, BoundaryTag::Sigma)?;
    let n = ops.dofs.num_nodes();
    let mut samples: Vec<(f64, Point)> = mesh
        .sigma_polyline()
        .iter()
        .zip(mesh.loops()[0].1.iter())
        .map(|(&p, &v)| (angle_of(p), [u.velocity[v], u.velocity[n + v]]))
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut data = CauchyData::new(
        g,
        samples.iter().map(|s| s.0).collect(),
        samples.iter().map(|s| s.1).collect(),
    )?;
    data.mesh_width = Some(res.h);
    data.flux = Some(flux);
    Ok(data)
}

/// Adds relative Gaussian noise: `f + δ (‖f‖ / ‖ξ‖) ξ` with `ξ` standard normal
/// per sample component, so the relative `L²(Σ)` perturbation is exactly `δ`.
pub fn add_noise(data: &CauchyData, delta: f64, seed: u64) -> Result<CauchyData> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::Argument(format!(
            "noise level must be non-negative, got {delta}"
        )));
    }
    let mut out = data.clone();
    out.delta = delta;
    out.seed = seed;
    if delta == 0.0 {
        return Ok(out);
    }
    let mut rng = rng::stream(seed, rng::NOISE_STREAM);
    let xi: Vec<Point> = (0..data.len())
        .map(|_| {
            [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ]
        })
        .collect();
    let scale = delta * data.l2_norm() / data.l2_norm_of(&xi);
    for (v, x) in out.values.iter_mut().zip(&xi) {
        v[0] += scale * x[0];
        v[1] += scale * x[1];
    }
    Ok(out)
}

/// Periodic cubic interpolation in θ through the four nearest samples.
pub fn interpolate_trace(data: &CauchyData, theta: f64) -> Point {
    let th = theta.rem_euclid(TAU);
    let n = data.theta.len();
    // last sample with angle <= th, cyclically
    let k = match data.theta.partition_point(|&t| t <= th) {
        0 => n - 1,
        i => i - 1,
    };
    let mut nodes = [0.0; 4];
    let mut vals = [[0.0; 2]; 4];
    for (slot, off) in (-1i64..=2).enumerate() {
        let idx = k as i64 + off;
        let wrapped = idx.rem_euclid(n as i64) as usize;
        let turns = (idx - wrapped as i64).div_euclid(n as i64);
        nodes[slot] = data.theta[wrapped] + TAU * turns as f64;
        vals[slot] = data.values[wrapped];
    }
    // keep the query inside [nodes[1], nodes[2])
    let x = if th < nodes[1] { th + TAU } else { th };
    let mut out = [0.0; 2];
    for i in 0..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if j != i {
                l *= (x - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        out[0] += l * vals[i][0];
        out[1] += l * vals[i][1];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic(n: usize) -> CauchyData {
        let theta: Vec<f64> = (0..n).map(|k| TAU * (k as f64 + 0.3) / n as f64).collect();
        let values = theta
            .iter()
            .map(|&t| [t.cos() + 0.5 * (2.0 * t).sin(), (3.0 * t).cos()])
            .collect();
        CauchyData::new(GRule::Rotational, theta, values).unwrap()
    }

    #[test]
    fn g_rule_parsing() {
        assert_eq!("rotational".parse::<GRule>().unwrap(), GRule::Rotational);
        let c: GRule = "constant 1 -2".parse().unwrap();
        assert_eq!(c, GRule::Constant([1.0, -2.0]));
        assert_eq!(c.to_string().parse::<GRule>().unwrap(), c);
        assert!(matches!("spiral".parse::<GRule>(), Err(Error::Config(_))));
        let v = GRule::Rotational.value(0.0);
        assert_eq!(v, [0.0, -1.0]);
    }

    #[test]
    fn interpolation_reproduces_knots_and_is_periodic() {
        let d = analytic(40);
        for (t, v) in d.theta.iter().zip(&d.values) {
            assert_eq!(interpolate_trace(&d, *t), *v);
        }
        for &q in &[0.0, 0.01, 1.7, 6.2] {
            let (a, b) = (interpolate_trace(&d, q), interpolate_trace(&d, q + TAU));
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolation_error_is_fourth_order() {
        let err = |n: usize| {
            let d = analytic(n);
            (0..997)
                .map(|k| {
                    let t = TAU * k as f64 / 997.0;
                    let v = interpolate_trace(&d, t);
                    let e = [t.cos() + 0.5 * (2.0 * t).sin(), (3.0 * t).cos()];
                    (v[0] - e[0]).abs().max((v[1] - e[1]).abs())
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(64), err(128));
        assert!((e1 / e2).log2() > 3.7, "{e1} {e2}");
    }

    #[test]
    fn noise_scaling_and_determinism() {
        let d = analytic(100);
        assert_eq!(add_noise(&d, 0.0, 5).unwrap().values, d.values);
        let a = add_noise(&d, 0.15, 9).unwrap();
        let b = add_noise(&d, 0.15, 9).unwrap();
        assert_eq!(a, b);
        let diff: Vec<Point> = a
            .values
            .iter()
            .zip(&d.values)
            .map(|(p, q)| [p[0] - q[0], p[1] - q[1]])
            .collect();
        let rel = d.l2_norm_of(&diff) / d.l2_norm();
        assert!((rel - 0.15).abs() <= 1e-12);
        assert_ne!(add_noise(&d, 0.15, 10).unwrap().values, a.values);
        assert!(add_noise(&d, -0.1, 1).is_err());
    }

    #[test]
    fn rejects_unsorted_angles() {
        let r = CauchyData::new(GRule::Zero, vec![0.0, 2.0, 1.0, 3.0], vec![[0.0; 2]; 4]);
        assert!(r.is_err());
    }
}
