//! Manufactured-solution verification of the Stokes discretization.
//!
//! The exact velocity is the curl of the stream function
//! `ψ = (x² + y² − 1/4)² (sin x + cos 2y + x y)`, so it is divergence free and
//! vanishes on the circle of radius 1/2. The pressure is
//! `p = sin 2x cos y + x y`. The discrete problem uses the exact traction on
//! the outer boundary, the exact velocity at obstacle nodes, and the matching
//! body force, so it is consistent on any polygonal annulus.

use super::element::TriangleGeometry;
use super::quadrature::TRI_DEG5;
use super::{eliminate_dofs, Factorization, RealStokesField, SparseSystem, StokesOperators};
use crate::error::Result;
use crate::geometry::{generate_annulus_mesh, BoundaryCurve, BoundaryTag, Point, TriangleMesh};

type Jet = [[f64; 4]; 4];

fn binom(n: usize, k: usize) -> f64 {
    match (n, k) {
        (_, 0) => 1.0,
        (n, k) if k == n => 1.0,
        (2, 1) => 2.0,
        (3, 1) | (3, 2) => 3.0,
        _ => unreachable!(),
    }
}

/// Closed-form solution and data of the verification problem.
#[derive(Clone, Copy, Debug)]
pub struct ManufacturedSolution {
    pub alpha: f64,
}

impl ManufacturedSolution {
    /// Partial derivatives `∂x^a ∂y^b ψ` for `a + b ≤ 3`.
    fn psi_jet(p: Point) -> Jet {
        let [x, y] = p;
        let q = x * x + y * y - 0.25;
        let mut qq = [[0.0; 4]; 4];
        qq[0][0] = q * q;
        qq[1][0] = 4.0 * x * q;
        qq[0][1] = 4.0 * y * q;
        qq[2][0] = 4.0 * q + 8.0 * x * x;
        qq[0][2] = 4.0 * q + 8.0 * y * y;
        qq[1][1] = 8.0 * x * y;
        qq[3][0] = 24.0 * x;
        qq[2][1] = 8.0 * y;
        qq[1][2] = 8.0 * x;
        qq[0][3] = 24.0 * y;
        let (sx, cx) = x.sin_cos();
        let (s2y, c2y) = (2.0 * y).sin_cos();
        let mut s = [[0.0; 4]; 4];
        s[0][0] = sx + c2y + x * y;
        s[1][0] = cx + y;
        s[0][1] = -2.0 * s2y + x;
        s[2][0] = -sx;
        s[0][2] = -4.0 * c2y;
        s[1][1] = 1.0;
        s[3][0] = -cx;
        s[0][3] = 8.0 * s2y;
        let mut out = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..(4 - a) {
                let mut v = 0.0;
                for i in 0..=a {
                    for j in 0..=b {
                        v += binom(a, i) * binom(b, j) * qq[i][j] * s[a - i][b - j];
                    }
                }
                out[a][b] = v;
            }
        }
        out
    }

    pub fn velocity(&self, p: Point) -> Point {
        let d = Self::psi_jet(p);
        [d[0][1], -d[1][0]]
    }

    /// `(Du)_ij = ∂_j u_i`.
    pub fn gradient(&self, p: Point) -> [[f64; 2]; 2] {
        let d = Self::psi_jet(p);
        [[d[1][1], d[0][2]], [-d[2][0], -d[1][1]]]
    }

    pub fn pressure(&self, p: Point) -> f64 {
        (2.0 * p[0]).sin() * p[1].cos() + p[0] * p[1]
    }

    fn pressure_gradient(&self, p: Point) -> Point {
        let [x, y] = p;
        [
            2.0 * (2.0 * x).cos() * y.cos() + y,
            -(2.0 * x).sin() * y.sin() + x,
        ]
    }

    /// `−α Δu + ∇p`.
    pub fn body_force(&self, p: Point) -> Point {
        let d = Self::psi_jet(p);
        let lap1 = d[2][1] + d[0][3];
        let lap2 = -(d[3][0] + d[1][2]);
        let gp = self.pressure_gradient(p);
        [-self.alpha * lap1 + gp[0], -self.alpha * lap2 + gp[1]]
    }

    /// Natural boundary quantity `α(Du)n − p n`.
    pub fn conormal(&self, p: Point, n: Point) -> Point {
        let g = self.gradient(p);
        let q = self.pressure(p);
        [
            self.alpha * (g[0][0] * n[0] + g[0][1] * n[1]) - q * n[0],
            self.alpha * (g[1][0] * n[0] + g[1][1] * n[1]) - q * n[1],
        ]
    }

    /// Symmetric-stress traction `α(Du + Duᵀ)n − p n`.
    pub fn traction(&self, p: Point, n: Point) -> Point {
        let g = self.gradient(p);
        let q = self.pressure(p);
        [
            self.alpha * ((2.0 * g[0][0]) * n[0] + (g[0][1] + g[1][0]) * n[1]) - q * n[0],
            self.alpha * ((g[1][0] + g[0][1]) * n[0] + (2.0 * g[1][1]) * n[1]) - q * n[1],
        ]
    }
}

/// Solves the verification problem on `mesh`.
pub fn solve_manufactured(
    mesh: &TriangleMesh,
    exact: &ManufacturedSolution,
) -> Result<RealStokesField> {
    let ops = StokesOperators::new(mesh);
    let d = &ops.dofs;
    let mut rhs = ops.volume_load(mesh, |x| exact.body_force(x));
    let traction = ops.boundary_load(mesh, BoundaryTag::Sigma, |x, n| exact.conormal(x, n));
    for (r, t) in rhs.iter_mut().zip(&traction) {
        *r += t;
    }
    let mut sys = SparseSystem {
        matrix: ops.saddle_matrix(exact.alpha, 0.0),
        rhs,
    };
    let pts = d.node_points(mesh);
    let mut fixed = Vec::new();
    let mut values = Vec::new();
    for &k in &d.gamma_nodes {
        let u = exact.velocity(pts[k]);
        for c in 0..2 {
            fixed.push(d.velocity(c, k));
            values.push(u[c]);
        }
    }
    eliminate_dofs(&mut sys, &fixed, &values);
    let x = Factorization::new(sys.matrix)?.solve(&sys.rhs)?;
    Ok(RealStokesField::from_solution(d, &x))
}

/// Discretization errors against the exact solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MmsErrors {
    pub velocity_l2: f64,
    /// `H¹` seminorm of the velocity error.
    pub velocity_h1: f64,
    pub pressure_l2: f64,
}

pub fn mms_errors(
    field: &RealStokesField,
    mesh: &TriangleMesh,
    exact: &ManufacturedSolution,
) -> MmsErrors {
    let dofs = super::DofMap::new(mesh);
    let (mut el2, mut eh1, mut ep) = (0.0, 0.0, 0.0);
    for t in 0..mesh.num_triangles() {
        let geo = TriangleGeometry::new(mesh.triangle_points(t));
        for q in &TRI_DEG5 {
            let w = q.weight * geo.area;
            let x = geo.map(q.bary);
            let u = field.velocity_at(mesh, &dofs, t, q.bary);
            let g = field.velocity_gradient(mesh, &dofs, &geo, t, q.bary);
            let p = field.pressure_at(mesh, t, q.bary);
            let (ue, ge, pe) = (exact.velocity(x), exact.gradient(x), exact.pressure(x));
            el2 += w * ((u[0] - ue[0]).powi(2) + (u[1] - ue[1]).powi(2));
            for i in 0..2 {
                for j in 0..2 {
                    eh1 += w * (g[i][j] - ge[i][j]).powi(2);
                }
            }
            ep += w * (p - pe).powi(2);
        }
    }
    MmsErrors {
        velocity_l2: el2.sqrt(),
        velocity_h1: eh1.sqrt(),
        pressure_l2: ep.sqrt(),
    }
}

/// Errors on one refinement level.
#[derive(Clone, Copy, Debug)]
pub struct MmsLevel {
    pub h: f64,
    pub triangles: usize,
    pub errors: MmsErrors,
}

/// Solves on a coarse annulus (unit circle minus the circle of radius 1/2)
/// and `refinements` uniform refinements of it, with new obstacle vertices
/// projected onto the circle.
pub fn convergence_study(alpha: f64, refinements: usize) -> Result<Vec<MmsLevel>> {
    let exact = ManufacturedSolution { alpha };
    let mut mesh = generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 24, 16, 0.25)?;
    let project = |p: Point| {
        let r = p[0].hypot(p[1]);
        [0.5 * p[0] / r, 0.5 * p[1] / r]
    };
    let mut out = Vec::new();
    for level in 0..=refinements {
        if level > 0 {
            mesh = mesh.refine_uniform(Some(&project))?;
        }
        let field = solve_manufactured(&mesh, &exact)?;
        out.push(MmsLevel {
            h: mesh.h_target,
            triangles: mesh.num_triangles(),
            errors: mms_errors(&field, &mesh, &exact),
        });
    }
    Ok(out)
}

/// Observed orders `log2(e_k / e_{k+1})` between successive levels, as
/// (velocity L², velocity H¹, pressure L²).
pub fn observed_orders(levels: &[MmsLevel]) -> Vec<[f64; 3]> {
    levels
        .windows(2)
        .map(|w| {
            let r = |a: f64, b: f64| (a / b).log2();
            let (a, b) = (w[0].errors, w[1].errors);
            [
                r(a.velocity_l2, b.velocity_l2),
                r(a.velocity_h1, b.velocity_h1),
                r(a.pressure_l2, b.pressure_l2),
            ]
        })
        .collect()
}
