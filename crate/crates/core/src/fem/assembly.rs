//! Global operators and the three Stokes systems built from them.
//!
//! Every system has the saddle-point form
//!
//! ```text
//! [ αK + ρ M_Σ   -Bᵀ ] [u]   [F]
//! [ -B            0  ] [p] = [G]
//! ```
//!
//! with `K` the vector Laplacian stiffness, `M_Σ` the boundary mass on the
//! outer circle, `B_lj = ∫ λ_l div φ_j`, and `ρ` = `i` (state), `-i`
//! (adjoint) or `0` (forward Neumann problem). Obstacle velocity unknowns are
//! removed by identity rows and columns.

use num_complex::Complex64;

use super::element::{edge_p2_values, TriangleGeometry};
use super::quadrature::{EDGE_GAUSS3, TRI_DEG4, TRI_DEG5};
use super::solver::{Factorization, SparseMatrix, SparseSystem};
use super::{angle_of, BoundaryTrace, DofMap, RealStokesField, Scalar};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryTag, Point, TriangleMesh};

/// Real operators shared by every system on one mesh. All matrices use the
/// global unknown numbering of [`DofMap`].
#[derive(Clone, Debug)]
pub struct StokesOperators {
    pub dofs: DofMap,
    /// `∫ ∇φ_i : ∇φ_j` on velocity unknowns.
    pub stiffness: SparseMatrix<f64>,
    /// `∫_Σ φ_i · φ_j` on velocity unknowns.
    pub sigma_mass: SparseMatrix<f64>,
    /// `∫ φ_i · φ_j` on velocity unknowns.
    pub velocity_mass: SparseMatrix<f64>,
    /// `∫ λ_k λ_l` on pressure unknowns.
    pub pressure_mass: SparseMatrix<f64>,
    /// `(pressure row, velocity column, ∫ λ_l div φ_j)`.
    pub divergence: Vec<(usize, usize, f64)>,
}

impl StokesOperators {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let dofs = DofMap::new(mesh);
        let n = dofs.num_total();
        let mut stiffness = SparseMatrix::new(n);
        let mut velocity_mass = SparseMatrix::new(n);
        let mut pressure_mass = SparseMatrix::new(n);
        let mut divergence = Vec::with_capacity(mesh.num_triangles() * 36);
        for t in 0..mesh.num_triangles() {
            let geo = TriangleGeometry::new(mesh.triangle_points(t));
            let nodes = dofs.triangle_nodes(mesh, t);
            let verts = mesh.triangles[t];
            let mut k = [[0.0; 6]; 6];
            let mut m = [[0.0; 6]; 6];
            let mut b = [[[0.0; 6]; 2]; 3];
            for q in &TRI_DEG4 {
                let w = q.weight * geo.area;
                let phi = TriangleGeometry::p2_values(q.bary);
                let dphi = geo.p2_gradients(q.bary);
                for i in 0..6 {
                    for j in 0..6 {
                        k[i][j] += w * (dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1]);
                        m[i][j] += w * phi[i] * phi[j];
                    }
                    for l in 0..3 {
                        for c in 0..2 {
                            b[l][c][i] += w * q.bary[l] * dphi[i][c];
                        }
                    }
                }
            }
            for c in 0..2 {
                for i in 0..6 {
                    let gi = dofs.velocity(c, nodes[i]);
                    for j in 0..6 {
                        let gj = dofs.velocity(c, nodes[j]);
                        stiffness.push(gi, gj, k[i][j]);
                        velocity_mass.push(gi, gj, m[i][j]);
                    }
                }
            }
            for l in 0..3 {
                let row = dofs.pressure(verts[l]);
                for c in 0..2 {
                    for j in 0..6 {
                        divergence.push((row, dofs.velocity(c, nodes[j]), b[l][c][j]));
                    }
                }
                for j in 0..3 {
                    // exact P1 mass: area/12 (1 + δ_lj)
                    let v = geo.area / 12.0 * if l == j { 2.0 } else { 1.0 };
                    pressure_mass.push(row, dofs.pressure(verts[j]), v);
                }
            }
        }
        let mut sigma_mass = SparseMatrix::new(n);
        for (idx, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != BoundaryTag::Sigma {
                continue;
            }
            let (_, len) = mesh.edge_normal(e);
            let nodes = [
                e.vertices[0],
                e.vertices[1],
                dofs.boundary_edge_midnodes[idx],
            ];
            let mut m = [[0.0; 3]; 3];
            for &(s, w) in &EDGE_GAUSS3 {
                let phi = edge_p2_values(s);
                for i in 0..3 {
                    for j in 0..3 {
                        m[i][j] += w * len * phi[i] * phi[j];
                    }
                }
            }
            for c in 0..2 {
                for i in 0..3 {
                    for j in 0..3 {
                        sigma_mass.push(
                            dofs.velocity(c, nodes[i]),
                            dofs.velocity(c, nodes[j]),
                            m[i][j],
                        );
                    }
                }
            }
        }
        Self {
            dofs,
            stiffness,
            sigma_mass,
            velocity_mass,
            pressure_mass,
            divergence,
        }
    }

    pub fn num_total(&self) -> usize {
        self.dofs.num_total()
    }

    /// Saddle-point matrix with Robin coefficient `robin`, before elimination.
    pub fn saddle_matrix<T: Scalar>(&self, alpha: f64, robin: T) -> SparseMatrix<T> {
        let n = self.num_total();
        let mut a = SparseMatrix::new(n);
        a.entries.reserve(
            self.stiffness.entries.len()
                + self.sigma_mass.entries.len()
                + 2 * self.divergence.len(),
        );
        for &(i, j, v) in &self.stiffness.entries {
            a.push(i, j, T::from(alpha * v));
        }
        if robin != T::zero() {
            for &(i, j, v) in &self.sigma_mass.entries {
                a.push(i, j, robin * v);
            }
        }
        for &(l, j, v) in &self.divergence {
            a.push(l, j, T::from(-v));
            a.push(j, l, T::from(-v));
        }
        a
    }

    /// `∫_Σ h(x, n) · φ` for every velocity test function, by 3-point Gauss
    /// on each outer edge.
    pub fn sigma_load<T: Scalar>(
        &self,
        mesh: &TriangleMesh,
        h: impl Fn(Point, Point) -> [T; 2],
    ) -> Vec<T> {
        self.boundary_load(mesh, BoundaryTag::Sigma, h)
    }

    pub fn boundary_load<T: Scalar>(
        &self,
        mesh: &TriangleMesh,
        tag: BoundaryTag,
        h: impl Fn(Point, Point) -> [T; 2],
    ) -> Vec<T> {
        let mut rhs = vec![T::zero(); self.num_total()];
        for (idx, e) in mesh.boundary_edges.iter().enumerate() {
            if e.tag != tag {
                continue;
            }
            let (normal, len) = mesh.edge_normal(e);
            let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
            let nodes = [
                e.vertices[0],
                e.vertices[1],
                self.dofs.boundary_edge_midnodes[idx],
            ];
            for &(s, w) in &EDGE_GAUSS3 {
                let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let val = h(x, normal);
                let phi = edge_p2_values(s);
                for i in 0..3 {
                    for c in 0..2 {
                        rhs[self.dofs.velocity(c, nodes[i])] += val[c] * (w * len * phi[i]);
                    }
                }
            }
        }
        rhs
    }

    /// `∫_Ω f · φ` with the degree-5 rule.
    pub fn volume_load(&self, mesh: &TriangleMesh, f: impl Fn(Point) -> Point) -> Vec<f64> {
        let mut rhs = vec![0.0; self.num_total()];
        for t in 0..mesh.num_triangles() {
            let geo = TriangleGeometry::new(mesh.triangle_points(t));
            let nodes = self.dofs.triangle_nodes(mesh, t);
            for q in &TRI_DEG5 {
                let w = q.weight * geo.area;
                let val = f(geo.map(q.bary));
                let phi = TriangleGeometry::p2_values(q.bary);
                for i in 0..6 {
                    for c in 0..2 {
                        rhs[self.dofs.velocity(c, nodes[i])] += w * phi[i] * val[c];
                    }
                }
            }
        }
        rhs
    }
}

/// Replaces the equations of `dofs` by `x_d = values[d]`, keeping symmetry:
/// the matching columns move to the right-hand side.
pub fn eliminate_dofs<T: Scalar>(system: &mut SparseSystem<T>, dofs: &[usize], values: &[T]) {
    let n = system.matrix.n;
    let mut fixed: Vec<Option<T>> = vec![None; n];
    for (&d, &v) in dofs.iter().zip(values) {
        fixed[d] = Some(v);
    }
    let rhs = &mut system.rhs;
    system.matrix.entries.retain(|&(i, j, v)| {
        if fixed[i].is_some() {
            return false;
        }
        if let Some(g) = fixed[j] {
            rhs[i] -= v * g;
            return false;
        }
        true
    });
    for (&d, &v) in dofs.iter().zip(values) {
        system.matrix.push(d, d, T::one());
        system.rhs[d] = v;
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Argument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

fn eliminate_gamma<T: Scalar>(ops: &StokesOperators, system: &mut SparseSystem<T>) {
    let fixed = ops.dofs.constrained_velocity_dofs();
    let zeros = vec![T::zero(); fixed.len()];
    eliminate_dofs(system, &fixed, &zeros);
}

/// Complex CCBM state system with Robin term `+i ∫_Σ u·φ` and load
/// `∫_Σ (g + i f)·φ`.
pub fn assemble_ccbm_state(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    f: &dyn BoundaryTrace,
    g: &dyn BoundaryTrace,
) -> Result<SparseSystem<Complex64>> {
    check_alpha(alpha)?;
    ops.dofs.check(mesh)?;
    let matrix = ops.saddle_matrix(alpha, Complex64::i());
    let rhs = ops.sigma_load(mesh, |x, _| {
        let th = angle_of(x);
        let (fv, gv) = (f.value(th), g.value(th));
        [Complex64::new(gv[0], fv[0]), Complex64::new(gv[1], fv[1])]
    });
    let mut sys = SparseSystem { matrix, rhs };
    eliminate_gamma(ops, &mut sys);
    Ok(sys)
}

/// Right-hand side of the adjoint system: `[M u_i ; M_p p_i]`, zero on
/// obstacle rows.
pub(crate) fn adjoint_rhs(ops: &StokesOperators, u_i: &[f64], p_i: &[f64]) -> Result<Vec<f64>> {
    let d = &ops.dofs;
    if u_i.len() != d.num_velocity() || p_i.len() != d.num_pressure() {
        return Err(Error::Argument(format!(
            "adjoint sources have {} / {} coefficients, expected {} / {}",
            u_i.len(),
            p_i.len(),
            d.num_velocity(),
            d.num_pressure()
        )));
    }
    let mut x = u_i.to_vec();
    x.extend_from_slice(p_i);
    let mut rhs = ops.velocity_mass.matvec(&x);
    let rp = ops.pressure_mass.matvec(&x);
    for i in d.num_velocity()..d.num_total() {
        rhs[i] = rp[i];
    }
    for k in d.constrained_velocity_dofs() {
        rhs[k] = 0.0;
    }
    Ok(rhs)
}

/// Complex adjoint system: Robin term `-i ∫_Σ v·ψ`, load `∫ u_i·ψ`, and
/// divergence constraint `-div v = p_i`.
pub fn assemble_ccbm_adjoint(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    u_i: &[f64],
    p_i: &[f64],
) -> Result<SparseSystem<Complex64>> {
    check_alpha(alpha)?;
    ops.dofs.check(mesh)?;
    let rhs = adjoint_rhs(ops, u_i, p_i)?;
    let matrix = ops.saddle_matrix(alpha, -Complex64::i());
    let mut sys = SparseSystem {
        matrix,
        rhs: rhs.iter().map(|&r| Complex64::from(r)).collect(),
    };
    eliminate_gamma(ops, &mut sys);
    Ok(sys)
}

/// Real forward problem: Stokes with traction `g` on Σ and no-slip on Γ.
pub fn assemble_mixed_neumann(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    g: &dyn BoundaryTrace,
) -> Result<SparseSystem<f64>> {
    check_alpha(alpha)?;
    ops.dofs.check(mesh)?;
    let matrix = ops.saddle_matrix(alpha, 0.0);
    let rhs = ops.sigma_load(mesh, |x, _| g.value(angle_of(x)));
    let mut sys = SparseSystem { matrix, rhs };
    eliminate_gamma(ops, &mut sys);
    Ok(sys)
}

/// Solves the forward Neumann problem. If the direct solve fails, one
/// pressure unknown is pinned to zero and the solve retried; the returned flag
/// reports whether that happened.
pub fn solve_mixed_neumann(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    g: &dyn BoundaryTrace,
) -> Result<(RealStokesField, bool)> {
    let sys = assemble_mixed_neumann(mesh, ops, alpha, g)?;
    match Factorization::new(sys.matrix.clone()).and_then(|lu| lu.solve(&sys.rhs)) {
        Ok(x) => Ok((RealStokesField::from_solution(&ops.dofs, &x), false)),
        Err(Error::Solver(msg)) => {
            log::warn!("forward solve failed ({msg}); pinning pressure at vertex 0");
            let mut pinned = sys;
            eliminate_dofs(&mut pinned, &[ops.dofs.pressure(0)], &[0.0]);
            let x = Factorization::new(pinned.matrix)?.solve(&pinned.rhs)?;
            Ok((RealStokesField::from_solution(&ops.dofs, &x), true))
        }
        Err(e) => Err(e),
    }
}
