//! Sobolev descent field and step rule. Both work with P1 vector fields on
//! the mesh vertices.

use super::gradient::ShapeGradientDensity;
use crate::error::{Error, Result};
use crate::fem::element::TriangleGeometry;
use crate::fem::{eliminate_dofs, solve_spd, SparseMatrix, SparseSystem};
use crate::geometry::{BoundaryTag, DeformationField, TriangleMesh};

fn p1_stiffness(mesh: &TriangleMesh) -> SparseMatrix<f64> {
    let mut k = SparseMatrix::new(mesh.num_vertices());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let geo = TriangleGeometry::new(mesh.triangle_points(t));
        let g = geo.grad_bary;
        for i in 0..3 {
            for j in 0..3 {
                k.push(
                    tri[i],
                    tri[j],
                    geo.area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]),
                );
            }
        }
    }
    k
}

fn p1_mass(mesh: &TriangleMesh) -> SparseMatrix<f64> {
    let mut m = SparseMatrix::new(mesh.num_vertices());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.triangle_area(t);
        for i in 0..3 {
            for j in 0..3 {
                m.push(tri[i], tri[j], area / 12.0 * if i == j { 2.0 } else { 1.0 });
            }
        }
    }
    m
}

/// `∫_Γ ∂_s φ_i ∂_s φ_j` for vertex hat functions.
fn gamma_tangential(mesh: &TriangleMesh) -> SparseMatrix<f64> {
    let mut k = SparseMatrix::new(mesh.num_vertices());
    for e in mesh.boundary_edges.iter().filter(|e| e.tag.is_gamma()) {
        let (_, len) = mesh.edge_normal(e);
        let [a, b] = e.vertices;
        k.push(a, a, 1.0 / len);
        k.push(b, b, 1.0 / len);
        k.push(a, b, -1.0 / len);
        k.push(b, a, -1.0 / len);
    }
    k
}

fn quad_form(m: &SparseMatrix<f64>, x: &[f64]) -> f64 {
    m.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
}

fn components(v: &DeformationField) -> [Vec<f64>; 2] {
    [
        v.values.iter().map(|p| p[0]).collect(),
        v.values.iter().map(|p| p[1]).collect(),
    ]
}

/// Solves `η ∫ ∇V:∇φ + (1−η) ∫_Γ ∂_sV·∂_sφ = −∫_Γ G n·φ` for a P1 vector
/// field with `V = 0` on the outer boundary.
pub fn descent_field(
    mesh: &TriangleMesh,
    grad: &ShapeGradientDensity,
    eta: f64,
) -> Result<DeformationField> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Argument(format!(
            "eta must lie in (0, 1], got {eta}"
        )));
    }
    let nv = mesh.num_vertices();
    let mut matrix = SparseMatrix::new(nv);
    for &(i, j, v) in &p1_stiffness(mesh).entries {
        matrix.push(i, j, eta * v);
    }
    if eta < 1.0 {
        for &(i, j, v) in &gamma_tangential(mesh).entries {
            matrix.push(i, j, (1.0 - eta) * v);
        }
    }
    let mut rhs = [vec![0.0; nv], vec![0.0; nv]];
    for s in &grad.samples {
        let [a, b] = mesh.boundary_edges[s.edge].vertices;
        for (v, hat) in [(a, 1.0 - s.s), (b, s.s)] {
            for c in 0..2 {
                rhs[c][v] -= s.weight * s.value * s.normal[c] * hat;
            }
        }
    }
    let mut fixed: Vec<usize> = mesh
        .edges_with_tag(BoundaryTag::Sigma)
        .flat_map(|e| e.vertices)
        .collect();
    fixed.sort_unstable();
    fixed.dedup();
    let zeros = vec![0.0; fixed.len()];
    let mut sol = Vec::with_capacity(2);
    for r in rhs {
        let mut sys = SparseSystem {
            matrix: matrix.clone(),
            rhs: r,
        };
        eliminate_dofs(&mut sys, &fixed, &zeros);
        sol.push(solve_spd(&sys.matrix, &sys.rhs)?);
    }
    let mut values: Vec<[f64; 2]> = (0..nv).map(|i| [sol[0][i], sol[1][i]]).collect();
    for &v in &fixed {
        values[v] = [0.0, 0.0];
    }
    Ok(DeformationField { values })
}

/// `η ‖∇V‖² + (1−η) ‖∂_s V‖²_Γ`, the energy that `−⟨G n, V⟩_Γ` equals for the
/// descent field.
pub fn descent_energy(mesh: &TriangleMesh, v: &DeformationField, eta: f64) -> f64 {
    let k = p1_stiffness(mesh);
    let kg = gamma_tangential(mesh);
    components(v)
        .iter()
        .map(|c| eta * quad_form(&k, c) + (1.0 - eta) * quad_form(&kg, c))
        .sum()
}

/// `‖V‖²_{L²} + ‖∇V‖²_{L²}`.
pub fn h1_norm_sq(mesh: &TriangleMesh, v: &DeformationField) -> f64 {
    let k = p1_stiffness(mesh);
    let m = p1_mass(mesh);
    components(v)
        .iter()
        .map(|c| quad_form(&k, c) + quad_form(&m, c))
        .sum()
}

/// `t = μ J / ‖V‖²_{H¹}`; zero when `J = 0` or `V ≡ 0`.
pub fn step_size(j: f64, v: &DeformationField, mu: f64, mesh: &TriangleMesh) -> f64 {
    if j == 0.0 || v.is_zero() {
        return 0.0;
    }
    mu * j / h1_norm_sq(mesh, v)
}
