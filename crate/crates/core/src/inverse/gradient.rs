use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fem::element::edge_p2_values;
use crate::fem::quadrature::EDGE_GAUSS3;
use crate::fem::{
    boundary_stress_and_normal_derivative, solve_spd, ComplexStokesField, DofMap, SparseMatrix,
    StokesOperators,
};
use crate::geometry::{BoundaryTag, DeformationField, Point, TriangleMesh};

/// Shape gradient density at one obstacle-edge quadrature point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradientSample {
    /// Index into `mesh.boundary_edges`.
    pub edge: usize,
    /// Position along the edge in [0, 1].
    pub s: f64,
    pub point: Point,
    /// Quadrature weight including the edge length.
    pub weight: f64,
    pub normal: Point,
    pub value: f64,
}

/// `G` on the obstacle boundary, so that `dJ[V] = ∫_Γ G n·V`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeGradientDensity {
    pub samples: Vec<GradientSample>,
    /// `(vertex, value)` for every obstacle vertex: the quadrature values
    /// averaged with the hat-function weights of the adjacent edges.
    pub nodal: Vec<(usize, f64)>,
}

impl ShapeGradientDensity {
    /// `‖G n‖_{L²(Γ)}`.
    pub fn l2_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * s.value * s.value)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.value.abs())
            .fold(0.0, f64::max)
    }
}

fn nodal_average(mesh: &TriangleMesh, samples: &[GradientSample]) -> Vec<(usize, f64)> {
    let mut num = std::collections::BTreeMap::<usize, (f64, f64)>::new();
    for s in samples {
        let [a, b] = mesh.boundary_edges[s.edge].vertices;
        for (v, hat) in [(a, 1.0 - s.s), (b, s.s)] {
            let e = num.entry(v).or_insert((0.0, 0.0));
            e.0 += s.weight * hat * s.value;
            e.1 += s.weight * hat;
        }
    }
    num.into_iter().map(|(v, (a, w))| (v, a / w)).collect()
}

/// `⟨G n, V⟩_Γ` with `V` interpolated linearly along each edge.
pub fn directional_derivative(
    grad: &ShapeGradientDensity,
    mesh: &TriangleMesh,
    field: &DeformationField,
) -> f64 {
    grad.samples
        .iter()
        .map(|s| {
            let [a, b] = mesh.boundary_edges[s.edge].vertices;
            let (va, vb) = (field.values[a], field.values[b]);
            let v = [
                (1.0 - s.s) * va[0] + s.s * vb[0],
                (1.0 - s.s) * va[1] + s.s * vb[1],
            ];
            s.weight * s.value * (s.normal[0] * v[0] + s.normal[1] * v[1])
        })
        .sum()
}

/// Obstacle traction recovered from the residual of the unconstrained
/// equations at obstacle velocity unknowns: `r_k = ∫_Γ t·φ_k`, solved
/// against the P2 mass matrix of Γ. Returns `t` per P2 node (zero off Γ).
fn recover_traction(
    mesh: &TriangleMesh,
    dofs: &DofMap,
    residual: &[Complex64],
) -> Result<Vec<[Complex64; 2]>> {
    let nodes = &dofs.gamma_nodes;
    let mut local = vec![usize::MAX; dofs.num_nodes()];
    for (i, &k) in nodes.iter().enumerate() {
        local[k] = i;
    }
    let mut mass = SparseMatrix::new(nodes.len());
    const M: [[f64; 3]; 3] = [[4.0, -1.0, 2.0], [-1.0, 4.0, 2.0], [2.0, 2.0, 16.0]];
    for (idx, e) in mesh.boundary_edges.iter().enumerate() {
        if e.tag == BoundaryTag::Sigma {
            continue;
        }
        let (_, len) = mesh.edge_normal(e);
        let en = [
            e.vertices[0],
            e.vertices[1],
            dofs.boundary_edge_midnodes[idx],
        ];
        for i in 0..3 {
            for j in 0..3 {
                mass.push(local[en[i]], local[en[j]], len / 30.0 * M[i][j]);
            }
        }
    }
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; dofs.num_nodes()];
    for c in 0..2 {
        let re: Vec<f64> = nodes
            .iter()
            .map(|&k| residual[dofs.velocity(c, k)].re)
            .collect();
        let im: Vec<f64> = nodes
            .iter()
            .map(|&k| residual[dofs.velocity(c, k)].im)
            .collect();
        let (xr, xi) = (solve_spd(&mass, &re)?, solve_spd(&mass, &im)?);
        for (i, &k) in nodes.iter().enumerate() {
            out[k][c] = Complex64::new(xr[i], xi[i]);
        }
    }
    Ok(out)
}

/// `G = Im{ conj(σ(v,q)n) · ∂_n u } + ½ p_i²` at the 3-point Gauss nodes of
/// every obstacle edge.
///
/// The tractions of state and adjoint are recovered variationally from the
/// residuals of their unconstrained equations at the obstacle unknowns. Since
/// both velocities vanish on Γ and are divergence free, `∂_n u` is tangential
/// and equals `(σ(u,p)n · τ) τ / α`, so only tangential tractions enter the
/// coupling term. `p_i` is the trace from the adjacent triangle.
pub fn shape_gradient(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    state: &ComplexStokesField,
    adjoint: &ComplexStokesField,
) -> Result<ShapeGradientDensity> {
    let dofs = &ops.dofs;
    if state.velocity.len() != dofs.num_velocity() || adjoint.velocity.len() != dofs.num_velocity()
    {
        return Err(Error::Argument(
            "state and adjoint must live on the same mesh".into(),
        ));
    }
    let a = ops.saddle_matrix(alpha, Complex64::i());
    let ru = a.matvec(&state.to_solution());
    let a_conj = SparseMatrix {
        n: a.n,
        entries: a
            .entries
            .iter()
            .map(|&(i, j, v)| (i, j, v.conj()))
            .collect(),
    };
    let mut rv = a_conj.matvec(&adjoint.to_solution());
    let im = state.imag_part();
    for (r, s) in rv
        .iter_mut()
        .zip(adjoint_source(ops, &im.velocity, &im.pressure))
    {
        *r -= s;
    }
    let tu = recover_traction(mesh, dofs, &ru)?;
    let tv = recover_traction(mesh, dofs, &rv)?;
    let traces = boundary_stress_and_normal_derivative(state, mesh, dofs, alpha, None)?;
    let samples: Vec<GradientSample> = traces
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let e = &mesh.boundary_edges[u.edge];
            let s = EDGE_GAUSS3[k % 3].0;
            let phi = edge_p2_values(s);
            let en = [
                e.vertices[0],
                e.vertices[1],
                dofs.boundary_edge_midnodes[u.edge],
            ];
            let tau = [-u.normal[1], u.normal[0]];
            let tangential = |t: &[[Complex64; 2]]| -> Complex64 {
                (0..3)
                    .map(|i| (t[en[i]][0] * tau[0] + t[en[i]][1] * tau[1]) * phi[i])
                    .sum()
            };
            let coupling = tangential(&tv).conj() * tangential(&tu) / alpha;
            let p_i = u.pressure.im;
            GradientSample {
                edge: u.edge,
                s,
                point: u.point,
                weight: u.weight,
                normal: u.normal,
                value: coupling.im + 0.5 * p_i * p_i,
            }
        })
        .collect();
    Ok(ShapeGradientDensity {
        nodal: nodal_average(mesh, &samples),
        samples,
    })
}

/// Adjoint load `[M u_i ; M_p p_i]` on every row, obstacle rows included.
fn adjoint_source(ops: &StokesOperators, u_i: &[f64], p_i: &[f64]) -> Vec<Complex64> {
    let d = &ops.dofs;
    let mut x = u_i.to_vec();
    x.extend_from_slice(p_i);
    let mut rhs = ops.velocity_mass.matvec(&x);
    let rp = ops.pressure_mass.matvec(&x);
    rhs[d.num_velocity()..].copy_from_slice(&rp[d.num_velocity()..]);
    rhs.into_iter().map(Complex64::from).collect()
}
