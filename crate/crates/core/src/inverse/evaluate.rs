use num_complex::Complex64;

use super::gradient::{shape_gradient, ShapeGradientDensity};
use crate::data::CauchyData;
use crate::error::Result;
use crate::fem::element::edge_p2_values;
use crate::fem::quadrature::EDGE_GAUSS3;
use crate::fem::{
    adjoint_rhs, angle_of, assemble_ccbm_state, solve_mixed_neumann, BoundaryTrace,
    ComplexStokesField, DofMap, Factorization, RealStokesField, StokesOperators,
};
use crate::geometry::{BoundaryTag, Point, TriangleMesh};

/// `J = ½(‖u_i‖² + ‖p_i‖²)` with its two parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub j: f64,
    pub u_i_norm_sq: f64,
    pub p_i_norm_sq: f64,
}

impl CostBreakdown {
    fn new(u_i_norm_sq: f64, p_i_norm_sq: f64) -> Self {
        Self {
            j: 0.5 * (u_i_norm_sq + p_i_norm_sq),
            u_i_norm_sq,
            p_i_norm_sq,
        }
    }
}

/// Exact (mass-matrix) evaluation of the cost for a solved state.
pub fn evaluate_cost(state: &ComplexStokesField, ops: &StokesOperators) -> CostBreakdown {
    let im = state.imag_part().to_solution();
    let quad = |m: &crate::fem::SparseMatrix<f64>| {
        let mv = m.matvec(&im);
        mv.iter().zip(&im).map(|(a, b)| a * b).sum::<f64>().max(0.0)
    };
    CostBreakdown::new(quad(&ops.velocity_mass), quad(&ops.pressure_mass))
}

/// Solves the CCBM state system and keeps its factorization for the adjoint.
pub fn solve_state(
    mesh: &TriangleMesh,
    ops: &StokesOperators,
    alpha: f64,
    f: &dyn BoundaryTrace,
    g: &dyn BoundaryTrace,
) -> Result<(ComplexStokesField, Factorization<Complex64>)> {
    let sys = assemble_ccbm_state(mesh, ops, alpha, f, g)?;
    let lu = Factorization::new(sys.matrix)?;
    let x = lu.solve(&sys.rhs)?;
    Ok((ComplexStokesField::from_solution(&ops.dofs, &x), lu))
}

/// Solves the adjoint system with the state factorization. The adjoint
/// matrix is the complex conjugate of the state matrix and its right-hand
/// side is real, so `v = conj(A⁻¹ r)`.
pub fn solve_adjoint(
    lu: &Factorization<Complex64>,
    ops: &StokesOperators,
    state: &ComplexStokesField,
) -> Result<ComplexStokesField> {
    let im = state.imag_part();
    let rhs: Vec<Complex64> = adjoint_rhs(ops, &im.velocity, &im.pressure)?
        .into_iter()
        .map(Complex64::from)
        .collect();
    let x: Vec<Complex64> = lu.solve(&rhs)?.into_iter().map(|c| c.conj()).collect();
    Ok(ComplexStokesField::from_solution(&ops.dofs, &x))
}

/// Everything computed on one shape.
pub struct ShapeEvaluation {
    pub ops: StokesOperators,
    pub state: ComplexStokesField,
    pub adjoint: ComplexStokesField,
    pub cost: CostBreakdown,
    pub gradient: ShapeGradientDensity,
}

/// State, cost, adjoint and shape gradient on `mesh`.
pub fn evaluate_shape(
    mesh: &TriangleMesh,
    alpha: f64,
    f: &dyn BoundaryTrace,
    g: &dyn BoundaryTrace,
) -> Result<ShapeEvaluation> {
    let ops = StokesOperators::new(mesh);
    let (state, lu) = solve_state(mesh, &ops, alpha, f, g)?;
    let cost = evaluate_cost(&state, &ops);
    let adjoint = solve_adjoint(&lu, &ops, &state)?;
    let gradient = shape_gradient(mesh, &ops, alpha, &state, &adjoint)?;
    Ok(ShapeEvaluation {
        ops,
        state,
        adjoint,
        cost,
        gradient,
    })
}

/// Velocity trace of a real P2 field on the outer boundary, by angle.
pub struct SigmaTrace {
    /// Per outer edge: start angle, end angle (unwrapped), endpoints, and the
    /// six trace coefficients (x then y at start, end, midpoint).
    edges: Vec<(f64, f64, Point, Point, [[f64; 3]; 2])>,
}

impl SigmaTrace {
    pub fn new(field: &RealStokesField, mesh: &TriangleMesh, dofs: &DofMap) -> Self {
        let n = dofs.num_nodes();
        let mut edges: Vec<_> = mesh
            .boundary_edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tag == BoundaryTag::Sigma)
            .map(|(idx, e)| {
                let [a, b] = e.vertices;
                let m = dofs.boundary_edge_midnodes[idx];
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                let t0 = angle_of(pa);
                let mut t1 = angle_of(pb);
                if t1 <= t0 {
                    t1 += std::f64::consts::TAU;
                }
                let c = |k: usize| {
                    [
                        field.velocity[a + k * n],
                        field.velocity[b + k * n],
                        field.velocity[m + k * n],
                    ]
                };
                (t0, t1, pa, pb, [c(0), c(1)])
            })
            .collect();
        edges.sort_by(|x, y| x.0.total_cmp(&y.0));
        Self { edges }
    }
}

impl BoundaryTrace for SigmaTrace {
    fn value(&self, theta: f64) -> Point {
        let th = theta.rem_euclid(std::f64::consts::TAU);
        let k = match self.edges.partition_point(|e| e.0 <= th) {
            0 => self.edges.len() - 1,
            i => i - 1,
        };
        let (_, _, a, b, c) = self.edges[k];
        let d = [th.cos(), th.sin()];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let s = -(d[0] * a[1] - d[1] * a[0]) / (d[0] * ab[1] - d[1] * ab[0]);
        let phi = edge_p2_values(s.clamp(0.0, 1.0));
        [
            c[0][0] * phi[0] + c[0][1] * phi[1] + c[0][2] * phi[2],
            c[1][0] * phi[0] + c[1][1] * phi[1] + c[1][2] * phi[2],
        ]
    }
}

/// `½ ∫_Σ |u − f|²` for a real P2 velocity `u`, by 3-point Gauss per edge.
pub fn sigma_misfit(
    field: &RealStokesField,
    mesh: &TriangleMesh,
    dofs: &DofMap,
    f: &dyn BoundaryTrace,
) -> f64 {
    let n = dofs.num_nodes();
    let mut total = 0.0;
    for (idx, e) in mesh.boundary_edges.iter().enumerate() {
        if e.tag != BoundaryTag::Sigma {
            continue;
        }
        let (_, len) = mesh.edge_normal(e);
        let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
        let nodes = [
            e.vertices[0],
            e.vertices[1],
            dofs.boundary_edge_midnodes[idx],
        ];
        for &(s, w) in &EDGE_GAUSS3 {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let phi = edge_p2_values(s);
            let mut u = [0.0; 2];
            for k in 0..3 {
                u[0] += phi[k] * field.velocity[nodes[k]];
                u[1] += phi[k] * field.velocity[n + nodes[k]];
            }
            let fv = f.value(angle_of(x));
            total += w * len * ((u[0] - fv[0]).powi(2) + (u[1] - fv[1]).powi(2));
        }
    }
    0.5 * total
}

/// Dirichlet least-squares misfit `½ ∫_Σ |u_N − f|²` of the forward traction
/// problem on `mesh`. Diagnostic only.
pub fn evaluate_ls_cost_diagnostic(
    mesh: &TriangleMesh,
    alpha: f64,
    data: &CauchyData,
) -> Result<f64> {
    let ops = StokesOperators::new(mesh);
    let (u, _) = solve_mixed_neumann(mesh, &ops, alpha, &data.g)?;
    Ok(sigma_misfit(&u, mesh, &ops.dofs, data))
}
