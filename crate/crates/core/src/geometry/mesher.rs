use std::collections::HashSet;
use std::f64::consts::TAU;

use spade::handles::FixedVertexHandle;
use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use super::polyline::{contains_point, is_simple_loop, loop_signed_area, loops_intersect};
use super::{norm, BoundaryCurve, Point, TriangleMesh, CLEARANCE, QUALITY_FLOOR_DEG};
use crate::error::{Error, Result};

/// Resolution controls for [`generate_annulus_mesh`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshOptions {
    /// Vertices on the outer unit circle.
    pub sigma_nodes: usize,
    /// Vertices on each obstacle loop.
    pub gamma_nodes: usize,
    /// Nominal interior edge length.
    pub h_target: f64,
    /// Angular offset of the first outer vertex, as a fraction of the outer spacing.
    pub sigma_phase: f64,
}

impl MeshOptions {
    pub fn new(sigma_nodes: usize, gamma_nodes: usize, h_target: f64) -> Self {
        Self {
            sigma_nodes,
            gamma_nodes,
            h_target,
            sigma_phase: 0.0,
        }
    }
}

// Refinement aims above the accepted quality floor.
const REFINE_ANGLE_DEG: f64 = 28.0;

/// Triangulates the unit disk minus the given obstacles.
pub fn generate_annulus_mesh(
    inner: &[BoundaryCurve],
    sigma_nodes: usize,
    gamma_nodes: usize,
    h_target: f64,
) -> Result<TriangleMesh> {
    generate_annulus_mesh_with(inner, MeshOptions::new(sigma_nodes, gamma_nodes, h_target))
}

pub fn generate_annulus_mesh_with(
    inner: &[BoundaryCurve],
    opts: MeshOptions,
) -> Result<TriangleMesh> {
    if inner.is_empty() {
        return Err(Error::Geometry("at least one obstacle is required".into()));
    }
    if opts.sigma_nodes < 8 || opts.gamma_nodes < 8 {
        return Err(Error::Argument(format!(
            "boundary node counts must be at least 8 (got {} / {})",
            opts.sigma_nodes, opts.gamma_nodes
        )));
    }
    if !(opts.h_target > 0.0) {
        return Err(Error::Argument("h_target must be positive".into()));
    }
    let sigma: Vec<Point> = (0..opts.sigma_nodes)
        .map(|k| {
            let th = TAU * (k as f64 + opts.sigma_phase) / opts.sigma_nodes as f64;
            [th.cos(), th.sin()]
        })
        .collect();
    let gammas: Vec<Vec<Point>> = inner
        .iter()
        .map(|c| c.sample(opts.gamma_nodes))
        .collect::<Result<_>>()?;
    check_obstacles(&gammas)?;
    mesh_from_loops(&sigma, &gammas, opts.h_target)
}

fn check_obstacles(gammas: &[Vec<Point>]) -> Result<()> {
    for (i, g) in gammas.iter().enumerate() {
        if !is_simple_loop(g) {
            return Err(Error::Mesh(format!("obstacle {i} is not a simple loop")));
        }
        let reach = g.iter().map(|p| norm(*p)).fold(0.0, f64::max);
        if reach > 1.0 - CLEARANCE {
            return Err(Error::Geometry(format!(
                "obstacle {i} reaches radius {reach:.4}, beyond the allowed {:.2}",
                1.0 - CLEARANCE
            )));
        }
        for (j, h) in gammas.iter().enumerate().skip(i + 1) {
            if loops_intersect(g, h) || contains_point(g, h[0]) || contains_point(h, g[0]) {
                return Err(Error::Geometry(format!("obstacles {i} and {j} overlap")));
            }
        }
    }
    Ok(())
}

/// Constrained Delaunay triangulation with Ruppert-style refinement. The
/// input loops become constraint edges that are never split, so boundary
/// vertices are exactly the given points. `sigma` is counterclockwise;
/// obstacle loops may have either orientation.
pub(crate) fn mesh_from_loops(
    sigma: &[Point],
    gammas: &[Vec<Point>],
    h_target: f64,
) -> Result<TriangleMesh> {
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut insert_loop = |pts: &[Point]| -> Result<Vec<FixedVertexHandle>> {
        let handles = pts
            .iter()
            .map(|p| {
                cdt.insert(Point2::new(p[0], p[1]))
                    .map_err(|e| Error::Mesh(format!("vertex insertion failed: {e:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        for k in 0..handles.len() {
            let (a, b) = (handles[k], handles[(k + 1) % handles.len()]);
            if !cdt.can_add_constraint(a, b) {
                return Err(Error::Mesh(
                    "boundary constraint crosses another boundary".into(),
                ));
            }
            cdt.add_constraint(a, b);
        }
        Ok(handles)
    };
    insert_loop(sigma)?;
    for g in gammas {
        insert_loop(g)?;
    }
    let expected = sigma.len() + gammas.iter().map(Vec::len).sum::<usize>();
    if cdt.num_vertices() != expected {
        return Err(Error::Mesh("duplicate boundary vertices".into()));
    }
    let max_area = 3f64.sqrt() / 4.0 * h_target * h_target;
    let params = RefinementParameters::<f64>::new()
        .keep_constraint_edges()
        .exclude_outer_faces(true)
        .with_angle_limit(AngleLimit::from_deg(REFINE_ANGLE_DEG))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(200 * expected + (40.0 / max_area) as usize);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Mesh("refinement did not complete".into()));
    }
    let excluded: HashSet<_> = result.excluded_faces.iter().copied().collect();
    let mut triangles = Vec::new();
    let mut used = vec![usize::MAX; cdt.num_vertices()];
    let mut vertices: Vec<Point> = Vec::new();
    // boundary vertices keep their input order
    for v in cdt.fixed_vertices().take(expected) {
        used[v.index()] = vertices.len();
        let p = cdt.vertex(v).position();
        vertices.push([p.x, p.y]);
    }
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let mut tri = [0usize; 3];
        for (k, v) in face.vertices().iter().enumerate() {
            let idx = v.fix().index();
            if used[idx] == usize::MAX {
                used[idx] = vertices.len();
                let p = v.position();
                vertices.push([p.x, p.y]);
            }
            tri[k] = used[idx];
        }
        triangles.push(tri);
    }
    // a steiner point placed inside an obstacle would leave a dangling
    // vertex; `used` only keeps referenced ones beyond the boundary prefix
    let mesh = TriangleMesh::from_triangles(vertices, triangles, h_target)?;
    let n_sigma = mesh.sigma_polyline().len();
    if n_sigma != sigma.len() {
        return Err(Error::Mesh(format!(
            "outer loop has {n_sigma} vertices, expected {}",
            sigma.len()
        )));
    }
    if mesh.gamma_loop_count() != gammas.len() {
        return Err(Error::Mesh(format!(
            "found {} obstacle loops, expected {}",
            mesh.gamma_loop_count(),
            gammas.len()
        )));
    }
    Ok(mesh)
}

/// Builds a fresh triangulation from the current boundary polylines of `mesh`.
/// Boundary vertex coordinates are reused bit for bit.
pub fn remesh(mesh: &TriangleMesh) -> Result<TriangleMesh> {
    let sigma = mesh.sigma_polyline();
    let gammas = mesh.gamma_polylines();
    for (i, g) in gammas.iter().enumerate() {
        if !is_simple_loop(g) {
            return Err(Error::Mesh(format!("obstacle loop {i} self-intersects")));
        }
        if loop_signed_area(g) <= 0.0 {
            return Err(Error::Mesh(format!("obstacle loop {i} is inverted")));
        }
    }
    check_obstacles(&gammas).map_err(|e| Error::Mesh(e.to_string()))?;
    let fresh = mesh_from_loops(&sigma, &gammas, mesh.h_target)?;
    let angle = fresh.min_angle_deg();
    if angle < QUALITY_FLOOR_DEG {
        return Err(Error::Mesh(format!(
            "remeshed minimum angle {angle:.2} deg is below {QUALITY_FLOOR_DEG} deg"
        )));
    }
    Ok(fresh)
}
