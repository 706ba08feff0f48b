use std::collections::HashMap;
use std::fmt;

use super::polyline::is_simple_loop;
use super::{lerp, norm, signed_area, sub, Point, SIGMA_RADIUS_TOL};
use crate::error::{Error, Result};

/// Which part of the domain boundary an edge lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryTag {
    /// The fixed outer unit circle.
    Sigma,
    /// Obstacle loop with the given id.
    Gamma(usize),
}

impl BoundaryTag {
    pub fn is_gamma(self) -> bool {
        matches!(self, BoundaryTag::Gamma(_))
    }
}

impl fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryTag::Sigma => write!(f, "SIGMA"),
            BoundaryTag::Gamma(_) => write!(f, "GAMMA"),
        }
    }
}

/// A boundary edge, oriented so that the domain lies to its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub tag: BoundaryTag,
    /// The unique triangle containing this edge.
    pub triangle: usize,
}

/// Conforming P1 triangulation of the unit disk minus one or more obstacles.
///
/// Boundary edges are stored loop by loop: the outer loop first
/// (counterclockwise), then each obstacle loop (clockwise, so the domain is
/// always on the left). The outward unit normal of the domain on an edge
/// `a -> b` is therefore the right normal `(dy, -dx) / len`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub h_target: f64,
}

impl TriangleMesh {
    /// Builds a mesh from counterclockwise triangles, discovering and tagging
    /// the boundary loops. The loop whose vertices all lie on the unit circle is
    /// the outer boundary; the remaining loops are numbered by their smallest
    /// vertex index.
    pub fn from_triangles(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        h_target: f64,
    ) -> Result<Self> {
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Mesh(format!(
                    "triangle {t} references a missing vertex"
                )));
            }
        }
        let mut count: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = count.entry(key).or_insert((0, 0, 0));
                e.0 += 1;
                e.1 = t;
                e.2 = a;
            }
        }
        if let Some((k, _)) = count.iter().find(|(_, v)| v.0 > 2) {
            return Err(Error::Mesh(format!(
                "edge {k:?} is shared by more than two triangles"
            )));
        }
        // oriented boundary edges, keyed by their start vertex
        let mut next: HashMap<usize, (usize, usize)> = HashMap::new();
        for (&(a, b), &(c, t, start)) in &count {
            if c == 1 {
                let end = if start == a { b } else { a };
                if next.insert(start, (end, t)).is_some() {
                    return Err(Error::Mesh(format!(
                        "boundary is not a disjoint union of loops at vertex {start}"
                    )));
                }
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut visited = vec![false; vertices.len()];
        let mut loops: Vec<Vec<(usize, usize, usize)>> = Vec::new();
        for &s in &starts {
            if visited[s] {
                continue;
            }
            let mut lp = Vec::new();
            let mut v = s;
            loop {
                visited[v] = true;
                let (w, t) = next[&v];
                lp.push((v, w, t));
                v = w;
                if v == s {
                    break;
                }
                if visited[v] {
                    return Err(Error::Mesh("boundary loops are not closed".into()));
                }
            }
            loops.push(lp);
        }
        let on_unit = |lp: &Vec<(usize, usize, usize)>| {
            lp.iter()
                .all(|&(v, _, _)| (norm(vertices[v]) - 1.0).abs() <= SIGMA_RADIUS_TOL)
        };
        let sigma: Vec<usize> = (0..loops.len()).filter(|&i| on_unit(&loops[i])).collect();
        if sigma.len() != 1 {
            return Err(Error::Mesh(format!(
                "expected exactly one outer loop on the unit circle, found {}",
                sigma.len()
            )));
        }
        let mut boundary_edges = Vec::new();
        let mut push = |lp: &Vec<(usize, usize, usize)>, tag| {
            // start each loop at its smallest vertex for a canonical layout
            let first = (0..lp.len()).min_by_key(|&i| lp[i].0).unwrap();
            for k in 0..lp.len() {
                let (a, b, t) = lp[(first + k) % lp.len()];
                boundary_edges.push(BoundaryEdge {
                    vertices: [a, b],
                    tag,
                    triangle: t,
                });
            }
        };
        push(&loops[sigma[0]], BoundaryTag::Sigma);
        let mut gamma_id = 0;
        for (i, lp) in loops.iter().enumerate() {
            if i != sigma[0] {
                push(lp, BoundaryTag::Gamma(gamma_id));
                gamma_id += 1;
            }
        }
        let mesh = TriangleMesh {
            vertices,
            triangles,
            boundary_edges,
            h_target,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Checks the structural invariants: positive triangle areas, one outer
    /// loop on the unit circle, at least one obstacle loop, edges owned by the
    /// triangle they name.
    pub fn validate(&self) -> Result<()> {
        if let Some((t, a)) = self
            .triangles
            .iter()
            .enumerate()
            .map(|(t, _)| (t, self.triangle_area(t)))
            .find(|(_, a)| !(*a > 0.0))
        {
            return Err(Error::Mesh(format!(
                "triangle {t} has non-positive area {a:e}"
            )));
        }
        let n_sigma_loops = self
            .loops()
            .iter()
            .filter(|(tag, _)| *tag == BoundaryTag::Sigma)
            .count();
        if n_sigma_loops != 1 {
            return Err(Error::Mesh(format!("found {n_sigma_loops} outer loops")));
        }
        if self.gamma_loop_count() == 0 {
            return Err(Error::Mesh("mesh has no obstacle boundary".into()));
        }
        for e in &self.boundary_edges {
            if e.tag == BoundaryTag::Sigma
                && e.vertices
                    .iter()
                    .any(|&v| (norm(self.vertices[v]) - 1.0).abs() > SIGMA_RADIUS_TOL)
            {
                return Err(Error::Mesh("outer vertex off the unit circle".into()));
            }
            let tri = self.triangles[e.triangle];
            let ok = (0..3).any(|k| tri[k] == e.vertices[0] && tri[(k + 1) % 3] == e.vertices[1]);
            if !ok {
                return Err(Error::Mesh(format!(
                    "boundary edge {:?} not found in triangle {}",
                    e.vertices, e.triangle
                )));
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    pub fn median_triangle_area(&self) -> f64 {
        let mut areas: Vec<f64> = (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .collect();
        areas.sort_by(f64::total_cmp);
        areas[areas.len() / 2]
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let p = self.triangle_points(t);
                (0..3)
                    .map(|k| {
                        let u = sub(p[(k + 1) % 3], p[k]);
                        let v = sub(p[(k + 2) % 3], p[k]);
                        let c = (u[0] * v[0] + u[1] * v[1]) / (norm(u) * norm(v));
                        c.clamp(-1.0, 1.0).acos().to_degrees()
                    })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn gamma_loop_count(&self) -> usize {
        self.boundary_edges
            .iter()
            .filter_map(|e| match e.tag {
                BoundaryTag::Gamma(k) => Some(k + 1),
                BoundaryTag::Sigma => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Boundary loops as ordered vertex index lists (domain to the left).
    pub fn loops(&self) -> Vec<(BoundaryTag, Vec<usize>)> {
        let mut out: Vec<(BoundaryTag, Vec<usize>)> = Vec::new();
        for e in &self.boundary_edges {
            match out.last_mut() {
                Some((tag, lp)) if *tag == e.tag => lp.push(e.vertices[0]),
                _ => out.push((e.tag, vec![e.vertices[0]])),
            }
        }
        out
    }

    /// Obstacle boundaries as counterclockwise polylines, one per loop.
    pub fn gamma_polylines(&self) -> Vec<Vec<Point>> {
        self.loops()
            .into_iter()
            .filter(|(tag, _)| tag.is_gamma())
            .map(|(_, lp)| lp.iter().rev().map(|&v| self.vertices[v]).collect())
            .collect()
    }

    pub fn sigma_polyline(&self) -> Vec<Point> {
        self.loops()
            .into_iter()
            .find(|(tag, _)| *tag == BoundaryTag::Sigma)
            .map(|(_, lp)| lp.iter().map(|&v| self.vertices[v]).collect())
            .unwrap_or_default()
    }

    /// Per-vertex tag: `None` for interior vertices.
    pub fn vertex_tags(&self) -> Vec<Option<BoundaryTag>> {
        let mut tags = vec![None; self.vertices.len()];
        for e in &self.boundary_edges {
            for &v in &e.vertices {
                tags[v] = Some(e.tag);
            }
        }
        tags
    }

    pub fn edges_with_tag(&self, tag: BoundaryTag) -> impl Iterator<Item = &BoundaryEdge> {
        self.boundary_edges.iter().filter(move |e| e.tag == tag)
    }

    /// Outward unit normal and length of a boundary edge.
    pub fn edge_normal(&self, e: &BoundaryEdge) -> (Point, f64) {
        let a = self.vertices[e.vertices[0]];
        let b = self.vertices[e.vertices[1]];
        let d = sub(b, a);
        let len = norm(d);
        ([d[1] / len, -d[0] / len], len)
    }

    /// True when every obstacle loop is still a simple polyline.
    pub fn gamma_loops_simple(&self) -> bool {
        self.gamma_polylines().iter().all(|p| is_simple_loop(p))
    }

    /// Red refinement: every triangle is split into four. New vertices on the
    /// outer boundary are pushed radially onto the unit circle; new obstacle
    /// vertices are passed through `gamma_projection` when given, otherwise
    /// they stay at edge midpoints.
    pub fn refine_uniform(
        &self,
        gamma_projection: Option<&dyn Fn(Point) -> Point>,
    ) -> Result<Self> {
        let boundary: HashMap<(usize, usize), BoundaryTag> = self
            .boundary_edges
            .iter()
            .map(|e| {
                let [a, b] = e.vertices;
                ((a.min(b), a.max(b)), e.tag)
            })
            .collect();
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let mut p = lerp(vertices[a], vertices[b], 0.5);
                match boundary.get(&key) {
                    Some(BoundaryTag::Sigma) => {
                        let r = norm(p);
                        p = [p[0] / r, p[1] / r];
                    }
                    Some(BoundaryTag::Gamma(_)) => {
                        if let Some(proj) = gamma_projection {
                            p = proj(p);
                        }
                    }
                    None => {}
                }
                vertices.push(p);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for &[a, b, c] in &self.triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.push([a, ab, ca]);
            triangles.push([ab, b, bc]);
            triangles.push([ca, bc, c]);
            triangles.push([ab, bc, ca]);
        }
        TriangleMesh::from_triangles(vertices, triangles, 0.5 * self.h_target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, BoundaryCurve};

    fn annulus() -> TriangleMesh {
        generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 32, 20, 0.2).unwrap()
    }

    #[test]
    fn loops_and_normals() {
        let m = annulus();
        let loops = m.loops();
        assert_eq!(loops.len(), 2);
        assert_eq!(loops[0].0, BoundaryTag::Sigma);
        assert_eq!(loops[0].1.len(), 32);
        assert_eq!(loops[1].1.len(), 20);
        for e in &m.boundary_edges {
            let (n, _) = m.edge_normal(e);
            let mid = lerp(m.vertices[e.vertices[0]], m.vertices[e.vertices[1]], 0.5);
            let radial = n[0] * mid[0] + n[1] * mid[1];
            match e.tag {
                BoundaryTag::Sigma => assert!(radial > 0.9),
                BoundaryTag::Gamma(_) => assert!(radial < -0.4),
            }
        }
    }

    #[test]
    fn refine_quadruples_triangles() {
        let m = annulus();
        let fine = m.refine_uniform(None).unwrap();
        assert_eq!(fine.num_triangles(), 4 * m.num_triangles());
        assert_eq!(fine.sigma_polyline().len(), 64);
        assert!((fine.area() - m.area()).abs() < 0.02);
    }

    #[test]
    fn rejects_mesh_without_outer_loop() {
        let v = vec![[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]];
        let err = TriangleMesh::from_triangles(v, vec![[0, 1, 2]], 0.1).unwrap_err();
        assert!(matches!(err, Error::Mesh(_)));
    }
}
