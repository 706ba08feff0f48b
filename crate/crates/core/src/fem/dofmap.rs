use std::collections::HashMap;

use super::element::LOCAL_EDGES;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryTag, Point, TriangleMesh};

/// Degree-of-freedom numbering for Taylor-Hood P2/P1 on a mesh.
///
/// P2 nodes are the mesh vertices followed by one node per mesh edge. The
/// velocity unknown of component `c` at node `k` is `c * num_nodes + k`;
/// pressure unknowns (one per vertex) follow all velocity unknowns.
#[derive(Clone, Debug)]
pub struct DofMap {
    num_vertices: usize,
    num_triangles: usize,
    /// Mesh edges as sorted vertex pairs; edge `e` owns node `num_vertices + e`.
    pub edges: Vec<[usize; 2]>,
    /// Global edge index of each local edge (0,1), (1,2), (2,0).
    pub triangle_edges: Vec<[usize; 3]>,
    /// P2 midpoint node of every entry of `mesh.boundary_edges`.
    pub boundary_edge_midnodes: Vec<usize>,
    /// P2 nodes on the outer boundary, sorted.
    pub sigma_nodes: Vec<usize>,
    /// P2 nodes on obstacle boundaries, sorted.
    pub gamma_nodes: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let nv = mesh.num_vertices();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut triangle_edges = Vec::with_capacity(mesh.num_triangles());
        for tri in &mesh.triangles {
            let mut te = [0; 3];
            for (k, [i, j]) in LOCAL_EDGES.iter().enumerate() {
                let (a, b) = (tri[*i].min(tri[*j]), tri[*i].max(tri[*j]));
                te[k] = *index.entry((a, b)).or_insert_with(|| {
                    edges.push([a, b]);
                    edges.len() - 1
                });
            }
            triangle_edges.push(te);
        }
        let boundary_edge_midnodes: Vec<usize> = mesh
            .boundary_edges
            .iter()
            .map(|e| {
                let [a, b] = e.vertices;
                nv + index[&(a.min(b), a.max(b))]
            })
            .collect();
        let mut sigma = Vec::new();
        let mut gamma = Vec::new();
        for (e, &mid) in mesh.boundary_edges.iter().zip(&boundary_edge_midnodes) {
            let set = if e.tag == BoundaryTag::Sigma {
                &mut sigma
            } else {
                &mut gamma
            };
            set.extend_from_slice(&e.vertices);
            set.push(mid);
        }
        for set in [&mut sigma, &mut gamma] {
            set.sort_unstable();
            set.dedup();
        }
        Self {
            num_vertices: nv,
            num_triangles: mesh.num_triangles(),
            edges,
            triangle_edges,
            boundary_edge_midnodes,
            sigma_nodes: sigma,
            gamma_nodes: gamma,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of P2 nodes.
    pub fn num_nodes(&self) -> usize {
        self.num_vertices + self.edges.len()
    }

    pub fn num_velocity(&self) -> usize {
        2 * self.num_nodes()
    }

    pub fn num_pressure(&self) -> usize {
        self.num_vertices
    }

    pub fn num_total(&self) -> usize {
        self.num_velocity() + self.num_pressure()
    }

    #[inline]
    pub fn velocity(&self, component: usize, node: usize) -> usize {
        component * self.num_nodes() + node
    }

    #[inline]
    pub fn pressure(&self, vertex: usize) -> usize {
        self.num_velocity() + vertex
    }

    /// P2 nodes of triangle `t` in local order.
    pub fn triangle_nodes(&self, mesh: &TriangleMesh, t: usize) -> [usize; 6] {
        let [a, b, c] = mesh.triangles[t];
        let e = self.triangle_edges[t];
        let nv = self.num_vertices;
        [a, b, c, nv + e[0], nv + e[1], nv + e[2]]
    }

    /// Coordinates of every P2 node (edge nodes at straight-edge midpoints).
    pub fn node_points(&self, mesh: &TriangleMesh) -> Vec<Point> {
        let mut pts = mesh.vertices.clone();
        pts.extend(self.edges.iter().map(|&[a, b]| {
            let (p, q) = (mesh.vertices[a], mesh.vertices[b]);
            [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])]
        }));
        pts
    }

    /// Velocity unknowns fixed to zero (both components on obstacle nodes).
    pub fn constrained_velocity_dofs(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..2)
            .flat_map(|c| self.gamma_nodes.iter().map(move |&k| self.velocity(c, k)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Errors unless this numbering was built for a mesh with `mesh`'s sizes.
    pub fn check(&self, mesh: &TriangleMesh) -> Result<()> {
        if mesh.num_vertices() != self.num_vertices || mesh.num_triangles() != self.num_triangles {
            return Err(Error::Argument(format!(
                "dof map built for {} vertices / {} triangles, mesh has {} / {}",
                self.num_vertices,
                self.num_triangles,
                mesh.num_vertices(),
                mesh.num_triangles()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, BoundaryCurve};

    #[test]
    fn counts_and_shared_midpoints() {
        let m =
            generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 32, 20, 0.2).unwrap();
        let d = DofMap::new(&m);
        // Euler: E = V + T for an annulus
        assert_eq!(d.edges.len(), m.num_vertices() + m.num_triangles());
        assert_eq!(d.sigma_nodes.len(), 64);
        assert_eq!(d.gamma_nodes.len(), 40);
        let mut uses = vec![0; d.edges.len()];
        for te in &d.triangle_edges {
            for &e in te {
                uses[e] += 1;
            }
        }
        let boundary = uses.iter().filter(|&&u| u == 1).count();
        assert_eq!(boundary, m.boundary_edges.len());
        assert!(uses.iter().all(|&u| u == 1 || u == 2));
        assert_eq!(d.constrained_velocity_dofs().len(), 80);
    }
}
