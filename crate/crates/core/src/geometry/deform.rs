use super::{BoundaryTag, Point, TriangleMesh};
use crate::error::{Error, Result};

/// One displacement vector per mesh vertex, zero on the outer boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationField {
    pub values: Vec<Point>,
}

impl DeformationField {
    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![[0.0, 0.0]; n],
        }
    }

    /// Samples `f` at the vertices, forcing zero on the outer boundary.
    pub fn from_fn(mesh: &TriangleMesh, f: impl Fn(Point) -> Point) -> Self {
        let tags = mesh.vertex_tags();
        let values = mesh
            .vertices
            .iter()
            .zip(&tags)
            .map(|(&p, tag)| match tag {
                Some(BoundaryTag::Sigma) => [0.0, 0.0],
                _ => f(p),
            })
            .collect();
        Self { values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v[0] == 0.0 && v[1] == 0.0)
    }

    pub fn max_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v[0].hypot(v[1]))
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| [s * v[0], s * v[1]]).collect(),
        }
    }
}

/// Moves every vertex to `x + t V(x)`, keeping connectivity.
///
/// Fails with [`Error::StepTooLarge`] when a triangle's signed area drops to
/// `area_floor` or below, or when an obstacle loop stops being simple.
pub fn deform_mesh(
    mesh: &TriangleMesh,
    field: &DeformationField,
    t: f64,
    area_floor: f64,
) -> Result<TriangleMesh> {
    if field.values.len() != mesh.num_vertices() {
        return Err(Error::Argument(format!(
            "deformation has {} values for {} vertices",
            field.values.len(),
            mesh.num_vertices()
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Argument(format!(
            "step must be non-negative, got {t}"
        )));
    }
    for e in mesh.edges_with_tag(BoundaryTag::Sigma) {
        for &v in &e.vertices {
            if field.values[v] != [0.0, 0.0] {
                return Err(Error::Argument(format!(
                    "deformation is nonzero at outer vertex {v}"
                )));
            }
        }
    }
    let mut moved = mesh.clone();
    for (x, v) in moved.vertices.iter_mut().zip(&field.values) {
        x[0] += t * v[0];
        x[1] += t * v[1];
    }
    for tri in 0..moved.num_triangles() {
        let area = moved.triangle_area(tri);
        if !(area > area_floor) {
            return Err(Error::StepTooLarge {
                triangle: tri,
                area,
                floor: area_floor,
            });
        }
    }
    if t > 0.0 && !moved.gamma_loops_simple() {
        return Err(Error::StepTooLarge {
            triangle: usize::MAX,
            area: 0.0,
            floor: area_floor,
        });
    }
    Ok(moved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, norm, BoundaryCurve};

    fn mesh() -> TriangleMesh {
        generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 64, 48, 0.1).unwrap()
    }

    #[test]
    fn zero_step_and_zero_field_are_identity() {
        let m = mesh();
        let v = DeformationField::from_fn(&m, |p| [p[1], -p[0]]);
        assert_eq!(deform_mesh(&m, &v, 0.0, 0.0).unwrap(), m);
        let z = DeformationField::zeros(m.num_vertices());
        assert_eq!(deform_mesh(&m, &z, 0.7, 0.0).unwrap(), m);
    }

    #[test]
    fn inward_normal_field_shrinks_circle() {
        let m = mesh();
        // outward normal of the domain on the obstacle points to the origin
        let v = DeformationField::from_fn(&m, |p| {
            let r = norm(p);
            if r < 0.5 + 1e-9 {
                [-p[0] / r, -p[1] / r]
            } else {
                [0.0, 0.0]
            }
        });
        let t = 0.01;
        let moved = deform_mesh(&m, &v, t, 0.0).unwrap();
        for g in moved.gamma_polylines() {
            for p in g {
                assert!((norm(p) - (0.5 - t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nonzero_on_sigma_is_rejected() {
        let m = mesh();
        let v = DeformationField {
            values: vec![[1.0, 0.0]; m.num_vertices()],
        };
        assert!(matches!(
            deform_mesh(&m, &v, 0.1, 0.0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn large_step_inverts_and_is_flagged() {
        let m = mesh();
        let v = DeformationField::from_fn(&m, |p| [5.0 * p[0], 0.0]);
        let floor = 1e-3 * m.median_triangle_area();
        assert!(matches!(
            deform_mesh(&m, &v, 1.0, floor),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
