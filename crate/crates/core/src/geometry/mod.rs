//! Obstacle curves, annular triangle meshes and shape distances.

mod curve;
mod deform;
mod hausdorff;
mod io;
mod mesh;
mod mesher;
pub mod polyline;

pub use curve::{BoundaryCurve, CatalogShape};
pub use deform::{deform_mesh, DeformationField};
pub use hausdorff::hausdorff_distance;
pub use io::{read_mesh, read_polyline, write_mesh, write_polyline};
pub use mesh::{BoundaryEdge, BoundaryTag, TriangleMesh};
pub use mesher::{generate_annulus_mesh, generate_annulus_mesh_with, remesh, MeshOptions};

/// A point (or vector) in the plane.
pub type Point = [f64; 2];

/// Minimum distance kept between any obstacle and the outer unit circle.
pub const CLEARANCE: f64 = 0.05;

/// Smallest interior angle, in degrees, accepted from the mesher.
pub const QUALITY_FLOOR_DEG: f64 = 15.0;

/// Fraction of the median initial triangle area below which a deformed
/// triangle is treated as collapsed.
pub const AREA_FLOOR_FRACTION: f64 = 1e-3;

/// Tolerance on |x| = 1 for vertices of the outer boundary.
pub const SIGMA_RADIUS_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub(crate) fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

/// Signed area of the triangle (a, b, c); positive for counterclockwise order.
#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(sub(b, a), sub(c, a))
}
