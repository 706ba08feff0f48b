use std::io::Write;

use num_complex::Complex64;

use super::element::TriangleGeometry;
use super::{DofMap, Scalar};
use crate::error::Result;
use crate::geometry::{Point, TriangleMesh};

/// P2 velocity and P1 pressure coefficients.
///
/// `velocity` holds the x components of all P2 nodes followed by the y
/// components; `pressure` has one value per mesh vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct StokesField<T> {
    pub velocity: Vec<T>,
    pub pressure: Vec<T>,
}

pub type ComplexStokesField = StokesField<Complex64>;
pub type RealStokesField = StokesField<f64>;

impl<T: Scalar> StokesField<T> {
    pub fn zeros(dofs: &DofMap) -> Self {
        Self {
            velocity: vec![T::zero(); dofs.num_velocity()],
            pressure: vec![T::zero(); dofs.num_pressure()],
        }
    }

    /// Splits a solution vector in global numbering.
    pub fn from_solution(dofs: &DofMap, x: &[T]) -> Self {
        let nv = dofs.num_velocity();
        Self {
            velocity: x[..nv].to_vec(),
            pressure: x[nv..nv + dofs.num_pressure()].to_vec(),
        }
    }

    pub fn to_solution(&self) -> Vec<T> {
        let mut x = self.velocity.clone();
        x.extend_from_slice(&self.pressure);
        x
    }

    fn num_nodes(&self) -> usize {
        self.velocity.len() / 2
    }

    /// Velocity at barycentric point `bary` of triangle `t`.
    pub fn velocity_at(
        &self,
        mesh: &TriangleMesh,
        dofs: &DofMap,
        t: usize,
        bary: [f64; 3],
    ) -> [T; 2] {
        let nodes = dofs.triangle_nodes(mesh, t);
        let phi = TriangleGeometry::p2_values(bary);
        let n = self.num_nodes();
        let mut u = [T::zero(); 2];
        for k in 0..6 {
            u[0] += self.velocity[nodes[k]] * phi[k];
            u[1] += self.velocity[n + nodes[k]] * phi[k];
        }
        u
    }

    /// Velocity Jacobian `(Du)_ij = ∂_j u_i` inside triangle `t`.
    pub fn velocity_gradient(
        &self,
        mesh: &TriangleMesh,
        dofs: &DofMap,
        geo: &TriangleGeometry,
        t: usize,
        bary: [f64; 3],
    ) -> [[T; 2]; 2] {
        let nodes = dofs.triangle_nodes(mesh, t);
        let dphi = geo.p2_gradients(bary);
        let n = self.num_nodes();
        let mut g = [[T::zero(); 2]; 2];
        for k in 0..6 {
            for c in 0..2 {
                let coef = self.velocity[c * n + nodes[k]];
                g[c][0] += coef * dphi[k][0];
                g[c][1] += coef * dphi[k][1];
            }
        }
        g
    }

    pub fn pressure_at(&self, mesh: &TriangleMesh, t: usize, bary: [f64; 3]) -> T {
        let v = mesh.triangles[t];
        self.pressure[v[0]] * bary[0]
            + self.pressure[v[1]] * bary[1]
            + self.pressure[v[2]] * bary[2]
    }

    /// Debug listing: one line `dof_index re im` per unknown in global order.
    pub fn write_listing<W: Write>(&self, mut out: W) -> Result<()>
    where
        T: Into<Complex64>,
    {
        let mut s = String::new();
        for (i, v) in self.velocity.iter().chain(&self.pressure).enumerate() {
            let c: Complex64 = (*v).into();
            s.push_str(&format!("{i} {:e} {:e}\n", c.re, c.im));
        }
        out.write_all(s.as_bytes())?;
        Ok(())
    }
}

impl ComplexStokesField {
    pub fn real_part(&self) -> RealStokesField {
        StokesField {
            velocity: self.velocity.iter().map(|c| c.re).collect(),
            pressure: self.pressure.iter().map(|c| c.re).collect(),
        }
    }

    pub fn imag_part(&self) -> RealStokesField {
        StokesField {
            velocity: self.velocity.iter().map(|c| c.im).collect(),
            pressure: self.pressure.iter().map(|c| c.im).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        StokesField {
            velocity: self.velocity.iter().map(|c| c.conj()).collect(),
            pressure: self.pressure.iter().map(|c| c.conj()).collect(),
        }
    }
}

/// Nodal interpolant of a velocity / pressure pair.
pub fn interpolate_p2(
    mesh: &TriangleMesh,
    dofs: &DofMap,
    u: impl Fn(Point) -> Point,
    p: impl Fn(Point) -> f64,
) -> RealStokesField {
    let pts = dofs.node_points(mesh);
    let n = pts.len();
    let mut velocity = vec![0.0; 2 * n];
    for (k, &x) in pts.iter().enumerate() {
        let v = u(x);
        velocity[k] = v[0];
        velocity[n + k] = v[1];
    }
    StokesField {
        velocity,
        pressure: mesh.vertices.iter().map(|&x| p(x)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_annulus_mesh, BoundaryCurve};

    #[test]
    fn interpolation_reproduces_quadratics_and_listing_format() {
        let m =
            generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 24, 16, 0.25).unwrap();
        let d = DofMap::new(&m);
        let u = |p: Point| [p[0] * p[1] + 1.0, p[1] * p[1] - 2.0 * p[0]];
        let f = interpolate_p2(&m, &d, u, |p| p[0] - p[1]);
        let t = 3;
        let b = [0.2, 0.3, 0.5];
        let x = TriangleGeometry::new(m.triangle_points(t)).map(b);
        let v = f.velocity_at(&m, &d, t, b);
        let e = u(x);
        assert!((v[0] - e[0]).abs() < 1e-13 && (v[1] - e[1]).abs() < 1e-13);
        assert!((f.pressure_at(&m, t, b) - (x[0] - x[1])).abs() < 1e-13);
        let mut buf = Vec::new();
        f.write_listing(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), d.num_total());
        assert!(text.lines().next().unwrap().starts_with("0 "));
    }
}
