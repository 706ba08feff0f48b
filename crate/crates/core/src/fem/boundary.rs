//! Boundary integrals and one-sided boundary traces of P2/P1 fields.

use super::element::{edge_p2_values, TriangleGeometry};
use super::quadrature::EDGE_GAUSS3;
use super::{DofMap, Scalar, StokesField};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryTag, Point, TriangleMesh};

fn check_tag(mesh: &TriangleMesh, tag: BoundaryTag) -> Result<()> {
    match tag {
        BoundaryTag::Gamma(k) if k >= mesh.gamma_loop_count() => Err(Error::Argument(format!(
            "no obstacle loop {k} (mesh has {})",
            mesh.gamma_loop_count()
        ))),
        _ => Ok(()),
    }
}

/// `∮ u·n ds` over the loop `tag`, with `n` the outward normal of the domain.
pub fn boundary_integral_flux<T: Scalar>(
    field: &StokesField<T>,
    mesh: &TriangleMesh,
    dofs: &DofMap,
    tag: BoundaryTag,
) -> Result<T> {
    check_tag(mesh, tag)?;
    dofs.check(mesh)?;
    let nn = dofs.num_nodes();
    let mut total = T::zero();
    for (idx, e) in mesh.boundary_edges.iter().enumerate() {
        if e.tag != tag {
            continue;
        }
        let (n, len) = mesh.edge_normal(e);
        let nodes = [
            e.vertices[0],
            e.vertices[1],
            dofs.boundary_edge_midnodes[idx],
        ];
        for &(s, w) in &EDGE_GAUSS3 {
            let phi = edge_p2_values(s);
            for k in 0..3 {
                let un = field.velocity[nodes[k]] * n[0] + field.velocity[nn + nodes[k]] * n[1];
                total += un * (w * len * phi[k]);
            }
        }
    }
    Ok(total)
}

/// Field traces at one boundary quadrature point, evaluated from the single
/// triangle adjacent to the edge.
#[derive(Clone, Copy, Debug)]
pub struct BoundarySample<T> {
    /// Index into `mesh.boundary_edges`.
    pub edge: usize,
    pub point: Point,
    /// Quadrature weight including the edge length.
    pub weight: f64,
    /// Outward unit normal of the domain.
    pub normal: Point,
    /// `σ(u,p)n = α(Du + Duᵀ)n − p n`.
    pub traction: [T; 2],
    /// `α(Du)n − p n`, the natural boundary quantity of the Laplacian form.
    pub conormal: [T; 2],
    /// `∂_n u = (Du)n`.
    pub normal_derivative: [T; 2],
    pub pressure: T,
}

/// Samples traction, conormal derivative and normal derivative at the 3-point
/// Gauss nodes of every edge of loop `tag` (or of all obstacle loops when
/// `tag` is `None`).
pub fn boundary_stress_and_normal_derivative<T: Scalar>(
    field: &StokesField<T>,
    mesh: &TriangleMesh,
    dofs: &DofMap,
    alpha: f64,
    tag: Option<BoundaryTag>,
) -> Result<Vec<BoundarySample<T>>> {
    if let Some(tag) = tag {
        check_tag(mesh, tag)?;
    }
    dofs.check(mesh)?;
    let selected = |t: BoundaryTag| match tag {
        Some(want) => t == want,
        None => t.is_gamma(),
    };
    let mut out = Vec::new();
    for (idx, e) in mesh.boundary_edges.iter().enumerate() {
        if !selected(e.tag) {
            continue;
        }
        let geo = TriangleGeometry::new(mesh.triangle_points(e.triangle));
        let (n, len) = mesh.edge_normal(e);
        let (a, b) = (mesh.vertices[e.vertices[0]], mesh.vertices[e.vertices[1]]);
        for &(s, w) in &EDGE_GAUSS3 {
            let x = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let bary = geo.bary_of(x);
            let du = field.velocity_gradient(mesh, dofs, &geo, e.triangle, bary);
            let p = field.pressure_at(mesh, e.triangle, bary);
            let dn = [
                du[0][0] * n[0] + du[0][1] * n[1],
                du[1][0] * n[0] + du[1][1] * n[1],
            ];
            // (Duᵀ)n
            let dtn = [
                du[0][0] * n[0] + du[1][0] * n[1],
                du[0][1] * n[0] + du[1][1] * n[1],
            ];
            let traction = [
                (dn[0] + dtn[0]) * alpha - p * n[0],
                (dn[1] + dtn[1]) * alpha - p * n[1],
            ];
            let conormal = [dn[0] * alpha - p * n[0], dn[1] * alpha - p * n[1]];
            out.push(BoundarySample {
                edge: idx,
                point: x,
                weight: w * len,
                normal: n,
                traction,
                conormal,
                normal_derivative: dn,
                pressure: p,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::Argument(
            "no boundary edges carry the requested tag".into(),
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate_p2;
    use crate::geometry::{generate_annulus_mesh, BoundaryCurve};

    fn setup() -> (TriangleMesh, DofMap) {
        let m =
            generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 48, 32, 0.15).unwrap();
        let d = DofMap::new(&m);
        (m, d)
    }

    #[test]
    fn fluxes_follow_the_divergence_theorem() {
        let (m, d) = setup();
        let c = interpolate_p2(&m, &d, |_| [1.0, 0.0], |_| 0.0);
        for tag in [BoundaryTag::Sigma, BoundaryTag::Gamma(0)] {
            assert!(boundary_integral_flux(&c, &m, &d, tag).unwrap().abs() < 1e-14);
        }
        // ∮ x·n = 2 × enclosed polygon area on the outer loop
        let id = interpolate_p2(&m, &d, |p| p, |_| 0.0);
        let flux = boundary_integral_flux(&id, &m, &d, BoundaryTag::Sigma).unwrap();
        let area = crate::geometry::polyline::loop_signed_area(&m.sigma_polyline());
        assert!((flux - 2.0 * area).abs() < 1e-12);
        assert!(boundary_integral_flux(&id, &m, &d, BoundaryTag::Gamma(3)).is_err());
    }

    #[test]
    fn pure_pressure_gives_minus_normal() {
        let (m, d) = setup();
        let f = interpolate_p2(&m, &d, |_| [0.0, 0.0], |_| 1.0);
        for s in boundary_stress_and_normal_derivative(&f, &m, &d, 1.0, None).unwrap() {
            assert!((s.traction[0] + s.normal[0]).abs() < 1e-13);
            assert!((s.traction[1] + s.normal[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn linear_shear_is_exact() {
        let (m, d) = setup();
        let f = interpolate_p2(&m, &d, |p| [p[1], 0.0], |_| 0.0);
        for s in boundary_stress_and_normal_derivative(&f, &m, &d, 1.0, Some(BoundaryTag::Sigma))
            .unwrap()
        {
            let n = s.normal;
            // Du = [[0,1],[0,0]], (Du + Duᵀ)n = (n_y, n_x)
            assert!((s.traction[0] - n[1]).abs() < 1e-12 && (s.traction[1] - n[0]).abs() < 1e-12);
            assert!(
                (s.normal_derivative[0] - n[1]).abs() < 1e-12
                    && s.normal_derivative[1].abs() < 1e-12
            );
        }
    }
}
