use std::f64::consts::TAU;

use ccbm_core::geometry::polyline::is_simple_loop;
use ccbm_core::geometry::{
    deform_mesh, generate_annulus_mesh, hausdorff_distance, BoundaryCurve, CatalogShape,
    DeformationField, Point, TriangleMesh,
};
use proptest::prelude::*;

fn annulus() -> TriangleMesh {
    generate_annulus_mesh(&[BoundaryCurve::circle([0.0, 0.0], 0.5)], 48, 32, 0.12).unwrap()
}

fn smooth_field(mesh: &TriangleMesh, a: [f64; 4]) -> DeformationField {
    // vanishes on the unit circle through the factor (1 - |x|^2)
    DeformationField::from_fn(mesh, |p| {
        let w = 1.0 - p[0] * p[0] - p[1] * p[1];
        [w * (a[0] + a[1] * p[1]), w * (a[2] + a[3] * p[0] * p[1])]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn deformation_composes_linearly(
        a in prop::array::uniform4(-0.2f64..0.2),
        t1 in 0.0f64..0.1,
        t2 in 0.0f64..0.1,
    ) {
        let m = annulus();
        let v = smooth_field(&m, a);
        let once = deform_mesh(&m, &v, t1 + t2, 0.0).unwrap();
        let twice = deform_mesh(&deform_mesh(&m, &v, t1, 0.0).unwrap(), &v, t2, 0.0).unwrap();
        for (p, q) in once.vertices.iter().zip(&twice.vertices) {
            prop_assert!((p[0] - q[0]).abs() <= 1e-14 && (p[1] - q[1]).abs() <= 1e-14);
        }
        prop_assert_eq!(once.triangles, m.triangles);
    }

    #[test]
    fn catalog_samples_are_simple(n in 64usize..400, k in 0usize..4) {
        let shape = [CatalogShape::PeanutC1, CatalogShape::BeanC2, CatalogShape::KiteC3, CatalogShape::StarC4][k];
        let pts = BoundaryCurve::catalog(shape).sample(n).unwrap();
        prop_assert!(is_simple_loop(&pts));
    }

    #[test]
    fn catalog_curves_are_periodic(t in -10.0f64..10.0, k in 0usize..4) {
        let shape = [CatalogShape::PeanutC1, CatalogShape::BeanC2, CatalogShape::KiteC3, CatalogShape::StarC4][k];
        let c = BoundaryCurve::catalog(shape);
        let (p, q) = (c.point_at(t), c.point_at(t + TAU));
        prop_assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_is_a_metric(
        a in random_loop(),
        b in random_loop(),
        c in random_loop(),
    ) {
        let (a, b, c) = (vec![a], vec![b], vec![c]);
        let ab = hausdorff_distance(&a, &b).unwrap();
        let ba = hausdorff_distance(&b, &a).unwrap();
        let bc = hausdorff_distance(&b, &c).unwrap();
        let ac = hausdorff_distance(&a, &c).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(ac <= ab + bc + 1e-12);
    }
}

// star-shaped loops with random radii
fn random_loop() -> impl Strategy<Value = Vec<Point>> {
    (
        prop::collection::vec(0.1f64..0.6, 5..24),
        -0.2f64..0.2,
        -0.2f64..0.2,
    )
        .prop_map(|(r, cx, cy)| {
            let n = r.len();
            r.iter()
                .enumerate()
                .map(|(k, &rk)| {
                    let th = TAU * k as f64 / n as f64;
                    [cx + rk * th.cos(), cy + rk * th.sin()]
                })
                .collect()
        })
}

fn brute_force_directed(a: &[Point], b: &[Point], per_segment: usize) -> f64 {
    let dense = |pts: &[Point]| -> Vec<Point> {
        let n = pts.len();
        (0..n)
            .flat_map(|i| {
                let (p, q) = (pts[i], pts[(i + 1) % n]);
                (0..per_segment).map(move |k| {
                    let s = k as f64 / per_segment as f64;
                    [p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])]
                })
            })
            .collect()
    };
    let (da, db) = (dense(a), dense(b));
    da.iter()
        .map(|p| {
            db.iter()
                .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

#[test]
fn square_versus_inscribed_circle_matches_dense_sampling() {
    let square: BoundaryCurve = "square 0 0 0.4".parse().unwrap();
    let sq = square.sample(40).unwrap();
    let circle = BoundaryCurve::circle([0.0, 0.0], 0.4).sample(200).unwrap();
    let exact = hausdorff_distance(&[sq.clone()], &[circle.clone()]).unwrap();
    // 10^4 samples on each curve
    let oracle =
        brute_force_directed(&sq, &circle, 250).max(brute_force_directed(&circle, &sq, 50));
    assert!((exact - oracle).abs() < 2e-4, "{exact} vs {oracle}");
    // corner to circle: 0.4 (sqrt 2 - 1)
    assert!((exact - 0.4 * (2f64.sqrt() - 1.0)).abs() < 1e-3);
}
