use ccbm_core::data::{
    add_noise, generate_measurement, interpolate_trace, CauchyData, DataResolution, GRule,
};
use ccbm_core::geometry::{BoundaryCurve, CatalogShape};
use proptest::prelude::*;

fn coarse() -> DataResolution {
    DataResolution::finer_than(60, 40, 0.12, 2)
}

fn circle() -> Vec<BoundaryCurve> {
    vec![BoundaryCurve::circle([0.0, 0.0], 0.5)]
}

#[test]
fn noiseless_flux_vanishes_for_catalog_truths() {
    let truths = [
        BoundaryCurve::circle([0.0, 0.0], 0.5),
        BoundaryCurve::catalog(CatalogShape::PeanutC1),
        BoundaryCurve::catalog(CatalogShape::BeanC2),
        BoundaryCurve::catalog(CatalogShape::KiteC3),
        BoundaryCurve::catalog(CatalogShape::StarC4),
    ];
    for truth in truths {
        let d = generate_measurement(&[truth], GRule::Rotational, 1.0, coarse()).unwrap();
        let flux = d.flux.unwrap();
        assert!(flux.abs() <= 1e-8, "flux {flux}");
        d.validate().unwrap();
    }
}

#[test]
fn zero_flux_rule_gives_zero_data() {
    let d = generate_measurement(&circle(), GRule::Zero, 1.0, coarse()).unwrap();
    assert!(d
        .values
        .iter()
        .all(|v| v[0].abs() < 1e-14 && v[1].abs() < 1e-14));
}

#[test]
fn data_converge_under_refinement() {
    // The traces live on different node sets, so compare through the
    // interpolant at common angles.
    let sample = |k: usize| {
        let res = DataResolution::finer_than(60, 40, 0.12, k);
        generate_measurement(&circle(), GRule::Rotational, 1.0, res).unwrap()
    };
    let (d1, d2, d4) = (sample(1), sample(2), sample(4));
    let diff = |a: &CauchyData, b: &CauchyData| {
        (0..720)
            .map(|i| {
                let th = i as f64 * std::f64::consts::TAU / 720.0;
                let (x, y) = (interpolate_trace(a, th), interpolate_trace(b, th));
                (x[0] - y[0]).abs().max((x[1] - y[1]).abs())
            })
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (diff(&d1, &d4), diff(&d2, &d4));
    assert!(e2 < 0.5 * e1, "{e1} -> {e2}");
    assert!(e2 < 1e-3, "{e2}");
}

#[test]
fn measurement_nodes_avoid_inversion_nodes() {
    let d = generate_measurement(&circle(), GRule::Rotational, 1.0, coarse()).unwrap();
    let n_inv = 60.0;
    let step = std::f64::consts::TAU / n_inv;
    for &th in &d.theta {
        let r = (th / step).fract();
        assert!(
            r.min(1.0 - r) > 1e-3,
            "sample angle {th} sits on an inversion node"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn relative_noise_level_is_exact(seed in any::<u64>(), delta in 0.0f64..0.5) {
        let n = 97;
        let theta: Vec<f64> = (0..n).map(|i| i as f64 * std::f64::consts::TAU / n as f64).collect();
        let values = theta.iter().map(|t| [t.sin() + 0.3, (2.0 * t).cos()]).collect();
        let d = CauchyData::new(GRule::Rotational, theta, values).unwrap();
        let noisy = add_noise(&d, delta, seed).unwrap();
        let diff: Vec<[f64; 2]> = noisy.values.iter().zip(&d.values)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]]).collect();
        let rel = d.l2_norm_of(&diff) / d.l2_norm();
        prop_assert!((rel - delta).abs() <= 1e-12);
        prop_assert_eq!(&add_noise(&d, delta, seed).unwrap().values, &noisy.values);
    }
}
