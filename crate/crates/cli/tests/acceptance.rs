//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Failed criteria are reported but only fail the process when
//! `ACCEPTANCE_STRICT=1` is set; errors and panics always fail it.

use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use ccbm_cli::checks::{gradient_check, mms_check, FD_STEPS, MMS_MIN_ORDERS};
use ccbm_cli::{parse_config, run_experiment, CliError, RunConfig, RunSummary};
use ccbm_core::data::{add_noise, generate_measurement, CauchyData, DataResolution, GRule};
use ccbm_core::fem::{boundary_integral_flux, SparseMatrix};
use ccbm_core::geometry::polyline::convexity_ratio;
use ccbm_core::geometry::{generate_annulus_mesh, BoundaryCurve, BoundaryTag, CatalogShape};
use ccbm_core::inverse::{descent_energy, descent_field, directional_derivative, evaluate_shape};

/// Ten times the cost measured at the true circle on the 100/70 inversion
/// mesh with 4x finer data (6.3e-10).
const SELF_CONSISTENCY_TOL: f64 = 6.3e-9;

type Outcome = Result<(bool, String), CliError>;

fn config(truth: &str, init: &str, extra: &str) -> RunConfig {
    parse_config(&format!(
        "{extra}\n[truth]\ncurves = [\"{truth}\"]\n[initial]\ncurves = [\"{init}\"]\n"
    ))
    .expect("acceptance configs are valid")
}

fn run(cfg: &RunConfig, dir: &Path, name: &str) -> Result<RunSummary, CliError> {
    run_experiment(cfg, &dir.join(name))
}

fn benchmark_data() -> Result<CauchyData, CliError> {
    Ok(generate_measurement(
        &[BoundaryCurve::circle([0.0, 0.0], 0.5)],
        GRule::Rotational,
        1.0,
        DataResolution::finer_than(100, 70, TAU / 100.0, 4),
    )?)
}

fn mms() -> Outcome {
    let check = mms_check(1.0)?;
    let m = check.min_orders();
    Ok((
        check.passed(),
        format!(
            "min orders velocity L2 {:.2} (>= {}), H1 {:.2} (>= {}), pressure L2 {:.2} (>= {})",
            m[0], MMS_MIN_ORDERS[0], m[1], MMS_MIN_ORDERS[1], m[2], MMS_MIN_ORDERS[2]
        ),
    ))
}

fn gradient() -> Outcome {
    let cfg = config("circle 0 0 0.5", "circle 0 0 0.3", "");
    let check = gradient_check(&cfg)?;
    let k = FD_STEPS.len() - 1;
    let rel: Vec<String> = check
        .fields
        .iter()
        .map(|f| format!("{:.2e}", f.mismatch(k)))
        .collect();
    let settled = check.fields.iter().filter(|f| f.richardson_ok()).count();
    Ok((
        check.passed(),
        format!(
            "mismatch at t=1e-4: [{}] (<= 2e-2); Richardson settled {settled}/{}",
            rel.join(", "),
            check.fields.len()
        ),
    ))
}

fn self_consistency() -> Outcome {
    let data = benchmark_data()?;
    let j = |r: f64| -> Result<f64, CliError> {
        let m = generate_annulus_mesh(
            &[BoundaryCurve::circle([0.0, 0.0], r)],
            100,
            70,
            TAU / 100.0,
        )?;
        Ok(evaluate_shape(&m, 1.0, &data, &data.g)?.cost.j)
    };
    let (jt, jw) = (j(0.5)?, j(0.3)?);
    Ok((
        jt <= SELF_CONSISTENCY_TOL && jt <= 0.01 * jw,
        format!("J(truth) {jt:.3e} (<= {SELF_CONSISTENCY_TOL:e}), J(r=0.3) {jw:.3e}, ratio {:.2e} (<= 1e-2)", jt / jw),
    ))
}

fn monotone_fraction(s: &RunSummary, eps_j: f64) -> f64 {
    let steps = s.history.windows(2).count();
    let ok = s
        .history
        .windows(2)
        .filter(|w| w[1].j <= w[0].j + eps_j)
        .count();
    ok as f64 / steps.max(1) as f64
}

fn circle(dir: &Path) -> Outcome {
    let cfg = config("circle 0 0 0.5", "circle 0 0 0.3", "");
    let s = run(&cfg, dir, "circle")?;
    let h = s.final_hausdorff.unwrap_or(f64::INFINITY);
    let mono = monotone_fraction(&s, cfg.descent.eps_j);
    Ok((
        h <= 0.05 && mono >= 0.95,
        format!(
            "hausdorff {h:.3e} (<= 0.05), monotone {:.1}% (>= 95%), {} iterations, {}",
            100.0 * mono,
            s.iterations,
            s.termination
        ),
    ))
}

fn nonconvex(dir: &Path) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, shape) in [("c1", "peanut_c1"), ("c4", "star_c4")] {
        let s = run(&config(shape, "circle 0 0 0.3", ""), dir, name)?;
        let h = s.final_hausdorff.unwrap_or(f64::INFINITY);
        let ratio = convexity_ratio(&s.final_shape[0]);
        pass &= h <= 0.15 && ratio > 1.02;
        parts.push(format!(
            "{name}: hausdorff {h:.3} (<= 0.15), hull ratio {ratio:.3} (> 1.02)"
        ));
    }
    Ok((pass, parts.join("; ")))
}

fn noise(dir: &Path) -> Outcome {
    let clean = run(
        &config("circle 0 0 0.5", "circle 0 0 0.3", ""),
        dir,
        "noise_0",
    )?;
    let noisy_cfg = |r: f64| {
        config(
            &format!("circle 0 0 {r}"),
            "circle 0 0 0.3",
            "[data]\ndelta = 0.15",
        )
    };
    let large = run(&noisy_cfg(0.5), dir, "noise_15_r050")?;
    let small = run(&noisy_cfg(0.25), dir, "noise_15_r025")?;
    let (hl, hs) = (
        large.final_hausdorff.unwrap(),
        small.final_hausdorff.unwrap(),
    );
    Ok((
        large.final_j > clean.final_j && hs >= hl,
        format!(
            "J(15%) {:.3e} > J(0) {:.3e}: {}; hausdorff r=0.25 {hs:.4} >= r=0.5 {hl:.4}: {}",
            large.final_j,
            clean.final_j,
            large.final_j > clean.final_j,
            hs >= hl
        ),
    ))
}

fn quad(m: &SparseMatrix<f64>, x: &[f64]) -> f64 {
    m.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
}

fn invariants(dir: &Path) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    let res = DataResolution::finer_than(100, 70, TAU / 100.0, 4);
    let mut flux: f64 = 0.0;
    for truth in [
        BoundaryCurve::circle([0.0, 0.0], 0.5),
        BoundaryCurve::catalog(CatalogShape::PeanutC1),
        BoundaryCurve::catalog(CatalogShape::BeanC2),
        BoundaryCurve::catalog(CatalogShape::KiteC3),
        BoundaryCurve::catalog(CatalogShape::StarC4),
    ] {
        let d = generate_measurement(&[truth], GRule::Rotational, 1.0, res)?;
        flux = flux.max(d.flux.unwrap_or(f64::INFINITY).abs());
    }
    pass &= flux <= 1e-8;
    notes.push(format!("flux {flux:.1e}"));

    let data = benchmark_data()?;
    let mesh = generate_annulus_mesh(
        &[BoundaryCurve::circle([0.0, 0.0], 0.3)],
        100,
        70,
        TAU / 100.0,
    )?;
    let ev = evaluate_shape(&mesh, 1.0, &data, &data.g)?;
    let ops = &ev.ops;
    let nvel = ops.dofs.num_velocity();
    let v_flux = boundary_integral_flux(&ev.adjoint, &mesh, &ops.dofs, BoundaryTag::Sigma)?;
    let im = ev.state.imag_part();
    let mut p_full = vec![0.0; nvel];
    p_full.extend_from_slice(&im.pressure);
    let int_p: f64 = ops.pressure_mass.matvec(&p_full)[nvel..].iter().sum();
    let (re_v, im_v) = (
        ev.adjoint.real_part().to_solution(),
        ev.adjoint.imag_part().to_solution(),
    );
    let h1 = (quad(&ops.stiffness, &re_v)
        + quad(&ops.stiffness, &im_v)
        + quad(&ops.velocity_mass, &re_v)
        + quad(&ops.velocity_mass, &im_v))
    .sqrt();
    let bound = 1e-6 * (h1 + ev.cost.p_i_norm_sq.sqrt());
    let compat = (v_flux + int_p).norm();
    pass &= compat <= bound;
    notes.push(format!(
        "adjoint compatibility {compat:.1e} (<= {bound:.1e})"
    ));

    let v = descent_field(&mesh, &ev.gradient, 0.5)?;
    let (dj, energy) = (
        directional_derivative(&ev.gradient, &mesh, &v),
        descent_energy(&mesh, &v, 0.5),
    );
    let sign = (dj + energy).abs() / energy;
    pass &= dj <= 0.0 && sign <= 1e-10;
    notes.push(format!("descent identity {sign:.1e}"));

    let truth_mesh = generate_annulus_mesh(
        &[BoundaryCurve::circle([0.0, 0.0], 0.5)],
        100,
        70,
        TAU / 100.0,
    )?;
    let g_truth = evaluate_shape(&truth_mesh, 1.0, &data, &data.g)?
        .gradient
        .max_abs();
    let g_bound = 10.0 * SELF_CONSISTENCY_TOL.sqrt();
    pass &= g_truth <= g_bound;
    notes.push(format!("stationarity {g_truth:.1e} (<= {g_bound:.1e})"));

    let mut noise_err: f64 = 0.0;
    for seed in 0..8 {
        let noisy = add_noise(&data, 0.15, seed)?;
        let diff: Vec<[f64; 2]> = noisy
            .values
            .iter()
            .zip(&data.values)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
            .collect();
        noise_err = noise_err.max((data.l2_norm_of(&diff) / data.l2_norm() - 0.15).abs());
    }
    pass &= noise_err <= 1e-12;
    notes.push(format!("noise scaling {noise_err:.1e}"));

    let cfg = config(
        "circle 0 0 0.5",
        "circle 0 0 0.3",
        "[data]\ndelta = 0.15\n[descent]\nmax_iters = 3",
    );
    run(&cfg, dir, "det_a")?;
    run(&cfg, dir, "det_b")?;
    let same = ["history.csv", "data.txt", "mesh_final.txt"]
        .iter()
        .all(|f| {
            std::fs::read(dir.join("det_a").join(f)).ok()
                == std::fs::read(dir.join("det_b").join(f)).ok()
        });
    pass &= same;
    notes.push(format!(
        "determinism {}",
        if same { "byte-exact" } else { "differs" }
    ));

    Ok((pass, notes.join(", ")))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let dir = dir.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 MMS convergence orders", Box::new(mms)),
        ("2 shape gradient vs finite differences", Box::new(gradient)),
        (
            "3 self-consistency at the true obstacle",
            Box::new(self_consistency),
        ),
        ("4 circle reconstruction", Box::new(|| circle(dir))),
        (
            "5 nonconvex gallery (C.I, C.IV)",
            Box::new(|| nonconvex(dir)),
        ),
        ("6 noise orderings", Box::new(|| noise(dir))),
        ("7 invariant suite", Box::new(|| invariants(dir))),
    ];
    let mut failed = 0;
    let mut errors = 0;
    for (name, check) in &criteria {
        let start = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(Ok((true, msg))) => println!("PASS  criterion {name}: {msg} [{secs:.0} s]"),
            Ok(Ok((false, msg))) => {
                failed += 1;
                println!("FAIL  criterion {name}: {msg} [{secs:.0} s]");
            }
            Ok(Err(e)) => {
                errors += 1;
                println!("FAIL  criterion {name}: error: {e} [{secs:.0} s]");
            }
            Err(_) => {
                errors += 1;
                println!("FAIL  criterion {name}: panicked [{secs:.0} s]");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed - errors,
        criteria.len()
    );
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if errors > 0 || (strict && failed > 0) {
        std::process::exit(1);
    }
}
