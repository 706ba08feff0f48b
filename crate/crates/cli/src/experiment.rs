use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;
use std::time::{Duration, Instant};

use ccbm_core::data::{
    add_noise, generate_measurement, read_cauchy_data, write_cauchy_data, CauchyData,
    DataResolution,
};
use ccbm_core::geometry::polyline::is_simple_loop;
use ccbm_core::geometry::{write_mesh, write_polyline, Point, TriangleMesh};
use ccbm_core::inverse::{
    run_reconstruction, write_history_csv, IterationRecord, ReconstructionSettings, Termination,
};

use crate::{CliError, RunConfig};

/// Points per truth curve used for Hausdorff distances.
pub const TRUTH_SAMPLES: usize = 512;

/// Command-line values that take precedence over a configuration file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.max_iters {
            cfg.descent.max_iters = m;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub final_j: f64,
    pub final_hausdorff: Option<f64>,
    /// Index of the last recorded iteration.
    pub iterations: usize,
    pub wall_time: Duration,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
    pub final_shape: Vec<Vec<Point>>,
}

pub fn settings(cfg: &RunConfig) -> ReconstructionSettings {
    ReconstructionSettings {
        alpha: cfg.alpha,
        descent: cfg.descent,
        sigma_nodes: cfg.sigma_nodes,
        gamma_nodes: cfg.gamma_nodes,
        h: cfg.h,
    }
}

/// Synthetic (or loaded) measurement with the configured noise applied.
pub fn prepare_data(cfg: &RunConfig) -> Result<CauchyData, CliError> {
    let clean = match &cfg.data_file {
        Some(path) => read_cauchy_data(BufReader::new(File::open(path)?), cfg.g)?,
        None => generate_measurement(
            &cfg.truth,
            cfg.g,
            cfg.alpha,
            DataResolution::finer_than(cfg.sigma_nodes, cfg.gamma_nodes, cfg.h, cfg.refinement),
        )?,
    };
    Ok(add_noise(&clean, cfg.delta, cfg.seed)?)
}

pub fn truth_polylines(cfg: &RunConfig) -> Result<Vec<Vec<Point>>, CliError> {
    Ok(cfg
        .truth
        .iter()
        .map(|c| c.sample(TRUTH_SAMPLES))
        .collect::<ccbm_core::Result<_>>()?)
}

fn write_config_echo(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    fs::write(out.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

fn write_data(data: &CauchyData, out: &Path) -> Result<(), CliError> {
    write_cauchy_data(data, BufWriter::new(File::create(out.join("data.txt"))?))?;
    Ok(())
}

/// Writes the config echo and the measurement file to `out`.
pub fn generate_data(cfg: &RunConfig, out: &Path) -> Result<CauchyData, CliError> {
    write_config_echo(cfg, out)?;
    let data = prepare_data(cfg)?;
    write_data(&data, out)?;
    Ok(data)
}

fn write_shape(dir: &Path, stem: &str, loops: &[Vec<Point>]) -> Result<(), CliError> {
    for (k, pts) in loops.iter().enumerate() {
        if !is_simple_loop(pts) {
            return Err(CliError::Core(ccbm_core::Error::Geometry(format!(
                "{stem}: obstacle {k} is not a simple closed loop"
            ))));
        }
        write_polyline(
            pts,
            BufWriter::new(File::create(dir.join(format!("{stem}_{k}.txt")))?),
        )?;
    }
    Ok(())
}

fn write_mesh_file(mesh: &TriangleMesh, path: &Path) -> Result<(), CliError> {
    write_mesh(mesh, BufWriter::new(File::create(path)?))?;
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_else(|| "nan".into())
}

/// Generates data, runs the reconstruction and writes every artifact to
/// `out`: `config.toml`, `data.txt`, `truth_<k>.txt`, `history.csv`,
/// `shapes/iter_<n>_<k>.txt`, `mesh_initial.txt`, `mesh_final.txt` and
/// `summary.txt`. Partial artifacts are kept when the run fails.
pub fn run_experiment(cfg: &RunConfig, out: &Path) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let data = generate_data(cfg, out)?;
    let truth = truth_polylines(cfg)?;
    if !truth.is_empty() {
        write_shape(out, "truth", &truth)?;
    }
    let shapes = out.join("shapes");
    fs::create_dir_all(&shapes)?;

    let mut io_error: Option<CliError> = None;
    let log_every = cfg.log_every;
    let mut observer = |rec: &IterationRecord, mesh: &TriangleMesh| {
        if rec.iter == 0 {
            if let Err(e) = write_mesh_file(mesh, &out.join("mesh_initial.txt")) {
                io_error.get_or_insert(e);
            }
        }
        if (log_every > 0 && rec.iter % log_every == 0) || rec.iter == 0 {
            log::info!(
                "iter {:4}  J = {:.6e}  |Gn| = {:.3e}  t = {:.3e}{}",
                rec.iter,
                rec.j,
                rec.grad_norm,
                rec.step,
                rec.hausdorff
                    .map(|h| format!("  hausdorff = {h:.4}"))
                    .unwrap_or_default()
            );
            if let Err(e) = write_shape(
                &shapes,
                &format!("iter_{:04}", rec.iter),
                &mesh.gamma_polylines(),
            ) {
                io_error.get_or_insert(e);
            }
        }
    };
    let truth_ref = (!truth.is_empty()).then_some(truth.as_slice());
    let result = run_reconstruction(
        &settings(cfg),
        &data,
        &cfg.initial,
        truth_ref,
        &mut observer,
    );
    if let Some(e) = io_error {
        return Err(e);
    }
    let (history, mesh, outcome) = match result {
        Ok(r) => (r.history, Some(r.mesh), Ok(r.termination)),
        Err(e) => (e.history, e.mesh, Err(e.error)),
    };
    write_history_csv(
        &history,
        BufWriter::new(File::create(out.join("history.csv"))?),
    )?;
    let last = history.last();
    let mut summary = String::new();
    match &outcome {
        Ok(t) => {
            let _ = writeln!(summary, "status = ok\ntermination = {t}");
        }
        Err(e) => {
            let _ = writeln!(summary, "status = error\nerror = {e}");
        }
    }
    let _ = writeln!(summary, "iterations = {}", last.map_or(0, |r| r.iter));
    let _ = writeln!(summary, "final_J = {}", fmt_opt(last.map(|r| r.j)));
    let _ = writeln!(
        summary,
        "final_hausdorff = {}",
        fmt_opt(last.and_then(|r| r.hausdorff))
    );
    let _ = writeln!(
        summary,
        "wall_time_s = {:.3}",
        start.elapsed().as_secs_f64()
    );
    fs::write(out.join("summary.txt"), summary)?;

    let final_shape = mesh
        .as_ref()
        .map(|m| m.gamma_polylines())
        .unwrap_or_default();
    if let (Some(m), Some(r)) = (&mesh, last) {
        write_mesh_file(m, &out.join("mesh_final.txt"))?;
        write_shape(&shapes, &format!("iter_{:04}", r.iter), &final_shape)?;
    }
    match outcome {
        Ok(termination) => {
            let last = last.expect("successful runs record the initial evaluation");
            Ok(RunSummary {
                final_j: last.j,
                final_hausdorff: last.hausdorff,
                iterations: last.iter,
                wall_time: start.elapsed(),
                termination,
                final_shape,
                history,
            })
        }
        Err(e) => Err(CliError::Run {
            message: e.to_string(),
            iterations: history.len(),
        }),
    }
}
