use std::fmt;
use std::io::Write;

use super::descent::{descent_field, step_size};
use super::evaluate::evaluate_shape;
use super::DescentConfig;
use crate::data::CauchyData;
use crate::error::{Error, Result};
use crate::geometry::{
    deform_mesh, generate_annulus_mesh, hausdorff_distance, remesh, BoundaryCurve, Point,
    TriangleMesh, AREA_FLOOR_FRACTION,
};

/// Maximum number of step halvings before the step is declared too small.
pub const MAX_BACKTRACKS: usize = 30;

pub const HISTORY_HEADER: &str = "iter,J,ui_norm,pi_norm,grad_norm,step,hausdorff,backtracks";

/// Inversion mesh resolution and model parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructionSettings {
    pub alpha: f64,
    pub descent: DescentConfig,
    pub sigma_nodes: usize,
    pub gamma_nodes: usize,
    pub h: f64,
}

impl Default for ReconstructionSettings {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            descent: DescentConfig::default(),
            sigma_nodes: 100,
            gamma_nodes: 70,
            h: std::f64::consts::TAU / 100.0,
        }
    }
}

/// One row of the optimization history, describing shape `Ω^k` and the step
/// taken from it (zero on the final row).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub j: f64,
    pub ui_norm: f64,
    pub pi_norm: f64,
    pub grad_norm: f64,
    pub step: f64,
    pub hausdorff: Option<f64>,
    pub backtracks: usize,
    /// The mesh was rebuilt after this step, so the next cost change is not
    /// used for the stopping test.
    pub remeshed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Cost change below `eps_j`.
    EpsJ,
    /// Step below `eps_t`, including exhausted backtracking.
    EpsT,
    MaxIters,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::EpsJ => "eps_J",
            Termination::EpsT => "eps_T",
            Termination::MaxIters => "max_iters",
        })
    }
}

#[derive(Debug)]
pub struct Reconstruction {
    pub history: Vec<IterationRecord>,
    /// Mesh of the last evaluated shape.
    pub mesh: TriangleMesh,
    pub initial_mesh: TriangleMesh,
    pub termination: Termination,
}

impl Reconstruction {
    pub fn final_record(&self) -> &IterationRecord {
        self.history
            .last()
            .expect("history always holds the initial evaluation")
    }
}

/// A failed run, with whatever history was produced before the failure.
#[derive(Debug, thiserror::Error)]
#[error("reconstruction failed after {} iterations: {error}", history.len())]
pub struct ReconstructionError {
    pub error: Error,
    pub history: Vec<IterationRecord>,
    pub mesh: Option<TriangleMesh>,
}

/// Runs the descent loop from the obstacles `initial`.
///
/// `observer` sees every recorded iteration together with the mesh it was
/// evaluated on. `truth`, when given, is used only to report Hausdorff
/// distances.
pub fn run_reconstruction(
    settings: &ReconstructionSettings,
    data: &CauchyData,
    initial: &[BoundaryCurve],
    truth: Option<&[Vec<Point>]>,
    observer: &mut dyn FnMut(&IterationRecord, &TriangleMesh),
) -> std::result::Result<Reconstruction, Box<ReconstructionError>> {
    let fail = |error, history, mesh| {
        Box::new(ReconstructionError {
            error,
            history,
            mesh,
        })
    };
    if let Err(e) = check_settings(settings, data) {
        return Err(fail(e, Vec::new(), None));
    }
    let mesh = match generate_annulus_mesh(
        initial,
        settings.sigma_nodes,
        settings.gamma_nodes,
        settings.h,
    ) {
        Ok(m) => m,
        Err(e) => return Err(fail(e, Vec::new(), None)),
    };
    let initial_mesh = mesh.clone();
    let mut state = LoopState {
        mesh,
        history: Vec::new(),
    };
    match descend(settings, data, truth, observer, &mut state) {
        Ok(termination) => Ok(Reconstruction {
            history: state.history,
            mesh: state.mesh,
            initial_mesh,
            termination,
        }),
        Err(e) => Err(fail(e, state.history, Some(state.mesh))),
    }
}

fn check_settings(settings: &ReconstructionSettings, data: &CauchyData) -> Result<()> {
    settings.descent.validate()?;
    if !(settings.alpha > 0.0) {
        return Err(Error::Config(format!(
            "alpha must be positive, got {}",
            settings.alpha
        )));
    }
    data.validate()?;
    if let Some(hd) = data.mesh_width {
        if (hd - settings.h).abs() <= 1e-12 * settings.h {
            return Err(Error::Config(format!(
                "inversion mesh width {} equals the width used to generate the data; \
                 synthetic data must come from a finer, different discretization",
                settings.h
            )));
        }
    }
    Ok(())
}

struct LoopState {
    mesh: TriangleMesh,
    history: Vec<IterationRecord>,
}

fn descend(
    settings: &ReconstructionSettings,
    data: &CauchyData,
    truth: Option<&[Vec<Point>]>,
    observer: &mut dyn FnMut(&IterationRecord, &TriangleMesh),
    st: &mut LoopState,
) -> Result<Termination> {
    let cfg = settings.descent;
    let floor = AREA_FLOOR_FRACTION * st.mesh.median_triangle_area();
    let mut prev_j: Option<f64> = None;
    let mut compare_j = true;
    let mut k = 0;
    loop {
        let ev = evaluate_shape(&st.mesh, settings.alpha, data, &data.g)?;
        let hausdorff = match truth {
            Some(t) => Some(hausdorff_distance(&st.mesh.gamma_polylines(), t)?),
            None => None,
        };
        let mut rec = IterationRecord {
            iter: k,
            j: ev.cost.j,
            ui_norm: ev.cost.u_i_norm_sq.sqrt(),
            pi_norm: ev.cost.p_i_norm_sq.sqrt(),
            grad_norm: ev.gradient.l2_norm(),
            step: 0.0,
            hausdorff,
            backtracks: 0,
            remeshed: false,
        };
        let mut finish = |rec: IterationRecord, st: &mut LoopState, why: Termination| {
            observer(&rec, &st.mesh);
            st.history.push(rec);
            Ok(why)
        };
        if let Some(pj) = prev_j {
            if compare_j && (pj - rec.j).abs() < cfg.eps_j {
                return finish(rec, st, Termination::EpsJ);
            }
        }
        if k >= cfg.max_iters {
            return finish(rec, st, Termination::MaxIters);
        }
        let v = descent_field(&st.mesh, &ev.gradient, cfg.eta)?;
        let mut t = step_size(rec.j, &v, cfg.mu, &st.mesh);
        if !(t >= cfg.eps_t) {
            return finish(rec, st, Termination::EpsT);
        }
        let mut moved = None;
        loop {
            match deform_mesh(&st.mesh, &v, t, floor) {
                Ok(m) => {
                    moved = Some(m);
                    break;
                }
                Err(Error::StepTooLarge { .. }) if rec.backtracks < MAX_BACKTRACKS => {
                    rec.backtracks += 1;
                    t *= 0.5;
                }
                Err(Error::StepTooLarge { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        rec.step = t;
        let Some(next) = moved.filter(|_| t >= cfg.eps_t) else {
            return finish(rec, st, Termination::EpsT);
        };
        observer(&rec, &st.mesh);
        st.mesh = next;
        compare_j = true;
        if cfg.remesh_every > 0 && (k + 1) % cfg.remesh_every == 0 {
            match remesh(&st.mesh) {
                Ok(m) => {
                    log::info!("iteration {k}: remeshed ({} triangles)", m.num_triangles());
                    st.mesh = m;
                    rec.remeshed = true;
                    compare_j = false;
                }
                Err(e) => log::warn!("iteration {k}: remeshing skipped: {e}"),
            }
        }
        st.history.push(rec);
        prev_j = Some(rec.j);
        k += 1;
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:e}")
}

/// Writes the history as CSV with [`HISTORY_HEADER`].
pub fn write_history_csv<W: Write>(history: &[IterationRecord], mut out: W) -> Result<()> {
    let mut s = String::from(HISTORY_HEADER);
    s.push('\n');
    for r in history {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.iter,
            fmt_num(r.j),
            fmt_num(r.ui_norm),
            fmt_num(r.pi_norm),
            fmt_num(r.grad_norm),
            fmt_num(r.step),
            r.hausdorff.map(fmt_num).unwrap_or_else(|| "nan".into()),
            r.backtracks
        ));
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}
