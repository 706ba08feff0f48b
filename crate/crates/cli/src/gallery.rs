use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::experiment::{run_experiment, Overrides};
use crate::{parse_config, CliError};

pub const GALLERY_HEADER: &str = "case,delta,final_J,final_hausdorff,iters,termination";

/// One line of the combined gallery table. Failed cases keep their name and
/// carry the error in `termination`.
#[derive(Clone, Debug, PartialEq)]
pub struct GalleryRow {
    pub case: String,
    pub delta: f64,
    pub final_j: f64,
    pub final_hausdorff: Option<f64>,
    pub iters: usize,
    pub termination: String,
}

impl GalleryRow {
    pub fn succeeded(&self) -> bool {
        matches!(self.termination.as_str(), "eps_J" | "eps_T" | "max_iters")
    }
}

fn config_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    Ok(files)
}

fn run_case(path: &Path, out: &Path, overrides: Overrides) -> GalleryRow {
    let case = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let failed = |delta: f64, e: CliError| {
        log::error!("{case}: {e}");
        GalleryRow {
            case: case.clone(),
            delta,
            final_j: f64::NAN,
            final_hausdorff: None,
            iters: 0,
            termination: format!("error: {}", e.to_string().replace([',', '\n'], ";")),
        }
    };
    let mut cfg = match fs::read_to_string(path)
        .map_err(CliError::from)
        .and_then(|t| parse_config(&t))
    {
        Ok(c) => c,
        Err(e) => return failed(f64::NAN, e),
    };
    overrides.apply(&mut cfg);
    match run_experiment(&cfg, &out.join(&case)) {
        Ok(s) => GalleryRow {
            case,
            delta: cfg.delta,
            final_j: s.final_j,
            final_hausdorff: s.final_hausdorff,
            iters: s.iterations,
            termination: s.termination.to_string(),
        },
        Err(e) => failed(cfg.delta, e),
    }
}

/// Runs every `*.toml` in `dir` in parallel, each into `out/<file stem>`, and
/// writes `out/gallery.csv`. Failing cases are recorded and do not stop the
/// batch.
pub fn run_gallery(
    dir: &Path,
    out: &Path,
    overrides: Overrides,
) -> Result<Vec<GalleryRow>, CliError> {
    let files = config_files(dir)?;
    fs::create_dir_all(out)?;
    let rows: Vec<GalleryRow> = files
        .par_iter()
        .map(|p| run_case(p, out, overrides))
        .collect();
    let mut csv = String::from(GALLERY_HEADER);
    csv.push('\n');
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{:e},{},{},{}",
            r.case,
            r.delta,
            r.final_j,
            r.final_hausdorff
                .map(|h| format!("{h:e}"))
                .unwrap_or_else(|| "nan".into()),
            r.iters,
            r.termination
        );
    }
    fs::write(out.join("gallery.csv"), csv)?;
    Ok(rows)
}
