//! Run configuration files.
//!
//! ```toml
//! seed = 1
//! alpha = 1.0
//! sigma_nodes = 100
//! gamma_nodes = 70
//! log_every = 10
//!
//! [truth]
//! curves = ["circle 0 0 0.5"]
//!
//! [initial]
//! curves = ["circle 0 0 0.3"]
//!
//! [data]
//! g = "rotational"
//! delta = 0.0
//! refinement = 4
//!
//! [descent]
//! eta = 0.5
//! mu = 0.5
//! eps_j = 1e-12
//! eps_t = 1e-12
//! max_iters = 300
//! remesh_every = 0
//! ```
//!
//! Every key is optional except `initial.curves`, and `truth.curves` unless
//! `data.file` names an existing data file.

use std::path::PathBuf;

use ccbm_core::data::GRule;
use ccbm_core::geometry::BoundaryCurve;
use ccbm_core::inverse::DescentConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MIN_SIGMA_NODES: usize = 16;
pub const MIN_GAMMA_NODES: usize = 8;

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    alpha: Option<f64>,
    sigma_nodes: Option<usize>,
    gamma_nodes: Option<usize>,
    h: Option<f64>,
    log_every: Option<usize>,
    out: Option<PathBuf>,
    #[serde(default)]
    truth: CurveSection,
    #[serde(default)]
    initial: CurveSection,
    #[serde(default)]
    data: DataSection,
    #[serde(default)]
    descent: DescentSection,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CurveSection {
    #[serde(default)]
    curves: Vec<String>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DataSection {
    g: Option<String>,
    delta: Option<f64>,
    refinement: Option<usize>,
    file: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DescentSection {
    eta: Option<f64>,
    mu: Option<f64>,
    eps_j: Option<f64>,
    eps_t: Option<f64>,
    max_iters: Option<usize>,
    remesh_every: Option<usize>,
}

/// A validated experiment description with all defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub truth: Vec<BoundaryCurve>,
    pub initial: Vec<BoundaryCurve>,
    pub g: GRule,
    pub alpha: f64,
    pub delta: f64,
    pub seed: u64,
    pub sigma_nodes: usize,
    pub gamma_nodes: usize,
    /// Inversion mesh width.
    pub h: f64,
    /// Data mesh is this many times finer than the inversion mesh.
    pub refinement: usize,
    /// Existing measurement file used instead of synthetic data.
    pub data_file: Option<PathBuf>,
    pub descent: DescentConfig,
    pub out: Option<PathBuf>,
    /// Write the shape every this many iterations; 0 keeps only the first
    /// and last.
    pub log_every: usize,
}

fn key_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{key}: {msg}"))
}

fn curves(key: &str, list: &[String]) -> Result<Vec<BoundaryCurve>, CliError> {
    list.iter()
        .map(|s| s.parse().map_err(|e| key_err(key, e)))
        .collect()
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string().trim_end().to_string()))?;
    let d = DescentConfig::default();
    let sigma_nodes = raw.sigma_nodes.unwrap_or(100);
    let descent = DescentConfig {
        eta: raw.descent.eta.unwrap_or(d.eta),
        mu: raw.descent.mu.unwrap_or(d.mu),
        eps_j: raw.descent.eps_j.unwrap_or(d.eps_j),
        eps_t: raw.descent.eps_t.unwrap_or(d.eps_t),
        max_iters: raw.descent.max_iters.unwrap_or(d.max_iters),
        remesh_every: raw.descent.remesh_every.unwrap_or(d.remesh_every),
    };
    let g = match &raw.data.g {
        Some(s) => s.parse().map_err(|e| key_err("data.g", e))?,
        None => GRule::Rotational,
    };
    let cfg = RunConfig {
        truth: curves("truth.curves", &raw.truth.curves)?,
        initial: curves("initial.curves", &raw.initial.curves)?,
        g,
        alpha: raw.alpha.unwrap_or(1.0),
        delta: raw.data.delta.unwrap_or(0.0),
        seed: raw.seed.unwrap_or(1),
        sigma_nodes,
        gamma_nodes: raw.gamma_nodes.unwrap_or(70),
        h: raw.h.unwrap_or(std::f64::consts::TAU / sigma_nodes as f64),
        refinement: raw.data.refinement.unwrap_or(4),
        data_file: raw.data.file.clone(),
        descent,
        out: raw.out.clone(),
        log_every: raw.log_every.unwrap_or(10),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(key_err(
                "alpha",
                format!("must be positive, got {}", self.alpha),
            ));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(key_err(
                "data.delta",
                format!("must be non-negative, got {}", self.delta),
            ));
        }
        if self.sigma_nodes < MIN_SIGMA_NODES {
            return Err(key_err(
                "sigma_nodes",
                format!("must be at least {MIN_SIGMA_NODES}"),
            ));
        }
        if self.gamma_nodes < MIN_GAMMA_NODES {
            return Err(key_err(
                "gamma_nodes",
                format!("must be at least {MIN_GAMMA_NODES}"),
            ));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(key_err("h", format!("must be positive, got {}", self.h)));
        }
        if self.refinement < 2 {
            return Err(key_err(
                "data.refinement",
                "must be at least 2 so that data never come from the inversion mesh",
            ));
        }
        if self.initial.is_empty() {
            return Err(key_err("initial.curves", "at least one curve is required"));
        }
        if self.truth.is_empty() && self.data_file.is_none() {
            return Err(key_err(
                "truth.curves",
                "required unless data.file is given",
            ));
        }
        let d = &self.descent;
        if !(d.eta > 0.0 && d.eta <= 1.0) {
            return Err(key_err(
                "descent.eta",
                format!("must lie in (0, 1], got {}", d.eta),
            ));
        }
        for (key, v) in [
            ("descent.mu", d.mu),
            ("descent.eps_j", d.eps_j),
            ("descent.eps_t", d.eps_t),
        ] {
            if !(v > 0.0) {
                return Err(key_err(key, format!("must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// The configuration as a complete TOML document.
    pub fn to_toml(&self) -> String {
        let show = |c: &[BoundaryCurve]| c.iter().map(|c| c.to_string()).collect();
        let raw = RawConfig {
            seed: Some(self.seed),
            alpha: Some(self.alpha),
            sigma_nodes: Some(self.sigma_nodes),
            gamma_nodes: Some(self.gamma_nodes),
            h: Some(self.h),
            log_every: Some(self.log_every),
            out: self.out.clone(),
            truth: CurveSection {
                curves: show(&self.truth),
            },
            initial: CurveSection {
                curves: show(&self.initial),
            },
            data: DataSection {
                g: Some(self.g.to_string()),
                delta: Some(self.delta),
                refinement: Some(self.refinement),
                file: self.data_file.clone(),
            },
            descent: DescentSection {
                eta: Some(self.descent.eta),
                mu: Some(self.descent.mu),
                eps_j: Some(self.descent.eps_j),
                eps_t: Some(self.descent.eps_t),
                max_iters: Some(self.descent.max_iters),
                remesh_every: Some(self.descent.remesh_every),
            },
        };
        toml::to_string(&raw).expect("configuration always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        "[truth]\ncurves = [\"circle 0 0 0.5\"]\n[initial]\ncurves = [\"circle 0 0 0.3\"]\n";

    #[test]
    fn minimal_config_gets_default_parameters() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.descent, DescentConfig::default());
        assert_eq!((c.sigma_nodes, c.gamma_nodes), (100, 70));
        assert_eq!(c.alpha, 1.0);
        assert_eq!(c.g, GRule::Rotational);
        assert_eq!(c.delta, 0.0);
        assert_eq!(c.descent.max_iters, 300);
        assert_eq!((c.descent.eta, c.descent.mu), (0.5, 0.5));
        assert_eq!((c.descent.eps_j, c.descent.eps_t), (1e-12, 1e-12));
    }

    #[test]
    fn negative_noise_names_the_key() {
        let err = parse_config(&format!("{MINIMAL}[data]\ndelta = -0.1\n")).unwrap_err();
        assert!(err.to_string().contains("data.delta"), "{err}");
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = parse_config(&format!("{MINIMAL}[descent]\nstep = 2\n")).unwrap_err();
        assert!(err.to_string().contains("step"), "{err}");
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let err = parse_config(&format!("{MINIMAL}[descent]\nmax_iters = \"many\"\n")).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
        assert!(err.to_string().contains("max_iters"), "{err}");
    }

    #[test]
    fn remeshing_every_ten_is_accepted() {
        let c = parse_config(&format!("{MINIMAL}[descent]\nremesh_every = 10\n")).unwrap();
        assert_eq!(c.descent.remesh_every, 10);
    }

    #[test]
    fn refinement_below_two_is_rejected() {
        let err = parse_config(&format!("{MINIMAL}[data]\nrefinement = 1\n")).unwrap_err();
        assert!(err.to_string().contains("data.refinement"));
    }

    #[test]
    fn bad_curve_names_the_section() {
        let err = parse_config(
            "[truth]\ncurves = [\"blob 1\"]\n[initial]\ncurves = [\"circle 0 0 0.3\"]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("truth.curves"), "{err}");
    }

    #[test]
    fn echo_round_trips() {
        let c = parse_config(&format!(
            "{MINIMAL}[data]\ndelta = 0.15\ng = \"constant 1 0\"\n"
        ))
        .unwrap();
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }
}
