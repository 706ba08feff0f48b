use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ccbm_cli::checks::{gradient_check, mms_check, FD_STEPS, FD_TOLERANCE, MMS_MIN_ORDERS};
use ccbm_cli::{
    generate_data, parse_config, run_experiment, run_gallery, CliError, Overrides, RunConfig,
};
use clap::{Parser, Subcommand};

/// Obstacle reconstruction in Stokes flow from boundary measurements.
#[derive(Parser)]
#[command(name = "ccbm", version)]
struct Cli {
    /// Output directory (default: the config's `out`, else `runs/<config name>`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for noise and random test fields.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the iteration limit.
    #[arg(long, global = true)]
    max_iters: Option<usize>,
    /// Only report errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic boundary data for a configuration.
    GenerateData { config: PathBuf },
    /// Generate data and reconstruct the obstacle.
    Reconstruct { config: PathBuf },
    /// Run every configuration in a directory.
    Gallery { dir: PathBuf },
    /// Compare the shape gradient with finite differences.
    GradientCheck { config: PathBuf },
    /// Measure convergence orders against a manufactured solution.
    MmsCheck,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            max_iters: self.max_iters,
        }
    }

    fn load(&self, path: &Path) -> Result<(RunConfig, PathBuf), CliError> {
        let mut cfg = parse_config(&fs::read_to_string(path)?)?;
        self.overrides().apply(&mut cfg);
        let out = self
            .out
            .clone()
            .or_else(|| cfg.out.clone())
            .unwrap_or_else(|| Path::new("runs").join(path.file_stem().unwrap_or_default()));
        Ok((cfg, out))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenerateData { config } => {
            let (cfg, out) = cli.load(config)?;
            let data = generate_data(&cfg, &out)?;
            log::info!(
                "wrote {} samples to {}",
                data.len(),
                out.join("data.txt").display()
            );
        }
        Command::Reconstruct { config } => {
            let (cfg, out) = cli.load(config)?;
            let s = run_experiment(&cfg, &out)?;
            println!(
                "termination = {}  iterations = {}  final J = {:.6e}{}  ({:.1} s)",
                s.termination,
                s.iterations,
                s.final_j,
                s.final_hausdorff
                    .map(|h| format!("  hausdorff = {h:.4}"))
                    .unwrap_or_default(),
                s.wall_time.as_secs_f64()
            );
        }
        Command::Gallery { dir } => {
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| Path::new("runs").join("gallery"));
            let rows = run_gallery(dir, &out, cli.overrides())?;
            let failed = rows.iter().filter(|r| !r.succeeded()).count();
            println!(
                "{} cases, {failed} failed; table in {}",
                rows.len(),
                out.join("gallery.csv").display()
            );
        }
        Command::GradientCheck { config } => {
            let (cfg, out) = cli.load(config)?;
            let check = gradient_check(&cfg)?;
            fs::create_dir_all(&out)?;
            fs::write(out.join("gradient_check.csv"), check.to_csv())?;
            let k = FD_STEPS.len() - 1;
            for (i, f) in check.fields.iter().enumerate() {
                println!(
                    "field {i}: analytic {:.6e}  fd {:.6e}  mismatch {:.3e}  richardson {}",
                    f.analytic,
                    f.fd[k],
                    f.mismatch(k),
                    if f.richardson_ok() {
                        "ok"
                    } else {
                        "not settled"
                    }
                );
            }
            if !check.passed() {
                return Err(CliError::Check(format!(
                    "max mismatch {:.3e} (tolerance {FD_TOLERANCE})",
                    check.max_mismatch()
                )));
            }
        }
        Command::MmsCheck => {
            let check = mms_check(1.0)?;
            print!("{}", check.table());
            for o in &check.orders {
                println!(
                    "orders: velocity L2 {:.2}  velocity H1 {:.2}  pressure L2 {:.2}",
                    o[0], o[1], o[2]
                );
            }
            if !check.passed() {
                return Err(CliError::Check(format!(
                    "minimum orders {:?} below {MMS_MIN_ORDERS:?}",
                    check.min_orders()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
