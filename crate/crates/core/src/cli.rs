//! Command-line front end. Exit codes: 0 success, 1 configuration error, 2 runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{run_experiment, ArmSpec, ExperimentSpec};
use crate::mdp::{build_riverswim, exact_value_iteration, RiverSwimParams, TabularMdp};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "dprl",
    version,
    about = "Differentially private UCBVI experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a multi-seed regret comparison and write CSV/SVG results.
    Run(RunArgs),
    /// Check an environment JSON file.
    ValidateEnv { file: PathBuf },
    /// Print the optimal value V*_1 from the initial distribution.
    Oracle(EnvArgs),
}

#[derive(Debug, Args)]
struct EnvArgs {
    /// `riverswim` or a path to an environment JSON file.
    #[arg(long, default_value = "riverswim")]
    env: String,
    #[arg(long, default_value_t = 6)]
    states: usize,
    #[arg(long, default_value_t = 20)]
    horizon: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment spec JSON; flags given alongside it override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    env: Option<String>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    episodes: Option<u64>,
    /// Repeatable: `ucbvi`, `hoeffding`, `jdp:eps=1`, `ldp:eps=1,bonus=0.05`, ...
    #[arg(long = "arm")]
    arms: Vec<String>,
    #[arg(long)]
    runs: Option<usize>,
    /// Base seed; run `i` uses `seed + i`.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    bonus_scale: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    stride: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_spec(self) -> Result<ExperimentSpec> {
        let mut spec = match &self.spec {
            Some(path) => ExperimentSpec::load(path)?,
            None => {
                let episodes = self.episodes.ok_or_else(|| {
                    Error::InvalidArgument("--episodes is required without --spec".into())
                })?;
                ExperimentSpec::new(episodes, Vec::new())
            }
        };
        if let Some(v) = self.env {
            spec.environment = v;
        }
        if let Some(v) = self.states {
            spec.states = v;
        }
        if let Some(v) = self.horizon {
            spec.horizon = v;
        }
        if let Some(v) = self.episodes {
            spec.episodes = v;
        }
        if !self.arms.is_empty() {
            spec.arms = self
                .arms
                .iter()
                .map(|a| a.parse::<ArmSpec>())
                .collect::<Result<_>>()?;
        }
        if let Some(v) = self.runs {
            spec.runs = v;
        }
        if let Some(v) = self.seed {
            spec.base_seed = v;
        }
        if let Some(v) = self.bonus_scale {
            spec.bonus_scale = v;
        }
        if let Some(v) = self.beta {
            spec.beta = v;
        }
        if self.stride.is_some() {
            spec.checkpoint_stride = self.stride;
        }
        if let Some(v) = self.out {
            spec.output_dir = v;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn load_env(args: &EnvArgs) -> Result<TabularMdp> {
    if args.env == "riverswim" {
        build_riverswim(args.states, args.horizon, &RiverSwimParams::default())
    } else {
        TabularMdp::load(&args.env)
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    let io = |e| Error::io("<stdout>", e);
    match command {
        Command::Run(args) => {
            let spec = args.into_spec()?;
            let report = run_experiment(&spec)?;
            let files = report.write_outputs(&spec.output_dir)?;
            for agg in &report.aggregates {
                writeln!(
                    out,
                    "{}: final cumulative regret {:.3} ± {:.3} over {} runs",
                    agg.label,
                    agg.final_mean(),
                    agg.final_std_error(),
                    agg.runs
                )
                .map_err(io)?;
            }
            for f in files {
                writeln!(out, "wrote {}", f.display()).map_err(io)?;
            }
        }
        Command::ValidateEnv { file } => {
            let mdp = TabularMdp::load(&file)?;
            writeln!(
                out,
                "ok: S = {}, A = {}, H = {}, rewards {:?}",
                mdp.states(),
                mdp.actions(),
                mdp.horizon(),
                mdp.reward_kind()
            )
            .map_err(io)?;
        }
        Command::Oracle(args) => {
            let mdp = load_env(&args)?;
            let opt = exact_value_iteration(&mdp);
            writeln!(out, "{}", opt.initial_value(&mdp)).map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
