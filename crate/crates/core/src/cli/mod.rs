//! `gridplan` command line: synth → plan → simulate → evaluate, plus plot
//! data and MPS export. Every stage reads only files written by earlier
//! stages under the study's output directory.

mod commands;
mod config;
mod plotdata;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    case_prefix, evaluate, plan, simulate, synth, EvaluateOutcome, PlanComparison, PlanOutcome, PlanReport,
    SimulateOutcome, Study, SynthSummary, COMPARISON_PLAN_FILE, PLAN_FILE,
};
pub use config::{ProfileConfig, ScucConfig, SolverSettings, StudyConfig, StudyPaths, TepConfig, VariantChoice};
pub use plotdata::{plot_data, Figure, PlotOptions};

use crate::grid::{Case, DayType};
use crate::profiles::TerminalPolicy;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "GRIDPLAN_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or input files.
    #[error("{0}")]
    Usage(String),
    /// No feasible solution, or the solver failed.
    #[error("{0}")]
    Infeasible(String),
    /// Input series do not cover the study horizon.
    #[error("{0}")]
    Coverage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Coverage(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gridplan", version, about = "Climate-aware transmission planning study pipeline")]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags that override keys of the study file.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Study configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub grid: Option<PathBuf>,
    #[arg(long, global = true)]
    pub weather: Option<PathBuf>,
    #[arg(long, global = true)]
    pub load: Option<PathBuf>,
    /// Generation-investment file.
    #[arg(long, global = true)]
    pub generation: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_policy)]
    pub policy: Option<TerminalPolicy>,
    #[arg(long, global = true)]
    pub theta_bound: Option<f64>,
    /// Load-shedding penalty for unit commitment, $/MWh.
    #[arg(long, global = true)]
    pub shed_penalty: Option<f64>,
    #[arg(long, global = true)]
    pub reserve_required: Option<bool>,
    /// Per-solve time limit in seconds.
    #[arg(long, global = true)]
    pub time_limit: Option<f64>,
    #[arg(long, global = true)]
    pub node_limit: Option<usize>,
}

fn parse_policy(s: &str) -> Result<TerminalPolicy, String> {
    match s {
        "conservative" => Ok(TerminalPolicy::Conservative),
        "average" => Ok(TerminalPolicy::Average),
        _ => Err(format!("unknown policy {s:?} (expected conservative or average)")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build representative profiles from the weather and load series.
    Synth,
    /// Solve the expansion plan.
    Plan {
        #[arg(long, value_enum)]
        variant: Option<VariantChoice>,
        /// Fleet to plan for (FR or FGI).
        #[arg(long)]
        case: Option<Case>,
    },
    /// Unit commitment on every typical day.
    Simulate {
        #[arg(long, value_delimiter = ',')]
        case: Vec<Case>,
    },
    /// Reliability indices from the simulation results.
    Evaluate {
        #[arg(long, value_delimiter = ',')]
        case: Vec<Case>,
    },
    /// Tidy CSV series for plotting.
    Plotdata {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long)]
        line: Option<String>,
        #[arg(long)]
        plant: Option<String>,
        #[arg(long)]
        bus: Option<String>,
        #[arg(long, value_delimiter = ',')]
        case: Vec<Case>,
        /// Output file; defaults to `plot_<figure>.csv` in the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a built model in MPS format.
    MpsExport {
        #[arg(long, value_enum)]
        model: ModelKind,
        #[arg(long, value_enum)]
        variant: Option<VariantChoice>,
        #[arg(long)]
        case: Option<Case>,
        #[arg(long, default_value_t = 1)]
        epoch: usize,
        #[arg(long, default_value_t = 1)]
        quarter: usize,
        #[arg(long, default_value = "WD")]
        day: DayType,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModelKind {
    Tep,
    Scuc,
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(v) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got {v:?}")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    configure_workers()?;
    let Some(path) = cli.overrides.config.clone() else {
        return Err(CliError::Usage("--config <path> is required".into()));
    };
    let study = Study::open(&path, &cli.overrides)?;
    match cli.command {
        Command::Synth => {
            let s = synth(&study)?;
            println!("{s}");
        }
        Command::Plan { variant, case } => {
            let v = variant.unwrap_or(study.config.tep.variant);
            let c = case.unwrap_or(study.config.tep.case);
            let report = plan(&study, v, c)?;
            print!("{report}");
        }
        Command::Simulate { case } => {
            let cases = if case.is_empty() { study.config.cases.clone() } else { case };
            let out = simulate(&study, &cases)?;
            print!("{out}");
            out.into_result()?;
        }
        Command::Evaluate { case } => {
            let cases = if case.is_empty() { study.config.cases.clone() } else { case };
            let text = evaluate(&study, &cases)?;
            print!("{text}");
        }
        Command::Plotdata {
            figure,
            line,
            plant,
            bus,
            case,
            out,
        } => {
            let opts = PlotOptions {
                line,
                plant,
                bus,
                cases: if case.is_empty() { study.config.cases.clone() } else { case },
            };
            let path = out.unwrap_or_else(|| study.output().join(format!("plot_{}.csv", figure.name())));
            let n = plotdata::write_plot(&study, figure, &opts, &path)?;
            println!("{} rows -> {}", n, path.display());
        }
        Command::MpsExport {
            model,
            variant,
            case,
            epoch,
            quarter,
            day,
            out,
        } => {
            let paths = commands::mps_export(&study, model, variant, case, (epoch, quarter, day), out)?;
            for p in paths {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

/// Parse `args` and run, mapping failures to the documented exit codes.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
