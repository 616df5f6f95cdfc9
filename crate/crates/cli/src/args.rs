//! Command-line arguments and dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mnar_bounds::sim::DEFAULT_FACTORS;
use mnar_bounds::sensitivity::DEFAULT_GRID_RESOLUTION;
use mnar_bounds::{CausalModel, ContrastKind, Mechanism, SimConfig};
use serde::Serialize;

use crate::commands;
use crate::error::CliResult;
use crate::formats;
use crate::parallel::THREADS_ENV;

#[derive(Debug, Parser)]
#[command(name = "mnar-bounds", version, about = "Bounds on causal contrasts with a confounder missing not at random")]
pub struct Cli {
    /// Print the report as JSON with full-precision numbers.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimates and assumption-free bounds for the built-in income example.
    Example {
        #[arg(long, default_value = "rr")]
        contrast: ContrastKind,
        /// Also write the example model as JSON.
        #[arg(long, value_name = "FILE")]
        write_model: Option<PathBuf>,
        /// Also write the example's observed law as JSON.
        #[arg(long, value_name = "FILE")]
        write_law: Option<PathBuf>,
    },
    /// Sensitivity analysis of the built-in income example.
    SaExample {
        #[arg(long, default_value = "rr")]
        contrast: ContrastKind,
    },
    /// Bounds for a model or law read from a JSON file.
    Eval {
        input: PathBuf,
        #[arg(long, default_value = "rr")]
        contrast: ContrastKind,
        /// Sensitivity parameters `{"alpha": [a0, a1], "beta": [b0, b1]}`.
        #[arg(long, value_name = "FILE")]
        params: Option<PathBuf>,
        /// Also write the observed law of the input as JSON.
        #[arg(long, value_name = "FILE")]
        write_law: Option<PathBuf>,
    },
    /// Sensitivity grids over the feasible parameter regions, as CSV.
    Grid {
        /// Model or law file; defaults to the income example.
        input: Option<PathBuf>,
        #[arg(long, default_value = "rr")]
        contrast: ContrastKind,
        #[arg(long, default_value_t = DEFAULT_GRID_RESOLUTION)]
        resolution: usize,
        #[arg(long, default_value = "grid_lower.csv")]
        lower: PathBuf,
        #[arg(long, default_value = "grid_upper.csv")]
        upper: PathBuf,
    },
    /// How often naive estimates are biased, flip sign or leave the bounds.
    Simulate {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_delimiter = ',', default_values_t = Mechanism::ALL)]
        mechanisms: Vec<Mechanism>,
    },
    /// How often sensitivity bounds at perturbed true parameters hold and
    /// improve on the assumption-free bounds.
    SaSimulate {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FACTORS)]
        factors: Vec<f64>,
    },
    /// Point estimate using an external `p(U | E)` for the incomplete cases.
    Fuse {
        input: PathBuf,
        /// `{"p_u_given_e": [[...], [...]]}`.
        auxiliary: PathBuf,
        #[arg(long, default_value = "rr")]
        contrast: ContrastKind,
    },
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Number of random models; accepts forms like `1e5`.
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    pub n_draws: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Confounder cardinality.
    #[arg(long, default_value_t = 3)]
    pub u_card: usize,
    #[arg(long, default_value = "rr")]
    pub contrast: ContrastKind,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    pub threads: usize,
    /// Write the table as CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            n_draws: self.n_draws,
            u_card: self.u_card,
            master_seed: self.seed,
            contrast: self.contrast,
            ..SimConfig::default()
        }
    }
}

/// Parses a non-negative integer, also in scientific notation.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn emit<R: Serialize + std::fmt::Display>(out: &mut dyn Write, json: bool, report: &R) -> CliResult<()> {
    if json {
        let text = serde_json::to_string_pretty(report).expect("reports serialize");
        writeln!(out, "{text}")?;
    } else {
        write!(out, "{report}")?;
    }
    Ok(())
}

/// Runs one command, writing the report to `out` and warnings to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let json = cli.json;
    match cli.command {
        Command::Example { contrast, write_model, write_law } => {
            let model = CausalModel::income_example();
            if let Some(path) = write_model {
                formats::write_model(&path, &model)?;
            }
            if let Some(path) = write_law {
                formats::write_law(&path, &model.observed_law())?;
            }
            emit(out, json, &commands::example(contrast)?)
        }
        Command::SaExample { contrast } => emit(out, json, &commands::sa_example(contrast)?),
        Command::Eval { input, contrast, params, write_law } => {
            let report = commands::eval_file(&input, contrast, params.as_deref())?;
            if let Some(path) = write_law {
                formats::write_law(&path, &formats::read_input(&input)?.law())?;
            }
            for w in report.sensitivity.iter().flat_map(|s| &s.warnings) {
                writeln!(err, "warning: {w}")?;
            }
            emit(out, json, &report)
        }
        Command::Grid { input, contrast, resolution, lower, upper } => {
            emit(out, json, &commands::grid(input.as_deref(), contrast, resolution, &lower, &upper)?)
        }
        Command::Simulate { sim, mechanisms } => {
            let report = commands::simulate(&sim.config(), &mechanisms, sim.threads, sim.out.as_deref())?;
            emit(out, json, &report)
        }
        Command::SaSimulate { sim, factors } => {
            let report = commands::sa_simulate(&sim.config(), &factors, sim.threads, sim.out.as_deref())?;
            emit(out, json, &report)
        }
        Command::Fuse { input, auxiliary, contrast } => emit(out, json, &commands::fuse(&input, &auxiliary, contrast)?),
    }
}
