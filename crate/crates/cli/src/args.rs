use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use somorse::Costs;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "somorse",
    version,
    about = "Morse theory of f_C(A) = sum c_i x_ii on SO(n)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List all critical points with index, value and Hessian diagonal.
    CriticalPoints(RunArgs),
    /// Morse and Poincare polynomials, remainder and perfectness verdict.
    Polynomials(RunArgs),
    /// Run the gradient, Hessian, index and flow oracle suites.
    Verify(RunArgs),
    /// Gradient flow from Haar-random starts (or from a given matrix).
    Flow(FlowArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Matrix dimension.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated strictly increasing weights, or "default" for c_i = i.
    #[arg(long, default_value = "default")]
    pub c: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Gradient-norm tolerance for the flow.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// JSON file holding a start matrix (row-major array of arrays).
    #[arg(long)]
    pub start: Option<PathBuf>,
    /// Record the objective value after every accepted step.
    #[arg(long)]
    pub trajectory: bool,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub c: Costs,
    pub seed: u64,
    pub samples: usize,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl TryFrom<&RunArgs> for RunConfig {
    type Error = CliError;

    fn try_from(args: &RunArgs) -> Result<Self, CliError> {
        if args.n == 0 {
            return Err(CliError::usage("--n must be at least 1"));
        }
        if args.samples == 0 {
            return Err(CliError::usage("--samples must be at least 1"));
        }
        if args.tol.is_nan() || args.tol <= 0.0 {
            return Err(CliError::usage("--tol must be positive"));
        }
        Ok(Self {
            n: args.n,
            c: parse_costs(&args.c, args.n)?,
            seed: args.seed,
            samples: args.samples,
            tol: args.tol,
            format: args.format,
            out: args.out.clone(),
        })
    }
}

pub fn parse_costs(spec: &str, n: usize) -> Result<Costs, CliError> {
    if spec.trim() == "default" {
        return Costs::default_for(n).map_err(CliError::from);
    }
    let values = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("cannot parse cost entry {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != n {
        return Err(CliError::usage(format!(
            "cost vector has {} entries but --n is {n}",
            values.len()
        )));
    }
    Costs::new(values).map_err(CliError::from)
}
