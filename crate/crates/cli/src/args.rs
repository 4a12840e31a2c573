use clap::{Args, Parser, Subcommand, ValueEnum};
use qmc_core::checker::UntilMethod;
use std::path::PathBuf;

/// Model checker for quantum Markov chains.
#[derive(Debug, Parser)]
#[command(name = "qmc", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a model is a well-formed quantum Markov chain.
    Validate(ValidateArgs),
    /// Compute the satisfaction set of a state formula.
    Check(CheckArgs),
    /// Print the super-operator Q(s, φ) of a path formula at one state.
    Compute(ComputeArgs),
    /// Estimate the probability of a bounded path formula by sampling.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Show {
    #[default]
    Trace,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    #[default]
    Closed,
    Kleene,
}

impl From<Method> for UntilMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Closed => UntilMethod::Closed,
            Method::Kleene => UntilMethod::Kleene,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Model file (JSON).
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,
    /// Comparison tolerance. Overrides QMC_TOL.
    #[arg(long, value_name = "T", env = "QMC_TOL")]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub output: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// State formula, e.g. `Q>=0.5[F<=4 succ]`.
    #[arg(long)]
    pub formula: String,
    /// Exit 0 iff this state satisfies the formula.
    #[arg(long, value_name = "NAME")]
    pub state: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Path formula, e.g. `F<=3 succ` or `l0 U l3`.
    #[arg(long = "path-formula", value_name = "STR")]
    pub path_formula: String,
    #[arg(long, value_name = "NAME")]
    pub state: String,
    /// Step bound applied to an until or eventually formula.
    #[arg(long, value_name = "INT")]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub show: Show,
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_name = "NAME")]
    pub state: String,
    /// Bounded path formula: `X ψ`, `φ U<=k ψ` or `F<=k ψ`.
    #[arg(long = "path-formula", value_name = "STR")]
    pub path_formula: String,
    /// Step bound applied to an until or eventually formula.
    #[arg(long, value_name = "INT")]
    pub k: Option<usize>,
    #[arg(long, value_name = "N")]
    pub samples: u64,
    /// Initial density: a JSON matrix file or `maximally-mixed`.
    #[arg(long, value_name = "FILE|maximally-mixed", default_value = "maximally-mixed")]
    pub rho: String,
    /// Generator seed; drawn at random and reported when omitted.
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
}
