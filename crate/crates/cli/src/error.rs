use qmc_core::checker::CheckError;
use qmc_core::logic::FormulaError;
use qmc_core::model::ModelError;
use qmc_core::simulate::SimulateError;
use thiserror::Error;

/// Every error here maps to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
    #[error("formula: {0}")]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("{0}")]
    Usage(String),
}
