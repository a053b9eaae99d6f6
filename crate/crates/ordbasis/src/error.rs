use thiserror::Error;

/// Errors shared across the pipeline. Exit-code mapping lives in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("recipe parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("division by a series that is zero to working precision")]
    ZeroDivisor,

    #[error("operation requires a nonzero series")]
    ZeroSeries,

    #[error("pole orders {0} and {1} are not coprime")]
    Coprimality(i64, i64),

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("pole order {0} falls in a gap of the basis")]
    Gap(i64),

    #[error("precision window exhausted before certification: {0}")]
    Precision(String),

    #[error("internal contract violation: {0}")]
    InternalContractViolation(String),

    #[error("evaluation error: {0}")]
    Eval(String),
}

pub type Result<T> = std::result::Result<T, Error>;
