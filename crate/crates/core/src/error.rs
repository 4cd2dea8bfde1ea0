use thiserror::Error;

/// Errors produced by grid modelling, estimation, tree construction, and simulation.
#[derive(Debug, Error)]
pub enum GridflexError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid grid specification: {0}")]
    InvalidSpec(String),

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NewtonDiverged { iterations: usize, residual: f64 },

    #[error("infeasible day-ahead schedule at step {step}: {reason}")]
    InfeasibleSchedule { step: usize, reason: String },

    #[error("degenerate wind data: {0}")]
    DegenerateData(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("no feasible action available (action space exhausted)")]
    ActionExhausted,

    #[error("receding-horizon protocol error: {0}")]
    Protocol(String),

    #[error("all runs in the campaign failed")]
    DegenerateCampaign,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv parse error at line {line}: {message}")]
    CsvFormat { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GridflexError>;
