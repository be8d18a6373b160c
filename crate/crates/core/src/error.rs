use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ConfigError::Invalid(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{source_name}: missing interval at {timestamp} for zone '{zone}'")]
    MissingInterval { source_name: String, zone: String, timestamp: String },
    #[error("{source_name}: unknown zone '{zone}' on line {line}")]
    UnknownZone { source_name: String, zone: String, line: usize },
    #[error("{source_name}: non-numeric price '{value}' on line {line}")]
    BadPrice { source_name: String, value: String, line: usize },
    #[error("{source_name}: bad timestamp '{value}' on line {line}")]
    BadTimestamp { source_name: String, value: String, line: usize },
    #[error("{source_name}: duplicate interval {timestamp} for zone '{zone}'")]
    Duplicate { source_name: String, zone: String, timestamp: String },
    #[error("{source_name}: non-positive duration {minutes} min on line {line}")]
    NonPositiveDuration { source_name: String, minutes: f64, line: usize },
    #[error("{source_name}: {message}")]
    Malformed { source_name: String, message: String },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("infeasible by construction: {0}")]
    Infeasible(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("numerical breakdown: {0}")]
    Numerical(String),
    #[error("instance has {found} free binaries, oracle limit is {max}")]
    TooManyBinaries { found: usize, max: usize },
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("day {day}: no feasible schedule")]
    Infeasible { day: usize },
    #[error("day {day}: limit reached with gap {gap:.3e}")]
    LimitReached { day: usize, gap: f64 },
    #[error("day {day}: solver stopped without a feasible schedule")]
    NoIncumbent { day: usize },
    #[error("malformed schedule: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Umbrella error for callers that drive the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
