use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {value} outside [0, 1] ({what})")]
    InvalidProbability { what: &'static str, value: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("analytic queue formula is degenerate: {0}")]
    DegenerateFormula(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("code size K={k} exceeds the enumeration limit of {limit}")]
    Capacity { k: usize, limit: usize },

    #[error("total time overhead is zero; rate is unbounded")]
    InfiniteRate,

    #[error("no {kind} named `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("no configuration satisfies the fidelity constraint; best infeasible row is M={m}, K={k}, I={i} with objective {objective}")]
    Infeasible {
        m: usize,
        k: usize,
        i: usize,
        objective: f64,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(what: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { what, value })
    }
}
