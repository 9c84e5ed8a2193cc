use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input exceeds a size gate (graph order, hypercube dimension, ...).
    #[error("{what} = {value} exceeds the configured maximum {max}")]
    Size {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("value {value} is outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    /// No configuration satisfies the constraint window.
    #[error("infeasible constraint window [{lo}, {hi}]{}", nearest_note(.nearest))]
    Infeasible {
        lo: f64,
        hi: f64,
        nearest: Option<f64>,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid motif: {0}")]
    Motif(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("degenerate sup-norm profile: {0}")]
    DegenerateProfile(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("chain configuration: {0}")]
    ChainConfig(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

fn nearest_note(nearest: &Option<f64>) -> String {
    match nearest {
        Some(d) => format!("; nearest achievable edge density is {d}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn infeasible(lo: f64, hi: f64) -> Self {
        Error::Infeasible {
            lo,
            hi,
            nearest: None,
        }
    }
}
