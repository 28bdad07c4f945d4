use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Lambert W0 is undefined for x = {0} < -1/e")]
    LambertDomain(f64),

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("{method} did not converge after {iterations} iterations")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
    },

    #[error("non-finite state encountered at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("infeasible perturbation budget: delta = {delta} must satisfy 0 < delta < S0 = {s0}")]
    InfeasibleBudget { delta: f64, s0: f64 },

    #[error(
        "Blahut-Arimoto did not converge after {iterations} iterations \
         (lower = {lower_bits} bits, upper = {upper_bits} bits)"
    )]
    CapacityNotConverged {
        iterations: usize,
        lower_bits: f64,
        upper_bits: f64,
    },

    #[error("grid oracle supports n_max <= 2, got n_max = {0}")]
    OracleDimension(usize),

    #[error("input distribution has {input} entries but the channel has {channel} inputs")]
    DimensionMismatch { input: usize, channel: usize },

    #[error("elementary rate constants (k1, k_minus1, k2) are required for the full mass-action model")]
    MissingRates,

    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code: 2 for bad input, 3 for numerical failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::LambertDomain(_)
            | Error::InfeasibleBudget { .. }
            | Error::OracleDimension(_)
            | Error::DimensionMismatch { .. }
            | Error::MissingRates
            | Error::InvalidConfig { .. } => 2,
            Error::NoSignChange { .. }
            | Error::NonConvergence { .. }
            | Error::NonFiniteState { .. }
            | Error::CapacityNotConverged { .. } => 3,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
