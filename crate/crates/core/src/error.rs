use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("degenerate training window: {0}")]
    DegenerateTraining(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("weighted Gram matrix is singular (pivot ratio {0:e})")]
    SingularGram(f64),
    #[error("covariate scale estimates are not positive: {0}")]
    DegenerateScales(String),
    #[error("covariate arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("step {k} lies beyond the monitoring horizon {m_star}")]
    OutOfHorizon { k: usize, m_star: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no root of the critical value equation in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("monitor already stopped at step {0}")]
    StepAfterTerminal(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn finite(x: f64, what: &'static str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what))
    }
}
