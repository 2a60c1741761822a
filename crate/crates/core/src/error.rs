use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("supersonic momentum: m^2 = {m_sq} exceeds critical {sigma_sq}")]
    SupersonicMomentum { m_sq: f64, sigma_sq: f64 },
    #[error("range error: {0}")]
    Range(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("L too small: {0}")]
    LTooSmall(String),
    #[error("rho out of bracket: {0}")]
    RhoOutOfBracket(String),
    #[error("no admissible triple (L too small or rho0 too small): {0}")]
    NoAdmissibleTriple(String),
    #[error("state corrupt: {0}")]
    StateCorrupt(String),
    #[error("linear solve failed after {iterations} iterations (relative residual {residual:e})")]
    LinearSolveFailed { iterations: usize, residual: f64 },
    #[error("no convergence after {iterations} Picard iterations (last update {update:e})")]
    NoConvergence { iterations: usize, update: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
