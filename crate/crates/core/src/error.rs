use std::path::PathBuf;

use crate::params::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {}", format_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("singular operator `{name}`: min |symbol| = {min_abs:e}")]
    SingularOperator { name: String, min_abs: f64 },

    #[error("{what} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("Jacobian is numerically singular ({0}); solve in the even subspace to pin the translation mode")]
    SingularJacobian(String),

    #[error("iterate lost positivity: min value {min:e}")]
    LossOfPositivity { min: f64 },

    #[error("collapsed to the trivial branch: sup-norm {norm:e} below {threshold:e}")]
    TrivialSolution { norm: f64, threshold: f64 },

    #[error("field is not spectrally resolved: relative Nyquist amplitude {ratio:e} exceeds {tol:e}")]
    Unresolved { ratio: f64, tol: f64 },

    #[error("series truncation bound {achieved:e} is above the requested {requested:e}")]
    Truncation { achieved: f64, requested: f64 },

    #[error("fit window is unusable: {0}")]
    BadWindow(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("a-priori bound violated at t = {t}: sup|zeta| = {sup} > alpha = {alpha}")]
    AprioriViolated { t: f64, sup: f64, alpha: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics (exit code 1) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SingularJacobian(_)
                | Error::SingularOperator { .. }
                | Error::LossOfPositivity { .. }
                | Error::TrivialSolution { .. }
                | Error::Unresolved { .. }
                | Error::Truncation { .. }
                | Error::BlowUp { .. }
                | Error::AprioriViolated { .. }
                | Error::Inadmissible(_)
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
