use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    /// An iterative method ran out of iterations. `best` is the last iterate.
    #[error("{method} did not converge after {iterations} iterations (residual {residual:.3e}){hint}")]
    Convergence { method: &'static str, iterations: usize, residual: f64, best: Vec<f64>, hint: String },

    #[error("explicit integration became unstable at t = {t:.6e}; use a smaller step than {dt:.3e}")]
    Stability { t: f64, dt: f64 },

    #[error("singular matrix in dense factorization")]
    Singular,
}

impl Error {
    pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::Dimension { expected, got })
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Dimension { .. } | Error::Domain(_))
    }
}
