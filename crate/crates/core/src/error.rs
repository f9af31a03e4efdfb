use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid model, table, settings, or config file contents.
    #[error("configuration error: {0}")]
    Config(String),

    /// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
    #[error(
        "quadrature did not converge: best estimate {estimate:e} with estimated error {est_error:e} after {node_count} nodes"
    )]
    Convergence {
        estimate: f64,
        est_error: f64,
        node_count: usize,
    },

    /// A least-squares fit failed (degenerate design or no convergence).
    #[error("fit error: {0}")]
    Fit(String),

    /// A fit converged to parameters that make no physical sense.
    #[error("non-physical fit: {0}")]
    NonPhysical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Config(format!("csv: {e}"))
    }
}
