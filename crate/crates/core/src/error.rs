use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("overflow evaluating w({re}{im:+}i)")]
    Overflow { re: f64, im: f64 },
    #[error(
        "quadrature did not converge: estimated error {estimate:.3e} > tolerance {tolerance:.3e}"
    )]
    NoConvergence { estimate: f64, tolerance: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
