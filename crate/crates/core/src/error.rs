use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}] (f = {flo}, {fhi})")]
    NoSignChange { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("no convergence within {0} evaluations")]
    MaxIterations(usize),
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),
    #[error("parameter constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("negative radicand {0}")]
    NegativeRadicand(f64),
    #[error("feasibility not monotone in beta near {0}")]
    NonMonotone(f64),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("solver stalled after {0} iterations")]
    SolverStalled(usize),
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("numerical failure: {0}")]
    Numerical(String),
}
