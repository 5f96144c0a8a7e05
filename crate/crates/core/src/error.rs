use thiserror::Error;

/// Errors raised by operator construction, analysis and the numerical solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid operator field `{field}`: {message}")]
    InvalidOperator { field: String, message: String },

    #[error(
        "control matrix [{sup_index}][{inf_index}] has eigenvalues in [{min_eig}, {max_eig}], \
         outside [lambda, Lambda] = [{lambda}, {big_lambda}]"
    )]
    ControlOutOfBounds {
        sup_index: usize,
        inf_index: usize,
        min_eig: f64,
        max_eig: f64,
        lambda: f64,
        big_lambda: f64,
    },

    #[error("operator is not rotationally invariant; the radial/analytic path does not apply")]
    NotRotationallyInvariant,

    #[error("homogeneity indicator has no sign change on [{lo}, {hi}] (values {psi_lo}, {psi_hi}); operator invalid")]
    NoSignChange { lo: f64, hi: f64, psi_lo: f64, psi_hi: f64 },

    #[error("parameter out of range: {0}")]
    ParameterDomain(String),

    #[error("non-monotone discretization: {0}")]
    NonMonotone(String),

    #[error("iteration did not converge after {iterations} iterations (last residual {last_residual:e})")]
    NoConvergence {
        iterations: usize,
        last_residual: f64,
        history: Vec<f64>,
    },

    #[error("evaluator failed at |x| = {radius}, s = {s}: {message}")]
    Evaluator { radius: f64, s: f64, message: String },

    #[error("wrong regime: {0}")]
    WrongRegime(String),

    #[error("fit rejected: {message} (power residual {power_residual:e}, log residual {log_residual:e})")]
    FitRejected {
        message: String,
        power_residual: f64,
        log_residual: f64,
    },

    #[error("non-positive iterate encountered: {0}")]
    NonPositive(String),

    #[error("singular linear system at row {0}")]
    Singular(usize),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
