use thiserror::Error;

use crate::gauss::OrderTransform;
use crate::pgd::PgdOutcome;
use crate::wot::WotSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    EigenNonConvergence { sweeps: usize, residual: f64 },

    #[error("shared-correlation reconstruction residual {residual:e} exceeds {tolerance:e}")]
    CorrResidualExceeded { residual: f64, tolerance: f64 },

    #[error("gradient requires positive definite arguments (smallest eigenvalue {min_eigenvalue:e})")]
    SingularInput { min_eigenvalue: f64 },

    #[error("order certificate failed: Loewner residual {residual:e} exceeds {tolerance:e}")]
    CertificationFailed {
        residual: f64,
        tolerance: f64,
        candidate: Box<OrderTransform>,
    },

    #[error("projected gradient descent hit max_iter = {iterations} (last residual {residual:e})")]
    MaxIterExceeded {
        iterations: usize,
        residual: f64,
        best: Box<PgdOutcome>,
    },

    #[error("regularization failed to keep iterate {iteration} positive definite")]
    SingularIterate { iteration: usize },

    #[error("rank is numerically ambiguous: eigenvalue {eigenvalue:e} within band of tolerance {tolerance:e}")]
    RankAmbiguous { eigenvalue: f64, tolerance: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("method not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("measure has no atoms")]
    EmptyMeasure,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("measure dimension {got} unsupported here (expected {expected})")]
    WrongMeasureDim { expected: usize, got: usize },

    #[error("coupling marginal residual {residual:e} exceeds {tolerance:e}")]
    InvalidCoupling { residual: f64, tolerance: f64 },

    #[error("problem size {size} exceeds budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },

    #[error("Frank-Wolfe stopped after {iterations} iterations with duality gap {gap:e} > {target:e}")]
    GapNotReached {
        iterations: usize,
        gap: f64,
        target: f64,
        best: Box<WotSolution>,
    },

    #[error("transportation LP infeasible: {0}")]
    LpInfeasible(String),
}
