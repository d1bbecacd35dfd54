//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("harmonic {nu:?} exceeds declared truncation degree {degree}")]
    TruncationExceeded { nu: Vec<i64>, degree: usize },

    #[error("Diophantine bound violated at nu={nu:?}: |omega.nu|={divisor:e} < {bound:e}")]
    DiophantineViolation { nu: Vec<i64>, divisor: f64, bound: f64 },

    #[error("zero harmonic has no small divisor")]
    ZeroHarmonic,

    #[error("order {order} exceeds budget: {detail}")]
    OrderTooLarge { order: usize, detail: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("line with zero current in tree")]
    ZeroCurrentLine,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no convergence after {iterations} iterations: {detail}")]
    NoConvergence { iterations: usize, detail: String },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("least-squares fit ill conditioned (condition number {0:e})")]
    FitIllConditioned(f64),

    #[error("degenerate turning point at q={q}: V'(q)={slope:e}")]
    TurningPointDegenerate { q: f64, slope: f64 },

    #[error("stiffness matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("collision: particles {i} and {j} at distance {distance:e}")]
    CollisionDetected { i: usize, j: usize, distance: f64 },

    #[error("integrand not decaying: |f|={value:e} at t={t}")]
    TailNotDecaying { t: f64, value: f64 },

    #[error("Jacobian is singular (det={0:e})")]
    JacobianSingular(f64),

    #[error("implicit solve failed: {0}")]
    ImplicitSolveFailed(String),

    #[error("chart singular: {0}")]
    ChartSingular(String),

    #[error("forbidden region: radicand {0:e} < 0")]
    ForbiddenRegion(f64),

    #[error("resonant denominator at nu={nu:?}: {divisor:e}")]
    ResonantDenominator { nu: Vec<i64>, divisor: f64 },

    #[error("nonzero mean {magnitude:e} in right-hand side at order {order}")]
    ZeroMeanObstruction { order: usize, magnitude: f64 },

    #[error("Hessian of the averaged perturbation is degenerate (det={0:e})")]
    DegenerateHessian(f64),

    #[error("beta0 is not stationary (|grad|={0:e})")]
    StationarityViolated(f64),

    #[error("geometric resummation diverges (ratio {0})")]
    ResummationDiverges(f64),

    #[error("one-form not closed (residual {0:e})")]
    NotClosed(f64),

    #[error("integration failed: {0}")]
    IntegrationFailed(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
