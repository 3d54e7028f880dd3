use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("dimension {dim} does not factor as {left}x{right}")]
    NotFactorizable { dim: usize, left: usize, right: usize },

    #[error("operator is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("superoperator is not Hermiticity preserving (defect {0:e})")]
    NotHermiticityPreserving(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("infinite inverse temperature is not supported; use the ground-state projector")]
    InfiniteBeta,

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge: estimated error {error:e} above tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("generator is not ergodic: two smallest eigenvalue magnitudes {first:e} and {second:e}")]
    NonErgodic { first: f64, second: f64 },

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("step-halving check failed: discrepancy {discrepancy:e} above tolerance {tolerance:e}")]
    StepHalving { discrepancy: f64, tolerance: f64 },

    #[error("integration diverged after {steps} steps; the step is above the stability limit")]
    Diverged { steps: usize },

    #[error("correlation table horizon exceeded: |t| = {t} > {horizon}")]
    HorizonExceeded { t: f64, horizon: f64 },

    #[error("Simpson rule needs an even positive number of steps, got {0}")]
    OddSimpsonSteps(usize),

    #[error("generator kind mismatch: expected {expected}, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },

    #[error("bound constants inconsistent: A1 = {a1:e} is not below B0 = {b0:e}")]
    BoundInconsistent { a1: f64, b0: f64 },

    #[error("energy gap closes along the sweep: minimum gap {0:e}")]
    GapClosure(f64),

    #[error("derivative self-test failed: {0}")]
    DerivativeSelfTest(String),

    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
