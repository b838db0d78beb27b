use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "structure constants are not antisymmetric at ({i}, {j}, {k}): \
         c[i][j][k] = {value}, c[j][i][k] = {mirrored}"
    )]
    NotAntisymmetric {
        i: usize,
        j: usize,
        k: usize,
        value: f64,
        mirrored: f64,
    },

    #[error("structure constants violate the Jacobi identity at ({i}, {j}, {k}, {l}): residual {residual:e}")]
    JacobiViolation {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        residual: f64,
    },

    #[error("moments of inertia must be positive, got ({i1}, {i2}, {i3})")]
    NonPositiveInertia { i1: f64, i2: f64, i3: f64 },

    #[error("these equations assume a symmetric top, but i1 = {i1} and i2 = {i2} differ")]
    AsymmetricTop { i1: f64, i2: f64 },

    #[error("dissipation strength must be non-negative, got {0}")]
    NegativeLambda(f64),

    #[error("logarithmic generator requires a positive argument, got {0}")]
    GeneratorDomain(f64),

    #[error("singular matrix in linear solve")]
    SingularMatrix,

    #[error("step size underflow at t = {t} (required step {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudgetExhausted { t: f64, max_steps: usize },

    #[error("equilibrium values must be strictly positive, got l3 = {l3}, g3 = {g3}")]
    InvalidEquilibrium { l3: f64, g3: f64 },

    #[error("closed-form eigenvalues require i3 = 2*i1, got i1 = {i1}, i3 = {i3}")]
    NotTwoToOne { i1: f64, i3: f64 },

    #[error("no closed-form eigenvalues exist for this generator")]
    NoClosedForm,

    #[error("QR iteration failed to converge after {0} sweeps")]
    EigenNonConvergence(usize),

    #[error("non-finite value produced during {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
