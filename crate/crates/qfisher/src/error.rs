use thiserror::Error;

/// Errors for the matrix kernel, spectral routines and QFI engines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("not Hermitian: max |A - A^dag| entry is {0:.3e}")]
    NotHermitian(f64),

    #[error("not unitary: max |U^dag U - I| entry is {0:.3e}")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid-state: eigenvalue {0:.3e} is below the PSD clamp window")]
    InvalidState(f64),

    #[error("eigensolver non-convergence: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    EigNonConvergence { residual: f64, sweeps: usize },

    #[error("out-of-validity: eigen-angle spread {spread:.6} violates theta_max - theta_min <= pi")]
    SpreadExceedsPi { spread: f64 },

    #[error("step-too-large: eigen-angle spread {spread:.6} exceeds pi at dx = {dx:.3e}; use a smaller dx")]
    StepTooLarge { dx: f64, spread: f64 },

    #[error("derivative-inaccurate: generator Hermitization residual {0:.3e}")]
    DerivativeInaccurate(f64),

    #[error("no-information: generator eigenvalue spread {0:.3e} is numerically zero")]
    NoInformation(f64),

    #[error("inconsistent-derivative: drho has trace {0:.3e}, expected traceless")]
    InconsistentDerivative(f64),

    #[error("unsupported-dimension: probe optimization requires d = 2, got d = {0}")]
    UnsupportedDimension(usize),

    #[error("open-interval: no gain crossing on the {side} side within the search range (endpoint {endpoint})")]
    OpenInterval { side: &'static str, endpoint: f64 },

    #[error("no-gain: controlled QFI at beta = 0 does not exceed the baseline")]
    NoGain,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
