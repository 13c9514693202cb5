//! Centralized numerical tolerances.
//!
//! Every validation threshold used by the matrix types, the spectral
//! routines and the QFI engines lives here so that type invariants and
//! tests agree on the same numbers.

/// Max entry-wise deviation allowed in `A - A^dag` for a Hermitian matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Max entry-wise deviation allowed in `U^dag U - I` for a unitary matrix.
pub const UNITARY_TOL: f64 = 1e-10;

/// Max deviation of `tr(rho)` from 1 for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;

/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues below this are rejected by the PSD square root; values in
/// `[PSD_CLAMP, 0)` are clamped to zero (finite-difference states
/// accumulate rounding).
pub const PSD_CLAMP: f64 = 1e-6;

/// Jacobi eigensolver convergence: off-diagonal Frobenius norm relative
/// to the Frobenius norm of the input.
pub const EIG_CONVERGENCE: f64 = 1e-13;

/// Jacobi eigensolver sweep cap.
pub const EIG_MAX_SWEEPS: usize = 100;

/// Probe amplitudes must be normalized to 1 within this tolerance.
pub const PROBE_NORM_TOL: f64 = 1e-12;

/// Eigenvalues of `(U + U^dag)/2` closer than this are treated as a
/// degenerate group when extracting eigen-angles.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Max `|tr(drho)|` accepted by the SLD engine.
pub const DRHO_TRACE_TOL: f64 = 1e-8;

/// Eigenvalue pairs of rho with `p_i + p_j` below this contribute zero
/// to the SLD quantum Fisher information.
pub const SLD_PAIR_CUTOFF: f64 = 1e-10;

/// Max Hermitization residual tolerated for the finite-difference local
/// generator `i (dU) U^dag`.
pub const GENERATOR_RESIDUAL_TOL: f64 = 1e-6;

/// Generators with eigenvalue spread below this carry no information
/// about the parameter.
pub const GENERATOR_SPREAD_MIN: f64 = 1e-12;

/// Default central-difference step for all finite-difference QFI routines.
pub const DEFAULT_DX: f64 = 1e-5;

/// Bisection resolution for gain-interval endpoints.
pub const GAIN_BISECT_TOL: f64 = 1e-4;

/// Controlled QFI must exceed the baseline by this margin before a gain
/// interval is searched for; below it the two are numerically equal
/// (commuting families sit exactly on the boundary).
pub const GAIN_MARGIN: f64 = 1e-9;

/// Eigenvalues of the fidelity inner matrix below this fraction of its
/// norm are rank-deficiency noise; their square roots would otherwise
/// pollute the trace at the 1e-8 level.
pub const FIDELITY_RANK_TOL: f64 = 1e-12;
