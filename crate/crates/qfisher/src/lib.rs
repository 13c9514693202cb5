//! Quantum Fisher information for Hamiltonian parameter estimation with
//! coherent feedback controls.
//!
//! The crate computes the maximal QFI of unitary channels through the
//! eigen-angle spread of `U_x^dag U_{x+dx}`, simulates feedback-controlled
//! evolutions (including mis-estimated controls and per-segment dephasing
//! noise), and exposes the closed forms, gain intervals and the `T^2`
//! scaling of the optimally controlled scheme.
//!
//! Modules:
//! - [`matrix`]: dense complex kernel (Jacobi eigensolver, `e^{-iHt}`,
//!   PSD square root, fidelity, Bures distance);
//! - [`spectral`]: eigen-angles of unitaries and the spread functional;
//! - [`family`]: parameter-indexed Hamiltonian families and closed forms;
//! - [`qfi`]: channel/pure/mixed QFI engines and optimal probes;
//! - [`feedback`]: feedback schedules, beta sweeps, gain intervals,
//!   scaling curves;
//! - [`noisy`]: Kraus dephasing segments and probe-optimized mixed QFI;
//! - [`exec`]: grid executor (rayon-parallel with the `parallel` feature,
//!   sequential fallback without).

pub mod error;
pub mod exec;
pub mod family;
pub mod feedback;
pub mod matrix;
pub mod noisy;
pub mod qfi;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil;
