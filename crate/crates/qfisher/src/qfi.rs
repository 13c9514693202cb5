//! Quantum Fisher information engines.
//!
//! The channel QFI of a unitary family is computed two ways: from the
//! eigen-angle half-spread of the relative unitary
//! `U(x-dx/2)^dag U(x+dx/2)` (the finite-difference realization of
//! `8[1 - cos C]/dx^2`), and from the eigenvalue spread of the local
//! generator `h = i (dU) U^dag`. Pure-state and mixed-state (SLD) QFI
//! cover fixed probes and noisy outputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, DensityMatrix, HermitianMatrix, UnitaryMatrix};
use crate::spectral::c_te;
use crate::tol;

/// Which engine produced a QFI value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QfiMethod {
    CteFd,
    Generator,
    PureFd,
    Sld,
    BuresFd,
}

/// A Fisher-information value with its provenance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QfiResult {
    pub value: f64,
    pub method: QfiMethod,
    pub dx_used: Option<f64>,
}

impl QfiResult {
    fn new(value: f64, method: QfiMethod, dx_used: Option<f64>) -> Self {
        debug_assert!(value.is_finite() && value >= 0.0);
        Self {
            value,
            method,
            dx_used,
        }
    }
}

/// Normalized probe state amplitudes.
#[derive(Clone, Debug)]
pub struct Probe {
    amplitudes: Vec<Complex64>,
}

impl Probe {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > tol::PROBE_NORM_TOL {
            return Err(Error::InvalidParam(format!(
                "probe amplitudes must have norm 1, got {norm:.12}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary amplitudes into a probe.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParam("probe amplitudes must be nonzero".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::pure(&self.amplitudes).expect("probe is normalized")
    }
}

fn check_dx(dx: f64) -> Result<()> {
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::InvalidParam(format!(
            "finite-difference step must be positive, got {dx}"
        )));
    }
    Ok(())
}

/// Max QFI of the unitary channel at `x` from the eigen-angle half-spread
/// of `U(x-dx/2)^dag U(x+dx/2)`.
///
/// The value is `8[1 - cos C]/dx^2`, evaluated as `16 sin^2(C/2)/dx^2` so
/// no precision is lost at small `C`.
pub fn channel_qfi_fd<F>(make_unitary: F, x: f64, dx: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<UnitaryMatrix>,
{
    check_dx(dx)?;
    let plus = make_unitary(x + dx / 2.0)?;
    let minus = make_unitary(x - dx / 2.0)?;
    let relative = minus.adjoint().compose(&plus);
    let report = c_te(&relative)?;
    if report.wraparound_flag {
        return Err(Error::StepTooLarge {
            dx,
            spread: report.spread,
        });
    }
    let half = (report.c_te / 2.0).sin();
    Ok(QfiResult::new(
        16.0 * half * half / (dx * dx),
        QfiMethod::CteFd,
        Some(dx),
    ))
}

/// Local generator `h = i (dU) U^dag` by central difference, Hermitized.
pub fn local_generator<F>(make_unitary: F, x: f64, dx: f64) -> Result<HermitianMatrix>
where
    F: Fn(f64) -> Result<UnitaryMatrix>,
{
    check_dx(dx)?;
    let plus = make_unitary(x + dx / 2.0)?;
    let minus = make_unitary(x - dx / 2.0)?;
    let at_x = make_unitary(x)?;
    let du = (plus.matrix() - minus.matrix()).scale((1.0 / dx).into());
    let raw = (&du * &at_x.matrix().adjoint()).scale(Complex64::new(0.0, 1.0));
    let residual = raw.hermiticity_residual();
    if residual > tol::GENERATOR_RESIDUAL_TOL {
        return Err(Error::DerivativeInaccurate(residual));
    }
    HermitianMatrix::new(raw.hermitize())
}

/// Max QFI from the eigenvalue spread of the local generator.
pub fn channel_qfi_generator<F>(make_unitary: F, x: f64, dx: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<UnitaryMatrix>,
{
    let h = local_generator(make_unitary, x, dx)?;
    let spread = h.eigenvalue_spread()?;
    Ok(QfiResult::new(
        spread * spread,
        QfiMethod::Generator,
        Some(dx),
    ))
}

/// Equal superposition of the extremal eigenvectors of the co-moving
/// generator `i U^dag (dU)`; achieves the channel QFI.
///
/// The co-moving generator shares the spectrum of `i (dU) U^dag` but its
/// eigenvectors are rotated back to time zero, which is where the probe
/// is prepared.
pub fn optimal_probe<F>(make_unitary: F, x: f64, dx: f64) -> Result<Probe>
where
    F: Fn(f64) -> Result<UnitaryMatrix>,
{
    check_dx(dx)?;
    let plus = make_unitary(x + dx / 2.0)?;
    let minus = make_unitary(x - dx / 2.0)?;
    let at_x = make_unitary(x)?;
    let du = (plus.matrix() - minus.matrix()).scale((1.0 / dx).into());
    let raw = (&at_x.matrix().adjoint() * &du).scale(Complex64::new(0.0, 1.0));
    let residual = raw.hermiticity_residual();
    if residual > tol::GENERATOR_RESIDUAL_TOL {
        return Err(Error::DerivativeInaccurate(residual));
    }
    let g = HermitianMatrix::new(raw.hermitize())?;
    let spec = hermitian_eig(&g)?;
    let d = g.dim();
    let spread = spec.eigenvalues()[0] - spec.eigenvalues()[d - 1];
    if spread <= tol::GENERATOR_SPREAD_MIN {
        return Err(Error::NoInformation(spread));
    }
    let vmax = spec.eigenvector(0);
    let vmin = spec.eigenvector(d - 1);
    let amplitudes: Vec<Complex64> = vmax
        .iter()
        .zip(&vmin)
        .map(|(a, b)| (a + b) / Complex64::new(2.0f64.sqrt(), 0.0))
        .collect();
    Probe::normalized(amplitudes)
}

/// QFI of a fixed pure probe under the unitary family:
/// `8(1 - |<psi(x-dx/2)|psi(x+dx/2)>|)/dx^2`.
///
/// `1 - |o|` is recovered from `1 - |o|^2 = 2u - u^2 - im^2` with
/// `u = |psi_+ - psi_-|^2 / 2`, which keeps full precision at small `dx`.
pub fn pure_state_qfi<F>(make_unitary: F, probe: &Probe, x: f64, dx: f64) -> Result<QfiResult>
where
    F: Fn(f64) -> Result<UnitaryMatrix>,
{
    check_dx(dx)?;
    let plus = make_unitary(x + dx / 2.0)?;
    let minus = make_unitary(x - dx / 2.0)?;
    if plus.dim() != probe.dim() {
        return Err(Error::DimensionMismatch(plus.dim(), probe.dim()));
    }
    let psi_p = plus.matrix().mul_vec(probe.amplitudes());
    let psi_m = minus.matrix().mul_vec(probe.amplitudes());
    let diff_sq: f64 = psi_p
        .iter()
        .zip(&psi_m)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let u = diff_sq / 2.0;
    let overlap_im: f64 = psi_m
        .iter()
        .zip(&psi_p)
        .map(|(m, p)| (m.conj() * p).im)
        .sum();
    // s = 1 - |o|^2
    let s = 2.0 * u - u * u - overlap_im * overlap_im;
    let abs_o = (1.0 - s).max(0.0).sqrt();
    let value = (8.0 * s / ((1.0 + abs_o) * dx * dx)).max(0.0);
    Ok(QfiResult::new(value, QfiMethod::PureFd, Some(dx)))
}

/// Mixed-state QFI by the symmetric logarithmic derivative:
/// `sum_{ij} 2 |<i|drho|j>|^2 / (p_i + p_j)` over pairs with
/// `p_i + p_j` above the rank cutoff.
pub fn mixed_state_qfi_sld(rho: &DensityMatrix, drho: &HermitianMatrix) -> Result<QfiResult> {
    if rho.dim() != drho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), drho.dim()));
    }
    let tr = drho.matrix().trace();
    if tr.norm() > tol::DRHO_TRACE_TOL {
        return Err(Error::InconsistentDerivative(tr.norm()));
    }
    let spec = hermitian_eig(&rho.as_hermitian())?;
    let d = rho.dim();
    let basis: Vec<Vec<Complex64>> = (0..d).map(|k| spec.eigenvector(k)).collect();
    let dcols: Vec<Vec<Complex64>> = basis.iter().map(|v| drho.matrix().mul_vec(v)).collect();
    let mut value = 0.0;
    for i in 0..d {
        for j in 0..d {
            let weight = spec.eigenvalues()[i].max(0.0) + spec.eigenvalues()[j].max(0.0);
            if weight <= tol::SLD_PAIR_CUTOFF {
                continue;
            }
            let elem: Complex64 = basis[i]
                .iter()
                .zip(&dcols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            value += 2.0 * elem.norm_sqr() / weight;
        }
    }
    Ok(QfiResult::new(value, QfiMethod::Sld, None))
}

/// Cramer-Rao bound `1/sqrt(n J)`; `J = 0` yields `+inf` rather than an
/// error.
pub fn precision_bound(j: f64, n: u64) -> Result<f64> {
    if !(j >= 0.0) || !j.is_finite() {
        return Err(Error::InvalidParam(format!(
            "Fisher information must be finite and nonnegative, got {j}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParam("repetition count must be >= 1".into()));
    }
    if j == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (n as f64 * j).sqrt())
}
