//! Dense complex matrix kernel for small dimensions (d <= ~8).
//!
//! Provides the algebra, a cyclic-Jacobi Hermitian eigensolver, the unitary
//! exponential `e^{-iHt}`, the PSD square root, Uhlmann fidelity and the
//! Bures distance. All operations are pure functions on immutable values.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = self.get(i, j);
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Build from rows, checking squareness and finiteness.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParam("matrix dimension must be >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            for &z in row {
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite);
                }
                data.push(z);
            }
        }
        Ok(Self { dim, data })
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.dim + j] = z;
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(A + A^dag)/2`, exactly Hermitian by construction.
    pub fn hermitize(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let z = (self.get(i, j) + self.get(j, i).conj()) * 0.5;
                out.set(i, j, z);
            }
        }
        out
    }

    /// Max entry of `A - A^dag`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Max entry of `M^dag M - I`.
    pub fn unitarity_residual(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.dim))
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..d {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// Pauli matrices in the convention used throughout: `sigma3 = diag(-1, 1)`.
pub mod pauli {
    use super::ComplexMatrix;
    use num_complex::Complex64;

    pub fn sigma1() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, Complex64::new(1.0, 0.0));
        m.set(1, 0, Complex64::new(1.0, 0.0));
        m
    }

    pub fn sigma2() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, Complex64::new(0.0, -1.0));
        m.set(1, 0, Complex64::new(0.0, 1.0));
        m
    }

    /// Note the sign convention: `diag(-1, 1)`.
    pub fn sigma3() -> ComplexMatrix {
        ComplexMatrix::diag(&[-1.0, 1.0])
    }
}

/// Hermitian matrix, `A = A^dag` within [`tol::HERMITIAN_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let resid = m.hermiticity_residual();
        if resid > tol::HERMITIAN_TOL {
            return Err(Error::NotHermitian(resid));
        }
        // store the exactly Hermitian part so downstream reconstruction
        // tolerances are not eaten by the input residual
        Ok(Self(m.hermitize()))
    }

    pub fn zero(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Largest minus smallest eigenvalue.
    pub fn eigenvalue_spread(&self) -> Result<f64> {
        let s = hermitian_eig(self)?;
        Ok(s.eigenvalues()[0] - s.eigenvalues()[s.eigenvalues().len() - 1])
    }
}

/// Unitary matrix, `U^dag U = I` within [`tol::UNITARY_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let resid = m.unitarity_residual();
        if resid > tol::UNITARY_TOL {
            return Err(Error::NotUnitary(resid));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `U V`; products of unitaries stay unitary to machine precision.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self(&self.0 * &rhs.0)
    }
}

/// True iff `max |(M^dag M - I)_ij| <= tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.unitarity_residual() <= tol
}

/// Density matrix: Hermitian, unit trace, positive semi-definite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let herm = m.hermiticity_residual();
        if herm > tol::HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity residual {herm:.3e}"
            )));
        }
        let m = m.hermitize();
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol::TRACE_TOL || tr.im.abs() > tol::TRACE_TOL {
            return Err(Error::InvalidDensity(format!(
                "trace {:.12} + {:.3e}i, expected 1",
                tr.re, tr.im
            )));
        }
        let spec = hermitian_eig(&HermitianMatrix(m.clone()))?;
        let min_eig = *spec
            .eigenvalues()
            .last()
            .expect("dimension >= 1");
        if min_eig < -tol::PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Pure state `|psi><psi|` from normalized amplitudes.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > tol::PROBE_NORM_TOL {
            return Err(Error::InvalidDensity(format!(
                "pure-state amplitudes have norm {:.12}",
                norm_sqr.sqrt()
            )));
        }
        let d = amplitudes.len();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, amplitudes[i] * amplitudes[j].conj());
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `U rho U^dag`.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Self {
        Self(&(u.matrix() * &self.0) * &u.matrix().adjoint())
    }

    pub fn purity(&self) -> f64 {
        (&self.0 * &self.0).trace().re
    }

    pub fn as_hermitian(&self) -> HermitianMatrix {
        HermitianMatrix(self.0.clone())
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending; `eigenvectors` holds the matching
/// orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        let d = self.eigenvectors.dim();
        (0..d).map(|i| self.eigenvectors.get(i, k)).collect()
    }

    /// `V diag(f(lambda)) V^dag`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.eigenvectors.dim();
        let mut out = ComplexMatrix::zeros(d);
        for k in 0..d {
            let fk = f(self.eigenvalues[k]);
            for i in 0..d {
                let vik = self.eigenvectors.get(i, k);
                for j in 0..d {
                    let v = out.get(i, j) + fk * vik * self.eigenvectors.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Converges when the off-diagonal Frobenius norm drops below
/// `EIG_CONVERGENCE * ||A||_F`, with a hard cap of `EIG_MAX_SWEEPS` sweeps.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<Spectrum> {
    let d = a.dim();
    let mut m = a.matrix().clone();
    let mut v = ComplexMatrix::identity(d);
    let norm = m.frobenius_norm();
    let threshold = tol::EIG_CONVERGENCE * norm;

    let mut converged = norm == 0.0 || d == 1;
    let mut sweeps = 0;
    while !converged && sweeps < tol::EIG_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..d - 1 {
            for q in p + 1..d {
                let g = m.get(p, q).norm();
                if g <= threshold * 1e-3 / (d as f64) {
                    continue;
                }
                let alpha = m.get(p, p).re;
                let beta = m.get(q, q).re;
                let phase = m.get(p, q) / g;
                let tau = (alpha - beta) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (tau * tau + 1.0).sqrt())
                } else {
                    1.0 / (tau - (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Plane rotation J: J_pp = c, J_pq = -s*phase,
                // J_qp = s*conj(phase), J_qq = c. Apply M <- J^dag M J.
                let sp = phase * s;
                for k in 0..d {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, mkp * c + mkq * sp.conj());
                    m.set(k, q, mkq * c - mkp * sp);
                }
                for k in 0..d {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, mpk * c + mqk * sp);
                    m.set(q, k, mqk * c - mpk * sp.conj());
                }
                for k in 0..d {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * sp.conj());
                    v.set(k, q, vkq * c - vkp * sp);
                }
                // kill rounding left on the eliminated pair
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));
                let dpp = m.get(p, p);
                let dqq = m.get(q, q);
                m.set(p, p, Complex64::new(dpp.re, 0.0));
                m.set(q, q, Complex64::new(dqq.re, 0.0));
            }
        }
        sweeps += 1;
    }

    let residual = off_diagonal_norm(&m);
    if !converged && residual > threshold {
        return Err(Error::EigNonConvergence {
            residual,
            sweeps,
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let eigs: Vec<f64> = (0..d).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).expect("finite eigenvalues"));

    let mut vectors = ComplexMatrix::zeros(d);
    let mut values = Vec::with_capacity(d);
    for (col, &src) in order.iter().enumerate() {
        values.push(eigs[src]);
        for row in 0..d {
            vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(Spectrum {
        eigenvalues: values,
        eigenvectors: vectors,
    })
}

/// `e^{-iHt}` through the eigendecomposition of `H`; exactly unitary up to
/// the eigensolver's accuracy.
pub fn expm_i(h: &HermitianMatrix, t: f64) -> Result<UnitaryMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParam(format!("time must be finite, got {t}")));
    }
    let spec = hermitian_eig(h)?;
    let m = spec.apply(|lambda| Complex64::from_polar(1.0, -lambda * t));
    UnitaryMatrix::new(m)
}

/// Principal square root of a PSD Hermitian matrix.
///
/// Eigenvalues in `[-PSD_CLAMP, 0)` are clamped to zero; anything lower is
/// rejected as an invalid state.
pub fn psd_sqrt(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let spec = hermitian_eig(a)?;
    let min_eig = *spec.eigenvalues().last().expect("dimension >= 1");
    if min_eig < -tol::PSD_CLAMP {
        return Err(Error::InvalidState(min_eig));
    }
    let m = spec.apply(|lambda| Complex64::new(lambda.max(0.0).sqrt(), 0.0));
    HermitianMatrix::new(m.hermitize())
}

/// Uhlmann fidelity `Tr sqrt(rho1^{1/2} rho2 rho1^{1/2})`, in [0, 1].
pub fn fidelity(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch(rho1.dim(), rho2.dim()));
    }
    let sqrt1 = psd_sqrt(&rho1.as_hermitian())?;
    let inner = &(sqrt1.matrix() * rho2.matrix()) * sqrt1.matrix();
    let spec = hermitian_eig(&HermitianMatrix(inner.hermitize()))?;
    // eigenvalues at rank-noise level must not leak sqrt(noise) into the trace
    let clamp = tol::FIDELITY_RANK_TOL * inner.frobenius_norm();
    let f: f64 = spec
        .eigenvalues()
        .iter()
        .map(|&lambda| if lambda > clamp { lambda.sqrt() } else { 0.0 })
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Bures distance `sqrt(2 - 2 F)`, in [0, sqrt(2)].
pub fn bures_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> Result<f64> {
    let f = fidelity(rho1, rho2)?;
    Ok((2.0 - 2.0 * f).max(0.0).sqrt())
}
