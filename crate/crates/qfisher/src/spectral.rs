//! Eigen-angles of unitaries and the half-spread functional that controls
//! the minimal fidelity over input states.
//!
//! A unitary `U` has eigenvalues `e^{-i theta_j}` with `theta_j` in
//! `(-pi, pi]`. The half-spread `(theta_max - theta_min)/2` determines
//! `min_rho F(rho, U rho U^dag) = cos((theta_max - theta_min)/2)` whenever
//! the spread does not exceed pi.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eig, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
use crate::tol;

/// Eigen-angles of a unitary, sorted descending, with matching
/// eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenAngles {
    angles: Vec<f64>,
    vectors: ComplexMatrix,
}

impl EigenAngles {
    /// Angles in `(-pi, pi]`, sorted descending.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn dim(&self) -> usize {
        self.angles.len()
    }

    /// Eigenvector for the k-th angle (descending order).
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let d = self.vectors.dim();
        (0..d).map(|i| self.vectors.get(i, k)).collect()
    }

    pub fn max_angle(&self) -> f64 {
        self.angles[0]
    }

    pub fn min_angle(&self) -> f64 {
        self.angles[self.angles.len() - 1]
    }
}

/// Half-spread report for a unitary.
#[derive(Clone, Copy, Debug)]
pub struct SpreadReport {
    /// Half the eigen-angle spread, in radians.
    pub c_te: f64,
    /// `theta_max - theta_min` on the fixed `(-pi, pi]` branch.
    pub spread: f64,
    /// Set when the spread exceeds pi; the half-spread then no longer
    /// characterizes the minimal fidelity.
    pub wraparound_flag: bool,
}

fn quadratic_form(m: &ComplexMatrix, v: &[Complex64]) -> f64 {
    let mv = m.mul_vec(v);
    v.iter()
        .zip(&mv)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

/// Eigen-angles of `U` through the commuting Hermitian pair
/// `A = (U + U^dag)/2`, `B = (U - U^dag)/(2i)`.
///
/// `A` is diagonalized first; inside each degenerate eigenspace of `A`
/// the restriction of `B` is diagonalized, and each joint eigenvector `v`
/// yields `theta = -atan2(<v|B|v>, <v|A|v>)` on the `(-pi, pi]` branch.
pub fn eigen_angles(u: &UnitaryMatrix) -> Result<EigenAngles> {
    let d = u.dim();
    let um = u.matrix();
    let ud = um.adjoint();
    let a = HermitianMatrix::new((um + &ud).scale(Complex64::new(0.5, 0.0)).hermitize())?;
    let b_mat = (um - &ud)
        .scale(Complex64::new(0.0, -0.5))
        .hermitize();
    let b = HermitianMatrix::new(b_mat)?;

    let spec_a = hermitian_eig(&a)?;
    let eig_a = spec_a.eigenvalues();

    // joint eigenbasis: refine degenerate groups of A against B
    let mut joint = ComplexMatrix::zeros(d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (eig_a[end - 1] - eig_a[end]).abs() <= tol::DEGENERACY_TOL {
            end += 1;
        }
        let g = end - start;
        if g == 1 {
            for i in 0..d {
                joint.set(i, start, spec_a.eigenvectors().get(i, start));
            }
        } else {
            // restriction of B to the group span
            let cols: Vec<Vec<Complex64>> =
                (start..end).map(|k| spec_a.eigenvector(k)).collect();
            let b_cols: Vec<Vec<Complex64>> =
                cols.iter().map(|c| b.matrix().mul_vec(c)).collect();
            let mut restr = ComplexMatrix::zeros(g);
            for (r, col_r) in cols.iter().enumerate() {
                for (c, b_col) in b_cols.iter().enumerate() {
                    let entry: Complex64 = col_r
                        .iter()
                        .zip(b_col)
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    restr.set(r, c, entry);
                }
            }
            let spec_b = hermitian_eig(&HermitianMatrix::new(restr.hermitize())?)?;
            for k in 0..g {
                for i in 0..d {
                    let mut z = Complex64::new(0.0, 0.0);
                    for (r, col_r) in cols.iter().enumerate() {
                        z += col_r[i] * spec_b.eigenvectors().get(r, k);
                    }
                    joint.set(i, start + k, z);
                }
            }
        }
        start = end;
    }

    let mut pairs: Vec<(f64, usize)> = (0..d)
        .map(|k| {
            let v: Vec<Complex64> = (0..d).map(|i| joint.get(i, k)).collect();
            let cos_th = quadratic_form(a.matrix(), &v);
            let sin_th = -quadratic_form(b.matrix(), &v);
            let mut theta = f64::atan2(sin_th, cos_th);
            if theta <= -std::f64::consts::PI {
                theta = std::f64::consts::PI;
            }
            (theta, k)
        })
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).expect("finite angles"));

    let mut vectors = ComplexMatrix::zeros(d);
    let mut angles = Vec::with_capacity(d);
    for (col, (theta, src)) in pairs.iter().enumerate() {
        angles.push(*theta);
        for row in 0..d {
            vectors.set(row, col, joint.get(row, *src));
        }
    }
    Ok(EigenAngles { angles, vectors })
}

/// Half-spread `C(U) = (theta_max - theta_min)/2` of the eigen-angles.
pub fn c_te(u: &UnitaryMatrix) -> Result<SpreadReport> {
    let ea = eigen_angles(u)?;
    let spread = ea.max_angle() - ea.min_angle();
    Ok(SpreadReport {
        c_te: spread / 2.0,
        spread,
        wraparound_flag: spread > std::f64::consts::PI,
    })
}

/// `min over pure inputs of F(rho, U rho U^dag) = cos(C(U))`, valid while
/// the eigen-angle spread stays within pi.
pub fn min_fidelity_over_inputs(u: &UnitaryMatrix) -> Result<f64> {
    let report = c_te(u)?;
    if report.wraparound_flag {
        return Err(Error::SpreadExceedsPi {
            spread: report.spread,
        });
    }
    Ok(report.c_te.cos())
}
