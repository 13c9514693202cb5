//! Parameter-indexed Hamiltonian families `x -> H(x)` with analytic
//! derivatives, their evolution unitaries, and the closed forms for the
//! direction-field and multiplicative cases.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{expm_i, pauli, ComplexMatrix, HermitianMatrix, UnitaryMatrix};

/// Hamiltonian family kinds:
/// - `Multiplicative`: `H(x) = x H`;
/// - `DirectionField`: `H(x) = B (cos(x) sigma1 + sin(x) sigma3)` with
///   `sigma3 = diag(-1, 1)`;
/// - `TrigMatrix`: `H(x) = A0 + sum_k A_k cos(kx) + B_k sin(kx)` with
///   Hermitian coefficient matrices.
#[derive(Clone, Debug)]
pub enum HamiltonianFamily {
    Multiplicative {
        h: HermitianMatrix,
    },
    DirectionField {
        b: f64,
    },
    TrigMatrix {
        a0: HermitianMatrix,
        harmonics: Vec<(HermitianMatrix, HermitianMatrix)>,
    },
}

impl HamiltonianFamily {
    pub fn multiplicative(h: HermitianMatrix) -> Self {
        Self::Multiplicative { h }
    }

    pub fn direction_field(b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParam(format!(
                "direction-field strength B must be positive, got {b}"
            )));
        }
        Ok(Self::DirectionField { b })
    }

    pub fn trig_matrix(
        a0: HermitianMatrix,
        harmonics: Vec<(HermitianMatrix, HermitianMatrix)>,
    ) -> Result<Self> {
        let dim = a0.dim();
        for (k, (a, b)) in harmonics.iter().enumerate() {
            if a.dim() != dim || b.dim() != dim {
                return Err(Error::InvalidParam(format!(
                    "harmonic {} coefficients have dimension {}x{}, expected {dim}",
                    k + 1,
                    a.dim(),
                    b.dim()
                )));
            }
        }
        Ok(Self::TrigMatrix { a0, harmonics })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Multiplicative { h } => h.dim(),
            Self::DirectionField { .. } => 2,
            Self::TrigMatrix { a0, .. } => a0.dim(),
        }
    }

    /// Field strength when the family is a direction field.
    pub fn field_strength(&self) -> Option<f64> {
        match self {
            Self::DirectionField { b } => Some(*b),
            _ => None,
        }
    }
}

/// `H(x)`.
pub fn evaluate(f: &HamiltonianFamily, x: f64) -> HermitianMatrix {
    let m = match f {
        HamiltonianFamily::Multiplicative { h } => h.matrix().scale(x.into()),
        HamiltonianFamily::DirectionField { b } => {
            &pauli::sigma1().scale((b * x.cos()).into())
                + &pauli::sigma3().scale((b * x.sin()).into())
        }
        HamiltonianFamily::TrigMatrix { a0, harmonics } => {
            let mut m = a0.matrix().clone();
            for (i, (a, b)) in harmonics.iter().enumerate() {
                let k = (i + 1) as f64;
                m = &m + &a.matrix().scale((k * x).cos().into());
                m = &m + &b.matrix().scale((k * x).sin().into());
            }
            m
        }
    };
    HermitianMatrix::new(m).expect("trigonometric combination of Hermitian matrices")
}

/// Analytic derivative `dH/dx`.
pub fn derivative(f: &HamiltonianFamily, x: f64) -> HermitianMatrix {
    let m = match f {
        HamiltonianFamily::Multiplicative { h } => h.matrix().clone(),
        HamiltonianFamily::DirectionField { b } => {
            &pauli::sigma1().scale((-b * x.sin()).into())
                + &pauli::sigma3().scale((b * x.cos()).into())
        }
        HamiltonianFamily::TrigMatrix { harmonics, .. } => {
            let dim = f.dim();
            let mut m = ComplexMatrix::zeros(dim);
            for (i, (a, b)) in harmonics.iter().enumerate() {
                let k = (i + 1) as f64;
                m = &m + &a.matrix().scale((-k * (k * x).sin()).into());
                m = &m + &b.matrix().scale((k * (k * x).cos()).into());
            }
            m
        }
    };
    HermitianMatrix::new(m).expect("trigonometric combination of Hermitian matrices")
}

/// `e^{-i H(x) t}`.
pub fn unitary_at(f: &HamiltonianFamily, x: f64, t: f64) -> Result<UnitaryMatrix> {
    expm_i(&evaluate(f, x), t)
}

/// Max QFI of the uncontrolled direction-field evolution: `4 sin^2(BT)`.
pub fn direction_field_qfi_closed_form(b: f64, t: f64) -> f64 {
    let s = (b * t).sin();
    4.0 * s * s
}

/// `cos B' = cos^2(BT) + cos(dx) sin^2(BT)` for the direction-field
/// relative unitary `U_x^dag U_{x+dx} = e^{i B'(a'.sigma)}`.
pub fn cos_bprime(b: f64, t: f64, dx: f64) -> f64 {
    let c = (b * t).cos();
    let s = (b * t).sin();
    c * c + dx.cos() * s * s
}

/// Max QFI under the asymptotically optimal feedback scheme:
/// `T^2 (lambda_max(dH) - lambda_min(dH))^2`.
pub fn universal_qfi(f: &HamiltonianFamily, x: f64, t_total: f64) -> Result<f64> {
    if !(t_total > 0.0) {
        return Err(Error::InvalidParam(format!(
            "total time must be positive, got {t_total}"
        )));
    }
    let spread = derivative(f, x).eigenvalue_spread()?;
    Ok(t_total * t_total * spread * spread)
}

/// Validated numeric bundle for an evolution: parameter point, total
/// time, segment time and finite-difference step.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub x: f64,
    pub t_total: f64,
    pub t_segment: f64,
    pub dx: f64,
}

impl EvolutionParams {
    pub fn new(x: f64, t_total: f64, t_segment: f64, dx: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidParam(format!("x must be finite, got {x}")));
        }
        if !(t_total > 0.0) {
            return Err(Error::InvalidParam(format!(
                "total time must be positive, got {t_total}"
            )));
        }
        if !(t_segment > 0.0) {
            return Err(Error::InvalidParam(format!(
                "segment time must be positive, got {t_segment}"
            )));
        }
        if !(dx > 0.0) {
            return Err(Error::InvalidParam(format!(
                "finite-difference step must be positive, got {dx}"
            )));
        }
        Ok(Self {
            x,
            t_total,
            t_segment,
            dx,
        })
    }
}

/// Complex entry as a `[re, im]` pair (wire format).
pub type EntrySpec = [f64; 2];
/// Matrix as nested rows of `[re, im]` pairs (wire format).
pub type MatrixSpec = Vec<Vec<EntrySpec>>;

/// One trigonometric harmonic: coefficient of `cos(kx)` and `sin(kx)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    pub cos: MatrixSpec,
    pub sin: MatrixSpec,
}

/// Family specification record used by config files; matrices are
/// validated for Hermiticity on load.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Multiplicative { h: MatrixSpec },
    DirectionField { b: f64 },
    TrigMatrix { a0: MatrixSpec, harmonics: Vec<HarmonicSpec> },
}

fn matrix_from_spec(spec: &MatrixSpec, name: &str) -> Result<HermitianMatrix> {
    let rows: Vec<Vec<Complex64>> = spec
        .iter()
        .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
        .collect();
    let m = ComplexMatrix::from_rows(&rows)
        .map_err(|e| Error::InvalidParam(format!("{name}: {e}")))?;
    HermitianMatrix::new(m).map_err(|e| Error::InvalidParam(format!("{name}: {e}")))
}

impl FamilySpec {
    pub fn build(&self) -> Result<HamiltonianFamily> {
        match self {
            FamilySpec::Multiplicative { h } => Ok(HamiltonianFamily::multiplicative(
                matrix_from_spec(h, "multiplicative base matrix")?,
            )),
            FamilySpec::DirectionField { b } => HamiltonianFamily::direction_field(*b),
            FamilySpec::TrigMatrix { a0, harmonics } => {
                let a0 = matrix_from_spec(a0, "trig coefficient a0")?;
                let built: Result<Vec<_>> = harmonics
                    .iter()
                    .enumerate()
                    .map(|(i, h)| {
                        let k = i + 1;
                        Ok((
                            matrix_from_spec(&h.cos, &format!("harmonic {k} cos coefficient"))?,
                            matrix_from_spec(&h.sin, &format!("harmonic {k} sin coefficient"))?,
                        ))
                    })
                    .collect();
                HamiltonianFamily::trig_matrix(a0, built?)
            }
        }
    }
}
