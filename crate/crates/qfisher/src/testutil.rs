//! Shared helpers for unit tests: seeded random matrices and states.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::Rng;

use crate::matrix::{expm_i, ComplexMatrix, DensityMatrix, HermitianMatrix, UnitaryMatrix};

pub fn random_complex_matrix(dim: usize, rng: &mut StdRng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(
                i,
                j,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    m
}

pub fn random_hermitian(dim: usize, rng: &mut StdRng) -> HermitianMatrix {
    HermitianMatrix::new(random_complex_matrix(dim, rng).hermitize()).unwrap()
}

pub fn random_unitary(dim: usize, rng: &mut StdRng) -> UnitaryMatrix {
    let h = random_hermitian(dim, rng);
    expm_i(&h, rng.gen_range(0.1..2.0)).unwrap()
}

pub fn random_density(dim: usize, rng: &mut StdRng) -> DensityMatrix {
    let m = random_complex_matrix(dim, rng);
    let psd = &m * &m.adjoint();
    let tr = psd.trace().re;
    DensityMatrix::new(psd.scale(Complex64::new(1.0 / tr, 0.0))).unwrap()
}

pub fn random_pure_amplitudes(dim: usize, rng: &mut StdRng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
