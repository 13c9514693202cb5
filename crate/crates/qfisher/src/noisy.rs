//! Dephasing Kraus segments interleaved with feedback controls, and the
//! probe-optimized mixed-state QFI of the resulting channel.
//!
//! Each free segment is the two-operator channel
//! `K1 = sqrt((1+eta)/2) U(x)`, `K2 = sqrt((1-eta)/2) sigma3 U(x)` with
//! `U(x) = e^{-iH(x)t}`; the off-diagonal coherence in the `sigma3`
//! eigenbasis is attenuated by `eta` per segment.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::family::{self, HamiltonianFamily};
use crate::feedback::{
    interval_from_grid, optimal_schedule, Estimate, FeedbackSchedule, SweepMeta, SweepResult,
};
use crate::matrix::{pauli, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::qfi::{mixed_state_qfi_sld, Probe, QfiResult};
use crate::tol;

/// Completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParam(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        let dim = ops[0].dim();
        if ops.iter().any(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        let mut sum = ComplexMatrix::zeros(dim);
        for k in &ops {
            sum = &sum + &(&k.adjoint() * k);
        }
        let resid = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if resid > tol::UNITARY_TOL {
            return Err(Error::InvalidParam(format!(
                "Kraus completeness violated: max |sum K^dag K - I| = {resid:.3e}"
            )));
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops[0].dim()
    }

    fn apply_raw(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.dim());
        for k in &self.ops {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::InvalidParam(format!(
            "eta must lie in [0, 1], got {eta}"
        )));
    }
    Ok(())
}

/// Dephasing segment after the free evolution `U(x) = e^{-iH(x)t}`:
/// `K1 = sqrt((1+eta)/2) U(x)`, `K2 = sqrt((1-eta)/2) sigma3 U(x)`.
pub fn dephasing_after_unitary(
    f: &HamiltonianFamily,
    x: f64,
    t: f64,
    eta: f64,
) -> Result<KrausChannel> {
    check_eta(eta)?;
    if f.dim() != 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    let u = family::unitary_at(f, x, t)?;
    let k1 = u.matrix().scale((((1.0 + eta) / 2.0).sqrt()).into());
    let k2 = (&pauli::sigma3() * u.matrix()).scale((((1.0 - eta) / 2.0).sqrt()).into());
    KrausChannel::new(vec![k1, k2])
}

/// `rho -> sum_k K rho K^dag`.
pub fn apply_channel(c: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if c.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(c.dim(), rho.dim()));
    }
    DensityMatrix::new(c.apply_raw(rho.matrix()))
}

/// Noisy version of the controlled evolution: the product
/// `U_t C_1 U_t C_2 ... U_t C_m` walked right-to-left on the density
/// matrix, with every `U_t` slot replaced by the dephasing segment. At
/// `eta = 1` this reproduces `total_unitary` exactly for any schedule.
pub fn evolve_noisy(
    f: &HamiltonianFamily,
    x: f64,
    s: &FeedbackSchedule,
    eta: f64,
    probe: &Probe,
) -> Result<DensityMatrix> {
    check_eta(eta)?;
    if probe.dim() != f.dim() {
        return Err(Error::DimensionMismatch(probe.dim(), f.dim()));
    }
    let segment = dephasing_after_unitary(f, x, s.segment_time(), eta)?;
    let mut rho = probe.density().matrix().clone();
    for control in s.controls().iter().rev() {
        let cm = control.matrix();
        rho = &(cm * &rho) * &cm.adjoint();
        rho = segment.apply_raw(&rho);
    }
    DensityMatrix::new(rho)
}

/// Mixed-state QFI of the noisy controlled evolution at a fixed probe:
/// central-difference `drho` (controls held fixed) into the SLD engine.
pub fn noisy_qfi(
    f: &HamiltonianFamily,
    x: f64,
    s: &FeedbackSchedule,
    eta: f64,
    probe: &Probe,
    dx: f64,
) -> Result<QfiResult> {
    if !(dx > 0.0) || !dx.is_finite() {
        return Err(Error::InvalidParam(format!(
            "finite-difference step must be positive, got {dx}"
        )));
    }
    let plus = evolve_noisy(f, x + dx / 2.0, s, eta, probe)?;
    let minus = evolve_noisy(f, x - dx / 2.0, s, eta, probe)?;
    let at_x = evolve_noisy(f, x, s, eta, probe)?;
    let drho = HermitianMatrix::new(
        (plus.matrix() - minus.matrix())
            .scale((1.0 / dx).into())
            .hermitize(),
    )?;
    let mut result = mixed_state_qfi_sld(&at_x, &drho)?;
    result.dx_used = Some(dx);
    Ok(result)
}

/// Probe-search configuration: azimuth grid resolution (the polar grid
/// uses half as many points) and the number of step-halving refinement
/// rounds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ProbeSearch {
    pub grid_points_per_angle: usize,
    pub refine_iters: usize,
}

impl Default for ProbeSearch {
    fn default() -> Self {
        Self {
            grid_points_per_angle: 64,
            refine_iters: 6,
        }
    }
}

fn bloch_probe(phi: f64, theta: f64) -> Probe {
    Probe::new(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
    .expect("Bloch amplitudes are normalized")
}

/// Maximize the noisy QFI over pure qubit probes: deterministic coarse
/// Bloch grid, then coordinate refinement with step halving. Ties keep
/// the earlier (lower-index) candidate.
pub fn max_noisy_qfi(
    f: &HamiltonianFamily,
    x: f64,
    s: &FeedbackSchedule,
    eta: f64,
    dx: f64,
    search: &ProbeSearch,
) -> Result<(QfiResult, Probe)> {
    if f.dim() != 2 {
        return Err(Error::UnsupportedDimension(f.dim()));
    }
    let n_az = search.grid_points_per_angle.max(2);
    let n_pol = (n_az / 2).max(1);
    let qfi_at = |phi: f64, theta: f64| -> Result<f64> {
        Ok(noisy_qfi(f, x, s, eta, &bloch_probe(phi, theta), dx)?.value)
    };

    let grid: Result<Vec<f64>> = exec::map_grid(n_az * n_pol, |idx| {
        let i = idx / n_pol;
        let j = idx % n_pol;
        let phi = 2.0 * std::f64::consts::PI * i as f64 / n_az as f64;
        let theta = std::f64::consts::PI * (j as f64 + 0.5) / n_pol as f64;
        qfi_at(phi, theta)
    })
    .into_iter()
    .collect();
    let grid = grid?;
    let (mut best_idx, mut best) = (0usize, f64::NEG_INFINITY);
    for (idx, &v) in grid.iter().enumerate() {
        if v > best {
            best = v;
            best_idx = idx;
        }
    }
    let mut phi =
        2.0 * std::f64::consts::PI * (best_idx / n_pol) as f64 / n_az as f64;
    let mut theta =
        std::f64::consts::PI * ((best_idx % n_pol) as f64 + 0.5) / n_pol as f64;

    let mut step_phi = 2.0 * std::f64::consts::PI / n_az as f64;
    let mut step_theta = std::f64::consts::PI / n_pol as f64;
    for _ in 0..search.refine_iters {
        loop {
            let mut improved = false;
            for (dp, dt) in [
                (step_phi, 0.0),
                (-step_phi, 0.0),
                (0.0, step_theta),
                (0.0, -step_theta),
            ] {
                let v = qfi_at(phi + dp, theta + dt)?;
                if v > best {
                    best = v;
                    phi += dp;
                    theta += dt;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        step_phi /= 2.0;
        step_theta /= 2.0;
    }

    let probe = bloch_probe(phi, theta);
    let mut result = noisy_qfi(f, x, s, eta, &probe, dx)?;
    result.value = best;
    Ok((result, probe))
}

/// Sweep configuration for the noisy gain-interval experiment.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoisySweepConfig {
    pub eta: f64,
    pub m: usize,
    pub t_total: f64,
    pub x_true: f64,
    pub beta_grid: Vec<f64>,
    pub dx: f64,
    pub probe_search: ProbeSearch,
}

/// Probe-maximized controlled QFI across the beta grid, against the
/// identity-control baseline under the same noise (probe re-optimized).
pub fn noisy_beta_sweep(cfg: &NoisySweepConfig, f: &HamiltonianFamily) -> Result<SweepResult> {
    check_eta(cfg.eta)?;
    if cfg.beta_grid.is_empty() {
        return Err(Error::InvalidParam("beta grid must be nonempty".into()));
    }
    if cfg.beta_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParam("beta grid must be sorted".into()));
    }
    if cfg.m == 0 {
        return Err(Error::InvalidParam("segment count must be >= 1".into()));
    }
    let controlled_at = |beta: f64| -> Result<f64> {
        let schedule = optimal_schedule(
            f,
            Estimate::new((1.0 + beta) * cfg.x_true)?,
            cfg.m,
            cfg.t_total,
        )?;
        Ok(
            max_noisy_qfi(f, cfg.x_true, &schedule, cfg.eta, cfg.dx, &cfg.probe_search)?
                .0
                .value,
        )
    };
    let values: Result<Vec<f64>> =
        exec::map_grid(cfg.beta_grid.len(), |i| controlled_at(cfg.beta_grid[i]))
            .into_iter()
            .collect();
    let values = values?;
    let baseline_schedule = FeedbackSchedule::identity(f.dim(), cfg.m, cfg.t_total)?;
    let baseline = max_noisy_qfi(
        f,
        cfg.x_true,
        &baseline_schedule,
        cfg.eta,
        cfg.dx,
        &cfg.probe_search,
    )?
    .0
    .value;
    let gain_interval = interval_from_grid(&cfg.beta_grid, &values, baseline, &|beta| {
        Ok(controlled_at(beta)? - baseline)
    })
    .ok();
    Ok(SweepResult {
        betas: cfg.beta_grid.clone(),
        qfi_controlled: values,
        qfi_uncontrolled: baseline,
        gain_interval,
        meta: SweepMeta {
            x_true: cfg.x_true,
            b: f.field_strength(),
            t_total: cfg.t_total,
            m: cfg.m,
            dx: cfg.dx,
            eta: Some(cfg.eta),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feedback::total_unitary;
    use crate::matrix::fidelity;
    use crate::testutil::random_pure_amplitudes;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const FIG3_ETA: f64 = 0.956352499790037; // 0.8^(1/5)

    fn direction(b: f64) -> HamiltonianFamily {
        HamiltonianFamily::direction_field(b).unwrap()
    }

    #[test]
    fn eta_value_matches_caption() {
        assert!((0.8f64.powf(0.2) - FIG3_ETA).abs() < 1e-12);
    }

    #[test]
    fn kraus_completeness_and_eta_one() {
        let f = direction(1.0);
        let mut rng = StdRng::seed_from_u64(71);
        for _ in 0..10 {
            let x = rng.gen_range(-2.0..2.0);
            let t = rng.gen_range(0.1..1.0);
            let eta = rng.gen_range(0.0..1.0);
            let c = dephasing_after_unitary(&f, x, t, eta).unwrap();
            let mut sum = ComplexMatrix::zeros(2);
            for k in c.ops() {
                sum = &sum + &(&k.adjoint() * k);
            }
            assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
        let c = dephasing_after_unitary(&f, 1.0, 0.2, 1.0).unwrap();
        assert!(c.ops()[1].max_abs() < 1e-12, "K2 should vanish at eta = 1");
        assert!(dephasing_after_unitary(&f, 1.0, 0.2, 1.5).is_err());
        assert!(dephasing_after_unitary(&f, 1.0, 0.2, -0.1).is_err());
    }

    #[test]
    fn apply_channel_preserves_trace_and_kills_coherence() {
        let mut rng = StdRng::seed_from_u64(73);
        // identity-unitary channel leaves rho unchanged
        let f = direction(1.0);
        let c = dephasing_after_unitary(&f, 0.0, 0.0, 1.0).unwrap();
        let rho = crate::testutil::random_density(2, &mut rng);
        let out = apply_channel(&c, &rho).unwrap();
        assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-12);

        // eta = 0, U = I: off-diagonals vanish in the sigma3 eigenbasis
        let c0 = dephasing_after_unitary(&f, 0.0, 0.0, 0.0).unwrap();
        let out = apply_channel(&c0, &rho).unwrap();
        assert!(out.matrix().get(0, 1).norm() < 1e-12);
        assert!((out.matrix().get(0, 0) - rho.matrix().get(0, 0)).norm() < 1e-12);

        for _ in 0..10 {
            let rho = crate::testutil::random_density(2, &mut rng);
            let eta = rng.gen_range(0.0..1.0);
            let c = dephasing_after_unitary(&f, 0.7, 0.3, eta).unwrap();
            let out = apply_channel(&c, &rho).unwrap();
            assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn unitary_limit_reproduces_total_unitary() {
        let f = direction(1.0);
        let mut rng = StdRng::seed_from_u64(79);
        for _ in 0..10 {
            let m = rng.gen_range(1..=5);
            let controls: Vec<_> = (0..m)
                .map(|_| crate::testutil::random_unitary(2, &mut rng))
                .collect();
            let s = FeedbackSchedule::new(1.0, controls).unwrap();
            let probe = Probe::new(random_pure_amplitudes(2, &mut rng)).unwrap();
            let x = rng.gen_range(-1.0..1.0);
            let noisy = evolve_noisy(&f, x, &s, 1.0, &probe).unwrap();
            let u = total_unitary(&f, x, &s).unwrap();
            let pure = probe.density().conjugate(&u);
            assert!(noisy.matrix().max_abs_diff(pure.matrix()) < 1e-10);
        }
    }

    #[test]
    fn telescoping_at_true_estimate_and_eta_one() {
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(0.7).unwrap(), 5, 1.0).unwrap();
        let probe = Probe::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let out = evolve_noisy(&f, 0.7, &s, 1.0, &probe).unwrap();
        // total unitary collapses to one segment U_t(x)
        let expect = probe
            .density()
            .conjugate(&family::unitary_at(&f, 0.7, 0.2).unwrap());
        assert!(out.matrix().max_abs_diff(expect.matrix()) < 1e-10);
    }

    #[test]
    fn purity_contracts_under_noise() {
        let f = direction(1.0);
        let probe = Probe::new(random_pure_amplitudes(2, &mut StdRng::seed_from_u64(83)))
            .unwrap();
        let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), 5, 1.0).unwrap();
        let out = evolve_noisy(&f, 1.0, &s, FIG3_ETA, &probe).unwrap();
        assert!(out.purity() < 1.0 - 1e-6, "purity {}", out.purity());

        // segment-by-segment monotone contraction
        let mut rho = probe.density();
        let segment = dephasing_after_unitary(&f, 1.0, 0.2, FIG3_ETA).unwrap();
        let mut last = rho.purity();
        for _ in 0..10 {
            rho = apply_channel(&segment, &rho).unwrap();
            let p = rho.purity();
            assert!(p <= last + 1e-12);
            last = p;
        }
    }

    #[test]
    fn noisy_qfi_unitary_limit_matches_pure_route() {
        let f = direction(1.0);
        let mut rng = StdRng::seed_from_u64(89);
        let s = optimal_schedule(&f, Estimate::new(1.2).unwrap(), 3, 1.0).unwrap();
        for _ in 0..5 {
            let probe = Probe::new(random_pure_amplitudes(2, &mut rng)).unwrap();
            let a = noisy_qfi(&f, 1.0, &s, 1.0, &probe, 1e-5).unwrap().value;
            let b = crate::qfi::pure_state_qfi(
                |y| total_unitary(&f, y, &s),
                &probe,
                1.0,
                1e-5,
            )
            .unwrap()
            .value;
            let scale = b.abs().max(1e-3);
            assert!((a - b).abs() / scale < 1e-5, "sld {a} vs pure {b}");
        }
    }

    #[test]
    fn noisy_qfi_constant_family_is_zero() {
        // multiplicative family with zero base has U(x) = I for all x
        let f = HamiltonianFamily::multiplicative(HermitianMatrix::zero(2));
        let s = FeedbackSchedule::identity(2, 3, 1.0).unwrap();
        let probe = Probe::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        let v = noisy_qfi(&f, 0.3, &s, 0.9, &probe, 1e-5).unwrap().value;
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn noisy_qfi_matches_bures_oracle_at_fig3_point() {
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), 5, 1.0).unwrap();
        let probe = Probe::normalized(vec![
            Complex64::new(0.8, 0.1),
            Complex64::new(0.3, -0.5),
        ])
        .unwrap();
        let dx = 1e-4;
        let sld = noisy_qfi(&f, 1.0, &s, FIG3_ETA, &probe, dx).unwrap().value;
        let plus = evolve_noisy(&f, 1.0 + dx / 2.0, &s, FIG3_ETA, &probe).unwrap();
        let minus = evolve_noisy(&f, 1.0 - dx / 2.0, &s, FIG3_ETA, &probe).unwrap();
        let fid = fidelity(&minus, &plus).unwrap();
        let bures = 8.0 * (1.0 - fid) / (dx * dx);
        assert!((sld - bures).abs() / sld < 1e-4, "sld {sld} vs bures {bures}");
    }

    #[test]
    fn max_noisy_qfi_recovers_unitary_optimum() {
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), 5, 1.0).unwrap();
        let (r, probe) = max_noisy_qfi(&f, 1.0, &s, 1.0, 1e-5, &ProbeSearch::default())
            .unwrap();
        let expect = 3.9469502998557457;
        assert!((r.value - expect).abs() < 1e-4, "got {}", r.value);
        // returned probe achieves the reported value
        let check = noisy_qfi(&f, 1.0, &s, 1.0, &probe, 1e-5).unwrap().value;
        assert!((check - r.value).abs() < 1e-12);
    }

    #[test]
    fn max_noisy_qfi_rejects_non_qubit() {
        let f = HamiltonianFamily::multiplicative(HermitianMatrix::zero(3));
        let s = FeedbackSchedule::identity(3, 2, 1.0).unwrap();
        match max_noisy_qfi(&f, 0.0, &s, 0.9, 1e-5, &ProbeSearch::default()) {
            Err(Error::UnsupportedDimension(3)) => {}
            other => panic!("expected unsupported-dimension, got {other:?}"),
        }
    }

    #[test]
    fn probe_phase_invariance_of_maximum() {
        // global phase on the probe cannot change the QFI
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), 3, 1.0).unwrap();
        let probe = bloch_probe(0.71, 1.3);
        let phased = Probe::new(
            probe
                .amplitudes()
                .iter()
                .map(|z| z * Complex64::from_polar(1.0, 0.9))
                .collect(),
        )
        .unwrap();
        let a = noisy_qfi(&f, 1.0, &s, FIG3_ETA, &probe, 1e-5).unwrap().value;
        let b = noisy_qfi(&f, 1.0, &s, FIG3_ETA, &phased, 1e-5).unwrap().value;
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn refinement_never_decreases_incumbent() {
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(1.4).unwrap(), 5, 1.0).unwrap();
        let coarse = max_noisy_qfi(
            &f,
            1.0,
            &s,
            FIG3_ETA,
            1e-5,
            &ProbeSearch {
                grid_points_per_angle: 16,
                refine_iters: 0,
            },
        )
        .unwrap()
        .0
        .value;
        let refined = max_noisy_qfi(
            &f,
            1.0,
            &s,
            FIG3_ETA,
            1e-5,
            &ProbeSearch {
                grid_points_per_angle: 16,
                refine_iters: 4,
            },
        )
        .unwrap()
        .0
        .value;
        assert!(refined >= coarse - 1e-15);
    }

    #[test]
    fn cptp_through_many_segments() {
        let f = direction(1.0);
        let mut rng = StdRng::seed_from_u64(97);
        let controls: Vec<_> = (0..10)
            .map(|_| crate::testutil::random_unitary(2, &mut rng))
            .collect();
        let s = FeedbackSchedule::new(1.0, controls).unwrap();
        let probe = Probe::new(random_pure_amplitudes(2, &mut rng)).unwrap();
        let out = evolve_noisy(&f, 0.9, &s, 0.9, &probe).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-9);
        assert!(out.matrix().hermiticity_residual() < 1e-9);
    }
}
