//! Feedback-controlled evolutions: schedules of coherent controls
//! interleaved with free segments, mis-estimated controls, beta sweeps,
//! gain intervals and the large-m scaling curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::family::{self, HamiltonianFamily};
use crate::qfi::{channel_qfi_fd, QfiResult};
use crate::tol;

/// Evenly interspersed feedback schedule: `m` free segments of duration
/// `T/m` with a control unitary after each.
#[derive(Clone, Debug)]
pub struct FeedbackSchedule {
    t_total: f64,
    controls: Vec<crate::matrix::UnitaryMatrix>,
}

impl FeedbackSchedule {
    pub fn new(t_total: f64, controls: Vec<crate::matrix::UnitaryMatrix>) -> Result<Self> {
        if controls.is_empty() {
            return Err(Error::InvalidParam(
                "schedule needs at least one segment".into(),
            ));
        }
        if !(t_total > 0.0) || !t_total.is_finite() {
            return Err(Error::InvalidParam(format!(
                "total time must be positive, got {t_total}"
            )));
        }
        let dim = controls[0].dim();
        if controls.iter().any(|u| u.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, 0));
        }
        Ok(Self { t_total, controls })
    }

    /// Identity controls: the uncontrolled baseline with the same
    /// segmentation (equals the single-shot evolution exactly).
    pub fn identity(dim: usize, m: usize, t_total: f64) -> Result<Self> {
        Self::new(
            t_total,
            vec![crate::matrix::UnitaryMatrix::identity(dim); m],
        )
    }

    pub fn m(&self) -> usize {
        self.controls.len()
    }

    pub fn t_total(&self) -> f64 {
        self.t_total
    }

    pub fn segment_time(&self) -> f64 {
        self.t_total / self.m() as f64
    }

    pub fn controls(&self) -> &[crate::matrix::UnitaryMatrix] {
        &self.controls
    }
}

/// Current estimate of the parameter, used to build feedback controls.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Estimate {
    pub x_hat: f64,
}

impl Estimate {
    pub fn new(x_hat: f64) -> Result<Self> {
        if !x_hat.is_finite() {
            return Err(Error::InvalidParam(format!(
                "estimate must be finite, got {x_hat}"
            )));
        }
        Ok(Self { x_hat })
    }
}

/// Total evolution `U_t(x) U_1 U_t(x) U_2 ... U_t(x) U_m` with `t = T/m`.
pub fn total_unitary(
    f: &HamiltonianFamily,
    x: f64,
    s: &FeedbackSchedule,
) -> Result<crate::matrix::UnitaryMatrix> {
    let t = s.segment_time();
    let u_t = family::unitary_at(f, x, t)?;
    let mut product = crate::matrix::ComplexMatrix::identity(f.dim());
    for control in s.controls() {
        product = &(&product * u_t.matrix()) * control.matrix();
    }
    crate::matrix::UnitaryMatrix::new(product)
}

/// Saturating controls `U_1 = ... = U_{m-1} = U_t(x_hat)^dag` with the
/// final control fixed to the identity (it never affects the
/// eigen-angles, and a canonical choice keeps outputs reproducible).
pub fn optimal_schedule(
    f: &HamiltonianFamily,
    x_hat: Estimate,
    m: usize,
    t_total: f64,
) -> Result<FeedbackSchedule> {
    if m == 0 {
        return Err(Error::InvalidParam("segment count must be >= 1".into()));
    }
    let t = t_total / m as f64;
    if !(t > 0.0) {
        return Err(Error::InvalidParam(format!(
            "total time must be positive, got {t_total}"
        )));
    }
    let inverse = family::unitary_at(f, x_hat.x_hat, t)?.adjoint();
    let mut controls = vec![inverse; m.saturating_sub(1)];
    controls.push(crate::matrix::UnitaryMatrix::identity(f.dim()));
    FeedbackSchedule::new(t_total, controls)
}

/// Channel QFI of `x -> total_unitary(f, x, s)` with the controls held
/// fixed (the estimate is exogenous, not differentiated).
pub fn controlled_qfi(
    f: &HamiltonianFamily,
    x: f64,
    s: &FeedbackSchedule,
    dx: f64,
) -> Result<QfiResult> {
    channel_qfi_fd(|y| total_unitary(f, y, s), x, dx)
}

/// Sweep metadata carried alongside the grids.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SweepMeta {
    pub x_true: f64,
    /// Field strength when the family is a direction field.
    pub b: Option<f64>,
    pub t_total: f64,
    pub m: usize,
    pub dx: f64,
    pub eta: Option<f64>,
}

/// Result of a beta sweep: controlled QFI on the grid, the
/// beta-independent uncontrolled baseline, and the innermost gain
/// interval around beta = 0 when one is bracketed by the grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub betas: Vec<f64>,
    pub qfi_controlled: Vec<f64>,
    pub qfi_uncontrolled: f64,
    pub gain_interval: Option<(f64, f64)>,
    pub meta: SweepMeta,
}

fn check_grid(beta_grid: &[f64]) -> Result<()> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidParam("beta grid must be nonempty".into()));
    }
    if beta_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParam("beta grid must be sorted".into()));
    }
    Ok(())
}

/// Bisect `g` for a root inside `[inner, outer]` where `g(inner) > 0`.
fn bisect_crossing<G>(g: &G, mut inner: f64, mut outer: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    while (outer - inner).abs() > tol::GAIN_BISECT_TOL {
        let mid = 0.5 * (inner + outer);
        if g(mid)? > 0.0 {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Ok(0.5 * (inner + outer))
}

/// Find the innermost sign changes of `values - baseline` around beta = 0
/// on a precomputed grid, then refine each by bisection on `g`.
pub(crate) fn interval_from_grid<G>(
    betas: &[f64],
    values: &[f64],
    baseline: f64,
    g: &G,
) -> Result<(f64, f64)>
where
    G: Fn(f64) -> Result<f64>,
{
    let anchor = betas
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).expect("finite betas"))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    if values[anchor] - baseline <= tol::GAIN_MARGIN {
        return Err(Error::NoGain);
    }
    let mut hi = None;
    for i in anchor..betas.len() - 1 {
        if values[i] - baseline > 0.0 && values[i + 1] - baseline <= 0.0 {
            hi = Some(bisect_crossing(g, betas[i], betas[i + 1])?);
            break;
        }
    }
    let mut lo = None;
    for i in (1..=anchor).rev() {
        if values[i] - baseline > 0.0 && values[i - 1] - baseline <= 0.0 {
            lo = Some(bisect_crossing(g, betas[i], betas[i - 1])?);
            break;
        }
    }
    match (lo, hi) {
        (Some(lo), Some(hi)) => Ok((lo, hi)),
        (None, _) => Err(Error::OpenInterval {
            side: "lower",
            endpoint: betas[0],
        }),
        (_, None) => Err(Error::OpenInterval {
            side: "upper",
            endpoint: betas[betas.len() - 1],
        }),
    }
}

/// Controlled QFI across a grid of mis-estimation values
/// `x_hat = (1 + beta) x_true`, against the identity-control baseline.
pub fn beta_sweep(
    f: &HamiltonianFamily,
    x_true: f64,
    m: usize,
    t_total: f64,
    beta_grid: &[f64],
    dx: f64,
) -> Result<SweepResult> {
    check_grid(beta_grid)?;
    let controlled_at = |beta: f64| -> Result<f64> {
        let schedule = optimal_schedule(f, Estimate::new((1.0 + beta) * x_true)?, m, t_total)?;
        Ok(controlled_qfi(f, x_true, &schedule, dx)?.value)
    };
    let values: Result<Vec<f64>> =
        exec::map_grid(beta_grid.len(), |i| controlled_at(beta_grid[i]))
            .into_iter()
            .collect();
    let values = values?;
    let baseline_schedule = FeedbackSchedule::identity(f.dim(), m, t_total)?;
    let baseline = controlled_qfi(f, x_true, &baseline_schedule, dx)?.value;
    let gain_interval = interval_from_grid(beta_grid, &values, baseline, &|beta| {
        Ok(controlled_at(beta)? - baseline)
    })
    .ok();
    Ok(SweepResult {
        betas: beta_grid.to_vec(),
        qfi_controlled: values,
        qfi_uncontrolled: baseline,
        gain_interval,
        meta: SweepMeta {
            x_true,
            b: f.field_strength(),
            t_total,
            m,
            dx,
            eta: None,
        },
    })
}

/// Root-find the innermost gain crossings around beta = 0: a 601-point
/// pre-scan over `search_range` brackets the roots, bisection refines
/// them to `GAIN_BISECT_TOL`.
pub fn gain_interval(
    f: &HamiltonianFamily,
    x_true: f64,
    m: usize,
    t_total: f64,
    dx: f64,
    search_range: (f64, f64),
) -> Result<(f64, f64)> {
    let (lo, hi) = search_range;
    if !(lo < hi) {
        return Err(Error::InvalidParam(format!(
            "search range must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    let n = 601;
    let betas: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let controlled_at = |beta: f64| -> Result<f64> {
        let schedule = optimal_schedule(f, Estimate::new((1.0 + beta) * x_true)?, m, t_total)?;
        Ok(controlled_qfi(f, x_true, &schedule, dx)?.value)
    };
    let values: Result<Vec<f64>> = exec::map_grid(n, |i| controlled_at(betas[i]))
        .into_iter()
        .collect();
    let values = values?;
    let baseline_schedule = FeedbackSchedule::identity(f.dim(), m, t_total)?;
    let baseline = controlled_qfi(f, x_true, &baseline_schedule, dx)?.value;
    let anchor = controlled_at(0.0)?;
    if anchor - baseline <= tol::GAIN_MARGIN {
        return Err(Error::NoGain);
    }
    interval_from_grid(&betas, &values, baseline, &|beta| {
        Ok(controlled_at(beta)? - baseline)
    })
}

/// Controlled QFI at the true estimate (`beta = 0`) for each segment
/// count; converges to [`family::universal_qfi`] as `m` grows.
pub fn scaling_curve(
    f: &HamiltonianFamily,
    x: f64,
    t_total: f64,
    m_values: &[usize],
    dx: f64,
) -> Result<Vec<(usize, f64)>> {
    if m_values.iter().any(|&m| m == 0) {
        return Err(Error::InvalidParam("segment counts must be >= 1".into()));
    }
    let qfi_at = |m: usize| -> Result<f64> {
        let schedule = optimal_schedule(f, Estimate::new(x)?, m, t_total)?;
        Ok(controlled_qfi(f, x, &schedule, dx)?.value)
    };
    let values: Result<Vec<f64>> = exec::map_grid(m_values.len(), |i| qfi_at(m_values[i]))
        .into_iter()
        .collect();
    Ok(m_values.iter().copied().zip(values?).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{direction_field_qfi_closed_form, unitary_at};
    use crate::matrix::{pauli, ComplexMatrix, HermitianMatrix, UnitaryMatrix};
    use crate::spectral::c_te;
    use crate::testutil::{random_hermitian, random_unitary};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn direction(b: f64) -> HamiltonianFamily {
        HamiltonianFamily::direction_field(b).unwrap()
    }

    fn saturated_qfi(m: usize, b: f64, t: f64) -> f64 {
        let mf = m as f64;
        let s = (b * t / mf).sin();
        4.0 * mf * mf * s * s
    }

    #[test]
    fn total_unitary_single_identity_segment() {
        let f = direction(1.0);
        let s = FeedbackSchedule::identity(2, 1, 1.0).unwrap();
        let u = total_unitary(&f, 0.7, &s).unwrap();
        let expect = unitary_at(&f, 0.7, 1.0).unwrap();
        assert!(u.matrix().max_abs_diff(expect.matrix()) < 1e-12);
    }

    #[test]
    fn total_unitary_telescopes_to_identity() {
        let f = direction(1.0);
        let m = 4;
        let t = 1.0 / m as f64;
        let inv = unitary_at(&f, 0.7, t).unwrap().adjoint();
        let s = FeedbackSchedule::new(1.0, vec![inv; m]).unwrap();
        let u = total_unitary(&f, 0.7, &s).unwrap();
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn two_segment_saturation_doubles_c_te() {
        let f = direction(1.0);
        let x = 1.0;
        let dx = 1e-3;
        let t = 0.5;
        let inv = unitary_at(&f, x, t).unwrap().adjoint();
        let s = FeedbackSchedule::new(1.0, vec![inv, UnitaryMatrix::identity(2)]).unwrap();
        let relative = total_unitary(&f, x, &s)
            .unwrap()
            .adjoint()
            .compose(&total_unitary(&f, x + dx, &s).unwrap());
        let c2 = c_te(&relative).unwrap().c_te;
        let seg = unitary_at(&f, x, t)
            .unwrap()
            .adjoint()
            .compose(&unitary_at(&f, x + dx, t).unwrap());
        let c1 = c_te(&seg).unwrap().c_te;
        assert!((c2 - 2.0 * c1).abs() < 1e-9, "c2 {c2} vs 2*c1 {}", 2.0 * c1);
    }

    #[test]
    fn optimal_schedule_m1_is_single_identity() {
        let f = direction(1.0);
        let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), 1, 1.0).unwrap();
        assert_eq!(s.m(), 1);
        assert!(s.controls()[0]
            .matrix()
            .max_abs_diff(&ComplexMatrix::identity(2))
            < 1e-15);
    }

    #[test]
    fn optimal_schedule_saturates_closed_form() {
        let f = direction(1.0);
        for m in [1usize, 2, 5, 10] {
            let s = optimal_schedule(&f, Estimate::new(1.0).unwrap(), m, 1.0).unwrap();
            let v = controlled_qfi(&f, 1.0, &s, 1e-5).unwrap().value;
            let expect = saturated_qfi(m, 1.0, 1.0);
            assert!(
                (v - expect).abs() / expect < 1e-6,
                "m={m}: {v} vs {expect}"
            );
        }
        // frozen closed-form value at m = 5
        assert!((saturated_qfi(5, 1.0, 1.0) - 3.9469502998557457).abs() < 1e-12);
    }

    #[test]
    fn identity_controls_reproduce_uncontrolled_baseline() {
        let f = direction(1.0);
        let s = FeedbackSchedule::identity(2, 5, 1.0).unwrap();
        let v = controlled_qfi(&f, 1.0, &s, 1e-5).unwrap().value;
        let expect = direction_field_qfi_closed_form(1.0, 1.0);
        assert!((v - expect).abs() < 1e-5);
    }

    #[test]
    fn multiplicative_controls_do_not_help_or_hurt_at_optimum() {
        let h = HermitianMatrix::new(pauli::sigma3()).unwrap();
        let f = HamiltonianFamily::multiplicative(h);
        let s = optimal_schedule(&f, Estimate::new(0.4).unwrap(), 6, 1.0).unwrap();
        let v = controlled_qfi(&f, 0.4, &s, 1e-5).unwrap().value;
        assert!((v - 4.0).abs() < 1e-9, "got {v}");
        let baseline = controlled_qfi(
            &f,
            0.4,
            &FeedbackSchedule::identity(2, 6, 1.0).unwrap(),
            1e-5,
        )
        .unwrap()
        .value;
        assert!((v - baseline).abs() < 1e-9);
    }

    #[test]
    fn random_controls_respect_cap_on_multiplicative() {
        let h = HermitianMatrix::new(pauli::sigma3()).unwrap();
        let f = HamiltonianFamily::multiplicative(h);
        let mut rng = StdRng::seed_from_u64(61);
        for _ in 0..30 {
            let m = rng.gen_range(1..=6);
            let controls: Vec<_> = (0..m).map(|_| random_unitary(2, &mut rng)).collect();
            let s = FeedbackSchedule::new(1.0, controls).unwrap();
            let v = controlled_qfi(&f, 0.2, &s, 1e-5).unwrap().value;
            assert!(v <= 4.0 + 1e-6, "cap violated: {v}");
        }
    }

    #[test]
    fn eq16_cap_on_random_families_and_schedules() {
        let mut rng = StdRng::seed_from_u64(67);
        for _ in 0..30 {
            let d = rng.gen_range(2..=3);
            let fam = HamiltonianFamily::trig_matrix(
                random_hermitian(d, &mut rng),
                vec![(random_hermitian(d, &mut rng), random_hermitian(d, &mut rng))],
            )
            .unwrap();
            let m = rng.gen_range(1..=5);
            let controls: Vec<_> = (0..m).map(|_| random_unitary(d, &mut rng)).collect();
            let s = FeedbackSchedule::new(1.0, controls).unwrap();
            let x = rng.gen_range(-1.0..1.0);
            let v = controlled_qfi(&fam, x, &s, 1e-5).unwrap().value;
            let cap = crate::family::universal_qfi(&fam, x, 1.0).unwrap();
            assert!(v <= cap + 1e-6 + cap * 1e-9, "{v} > {cap}");
        }
    }

    #[test]
    fn beta_sweep_shape_and_center_value() {
        let f = direction(1.0);
        let grid: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let sweep = beta_sweep(&f, 1.0, 5, 1.0, &grid, 1e-5).unwrap();
        assert_eq!(sweep.betas.len(), sweep.qfi_controlled.len());
        let at_zero = sweep.qfi_controlled[20];
        assert!((at_zero - saturated_qfi(5, 1.0, 1.0)).abs() < 1e-5);
        assert!(
            (sweep.qfi_uncontrolled - direction_field_qfi_closed_form(1.0, 1.0)).abs() < 1e-5
        );
        // crossings land near +-1.66 (checked tightly in the acceptance suite)
        let (lo, hi) = sweep.gain_interval.expect("interval bracketed by grid");
        assert!((lo + 1.66).abs() < 0.05, "lo {lo}");
        assert!((hi - 1.66).abs() < 0.05, "hi {hi}");
        assert_eq!(sweep.meta.m, 5);
        assert_eq!(sweep.meta.b, Some(1.0));
    }

    #[test]
    fn beta_sweep_rejects_bad_grid() {
        let f = direction(1.0);
        assert!(beta_sweep(&f, 1.0, 5, 1.0, &[], 1e-5).is_err());
        assert!(beta_sweep(&f, 1.0, 5, 1.0, &[0.5, -0.5], 1e-5).is_err());
    }

    #[test]
    fn single_segment_custom_control_drops_out() {
        // m = 1 with control U_t(x_hat)^dag: conjugation invariance makes the
        // controlled QFI equal the baseline for every beta
        let f = direction(1.0);
        let baseline = direction_field_qfi_closed_form(1.0, 1.0);
        for beta in [-1.0, -0.3, 0.0, 0.7, 1.5] {
            let ctrl = unitary_at(&f, (1.0 + beta) * 1.0, 1.0).unwrap().adjoint();
            let s = FeedbackSchedule::new(1.0, vec![ctrl]).unwrap();
            let v = controlled_qfi(&f, 1.0, &s, 1e-5).unwrap().value;
            assert!((v - baseline).abs() < 1e-5, "beta {beta}: {v}");
        }
    }

    #[test]
    fn gain_interval_open_signal_on_narrow_range() {
        let f = direction(1.0);
        match gain_interval(&f, 1.0, 5, 1.0, 1e-5, (-0.5, 0.5)) {
            Err(Error::OpenInterval { endpoint, .. }) => {
                assert!(endpoint.abs() <= 0.5 + 1e-12)
            }
            other => panic!("expected open-interval, got {other:?}"),
        }
    }

    #[test]
    fn gain_interval_requires_gain_at_zero() {
        // multiplicative family: controls never beat the baseline
        let h = HermitianMatrix::new(pauli::sigma3()).unwrap();
        let f = HamiltonianFamily::multiplicative(h);
        match gain_interval(&f, 0.4, 5, 1.0, 1e-5, (-1.0, 1.0)) {
            Err(Error::NoGain) => {}
            other => panic!("expected no-gain, got {other:?}"),
        }
    }

    #[test]
    fn scaling_curve_monotone_and_bounded() {
        let f = direction(1.0);
        let ms = [1usize, 2, 5, 10, 20, 50];
        let curve = scaling_curve(&f, 1.0, 1.0, &ms, 1e-5).unwrap();
        let limit = crate::family::universal_qfi(&f, 1.0, 1.0).unwrap();
        let mut prev = 0.0;
        for &(m, v) in &curve {
            let expect = saturated_qfi(m, 1.0, 1.0);
            assert!((v - expect).abs() / expect < 1e-6);
            assert!(v >= prev - 1e-9, "not nondecreasing at m={m}");
            assert!(v <= limit + 1e-6);
            prev = v;
        }
        // multiplicative curve is flat in m
        let h = HermitianMatrix::new(pauli::sigma3()).unwrap();
        let mult = HamiltonianFamily::multiplicative(h);
        let flat = scaling_curve(&mult, 0.3, 1.0, &ms, 1e-5).unwrap();
        for &(_, v) in &flat {
            assert!((v - 4.0).abs() < 1e-8);
        }
    }
}
