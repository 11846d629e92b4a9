//! The one-dimensional eigenfunction ODE `((v')^{p-1})' = λ v^{p-1}` and its
//! log-derivative (Riccati) flow.

use super::{RadialError, RadialProfile, ATOL, RTOL};
use crate::indicial::eigen_rate_alpha;
use crate::ode::{Control, Dopri5};

/// Integrates `v' = m^{1/(p-1)}`, `m' = λ v^{p-1}` with `v(t0) = v0`,
/// `v'(t0) = s0·v0`, sampled at `steps + 1` equally spaced points.
///
/// The flux `m = (v')^{p-1}` is carried instead of `v'` so that the
/// nonlinearity never needs to be differentiated.
pub fn eigen_profile_1d(
    lambda: f64,
    p: f64,
    v0: f64,
    s0: f64,
    t_span: (f64, f64),
    steps: usize,
) -> Result<RadialProfile, RadialError> {
    eigen_rate_alpha(lambda, p)?;
    if !(v0 > 0.0) || !(s0 >= 0.0) {
        return Err(RadialError::Precondition(format!(
            "need v0 > 0 and s0 >= 0, got v0 = {v0}, s0 = {s0}"
        )));
    }
    let (t0, t1) = t_span;
    if !(t1 > t0) || steps == 0 {
        return Err(RadialError::Precondition("empty time span".into()));
    }
    let m0 = (s0 * v0).powf(p - 1.0);
    let ts: Vec<f64> = (0..=steps)
        .map(|k| t0 + (t1 - t0) * k as f64 / steps as f64)
        .collect();
    let rhs = |_: f64, y: &[f64; 2]| [y[1].max(0.0).powf(1.0 / (p - 1.0)), lambda * y[0].powf(p - 1.0)];
    let traj = Dopri5::new(RTOL, ATOL).integrate(rhs, t0, [v0, m0], &ts, |_, _| Control::Continue)?;
    let log_u = traj.y.iter().map(|y| y[0].ln()).collect();
    let log_slope = traj
        .y
        .iter()
        .map(|y| y[1].max(0.0).powf(1.0 / (p - 1.0)) / y[0])
        .collect();
    RadialProfile::from_log(
        traj.t,
        log_u,
        log_slope,
        format!("eigen_profile_1d lambda={lambda} p={p} v0={v0} s0={s0}"),
    )
}

/// Fixed-step variant used to measure the integrator's convergence order.
pub fn eigen_profile_1d_fixed(lambda: f64, p: f64, v0: f64, s0: f64, t_end: f64, steps: usize) -> Vec<f64> {
    let m0 = (s0 * v0).powf(p - 1.0);
    let rhs = |_: f64, y: &[f64; 2]| [y[1].max(0.0).powf(1.0 / (p - 1.0)), lambda * y[0].powf(p - 1.0)];
    Dopri5::integrate_fixed(rhs, 0.0, [v0, m0], t_end, steps)
        .into_iter()
        .map(|y| y[0])
        .collect()
}

/// Sampled solution of the ratio flow.
#[derive(Debug, Clone)]
pub struct RatioTrajectory {
    pub t: Vec<f64>,
    pub s: Vec<f64>,
}

impl RatioTrajectory {
    pub fn last(&self) -> f64 {
        self.s[self.s.len() - 1]
    }
}

/// `s = v'/v` for positive solutions of the 1-D eigen ODE:
/// `(p-1)s^{p-2}s' + (p-1)s^p = λ`, i.e. `s' = (α^p - s^p) s^{2-p}`.
/// The constant `α` is its only positive equilibrium.
pub fn riccati_ratio_flow(
    lambda: f64,
    p: f64,
    s0: f64,
    t_span: (f64, f64),
    samples: usize,
) -> Result<RatioTrajectory, RadialError> {
    let alpha = eigen_rate_alpha(lambda, p)?;
    if !(s0 > 0.0) {
        return Err(RadialError::Precondition(format!("need s0 > 0, got {s0}")));
    }
    let (t0, t1) = t_span;
    if !(t1 > t0) || samples < 2 {
        return Err(RadialError::Precondition("empty time span".into()));
    }
    let alpha_p = alpha.powf(p);
    let ts: Vec<f64> = (0..samples)
        .map(|k| t0 + (t1 - t0) * k as f64 / (samples - 1) as f64)
        .collect();
    let rhs = |_: f64, y: &[f64; 1]| {
        let s = y[0];
        [(alpha_p - s.powf(p)) * s.powf(2.0 - p)]
    };
    let mut hit_zero = None;
    let traj = Dopri5::new(RTOL, ATOL).integrate(rhs, t0, [s0], &ts[1..], |t, y| {
        if !(y[0] > 1e-300) {
            hit_zero = Some(t);
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    if let Some(t) = hit_zero {
        return Err(RadialError::SingularRatio { t });
    }
    let mut t = vec![t0];
    let mut s = vec![s0];
    t.extend(traj.t);
    s.extend(traj.y.iter().map(|y| y[0]));
    Ok(RatioTrajectory { t, s })
}
