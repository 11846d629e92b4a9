//! Dormand–Prince 5(4) integrator for small autonomous-or-not systems.
//!
//! Two drivers share the same tableau: [`Dopri5::integrate`] with embedded
//! error control and output at caller-supplied abscissae, and
//! [`Dopri5::integrate_fixed`] which takes equal steps with the fifth-order
//! solution (used to measure convergence order).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h})")]
    StepFailure { t: f64, h: f64 },
    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),
    #[error("output abscissae must be nondecreasing and start at or after t0")]
    BadOutputGrid,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b*, the embedded error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Returned by the stop predicate after each accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Samples at the requested abscissae, truncated if the predicate stopped early.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    /// State at which the predicate fired, if it did.
    pub stopped: Option<(f64, [f64; N])>,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl Dopri5 {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// One tableau evaluation: returns the fifth-order update and the error estimate.
    fn stage<F, const N: usize>(
        f: &mut F,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
    ) -> ([f64; N], [f64; N], [f64; N])
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let comb = |coef: &[(f64, &[f64; N])]| {
            let mut out = *y;
            for (c, k) in coef {
                for i in 0..N {
                    out[i] += h * c * k[i];
                }
            }
            out
        };
        let k2 = f(t + C2 * h, &comb(&[(A21, k1)]));
        let k3 = f(t + C3 * h, &comb(&[(A31, k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &comb(&[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &comb(&[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &comb(&[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = comb(&[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y_new, err, k7)
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y_new: &[f64; N], err: &[f64; N]) -> f64 {
        let mut acc = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
            acc += (err[i] / sc).powi(2);
        }
        (acc / N as f64).sqrt()
    }

    /// Adaptive integration from `t0` reporting the state at each `t_out`.
    ///
    /// `stop` is consulted after every accepted step; when it returns
    /// [`Control::Stop`] the integration ends and the remaining outputs are
    /// dropped. A step whose right-hand side is not finite is rejected and
    /// retried with a smaller step.
    pub fn integrate<F, S, const N: usize>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_out: &[f64],
        mut stop: S,
    ) -> Result<Trajectory<N>, OdeError>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]) -> Control,
    {
        if t_out.windows(2).any(|w| w[1] < w[0]) || t_out.first().is_some_and(|&t| t < t0) {
            return Err(OdeError::BadOutputGrid);
        }
        let mut traj = Trajectory {
            t: Vec::with_capacity(t_out.len()),
            y: Vec::with_capacity(t_out.len()),
            stopped: None,
            steps: 0,
        };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let span = t_out.last().map_or(0.0, |&te| te - t0);
        let mut h = self
            .h_init
            .unwrap_or_else(|| (1e-3 * span.abs()).clamp(1e-6, 1e-2))
            .min(self.h_max);

        for &target in t_out {
            while t < target {
                let remaining = target - t;
                let clipped = h >= remaining;
                let step = if clipped { remaining } else { h };
                let (y_new, err, k7) = Self::stage(&mut f, t, &y, &k1, step);
                let finite = y_new.iter().chain(k7.iter()).all(|v| v.is_finite());
                let en = if finite {
                    self.error_norm(&y, &y_new, &err)
                } else {
                    f64::INFINITY
                };
                if en <= 1.0 {
                    t = if clipped { target } else { t + step };
                    y = y_new;
                    k1 = k7;
                    traj.steps += 1;
                    if traj.steps > self.max_steps {
                        return Err(OdeError::TooManySteps(self.max_steps));
                    }
                    let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                    // keep the pre-clip step when only the output grid shortened it
                    let base = if clipped { h.max(step) } else { step };
                    h = (base * fac).min(self.h_max);
                    if stop(t, &y) == Control::Stop {
                        traj.stopped = Some((t, y));
                        return Ok(traj);
                    }
                } else {
                    let fac = if en.is_finite() {
                        (0.9 * en.powf(-0.2)).clamp(0.1, 0.9)
                    } else {
                        0.25
                    };
                    h = step * fac;
                    if h < self.h_min {
                        return Err(OdeError::StepFailure { t, h });
                    }
                }
            }
            traj.t.push(target);
            traj.y.push(y);
        }
        Ok(traj)
    }

    /// Equal steps of the fifth-order solution; returns the state after each step.
    pub fn integrate_fixed<F, const N: usize>(
        mut f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        steps: usize,
    ) -> Vec<[f64; N]>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let h = (t_end - t0) / steps as f64;
        let mut y = y0;
        let mut out = Vec::with_capacity(steps);
        for k in 0..steps {
            let t = t0 + k as f64 * h;
            let k1 = f(t, &y);
            let (y_new, _, _) = Self::stage(&mut f, t, &y, &k1, h);
            y = y_new;
            out.push(y);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let ts: Vec<f64> = (0..=10).map(|k| k as f64).collect();
        let tr = Dopri5::default()
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], &ts, |_, _| Control::Continue)
            .unwrap();
        for (t, y) in tr.t.iter().zip(&tr.y) {
            assert!((y[0] / t.exp() - 1.0).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_period() {
        let two_pi = std::f64::consts::TAU;
        let tr = Dopri5::default()
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [1.0, 0.0],
                &[two_pi],
                |_, _| Control::Continue,
            )
            .unwrap();
        assert!((tr.y[0][0] - 1.0).abs() < 1e-9);
        assert!(tr.y[0][1].abs() < 1e-9);
    }

    #[test]
    fn stop_predicate_truncates_output() {
        let ts: Vec<f64> = (1..=10).map(|k| k as f64).collect();
        let tr = Dopri5::default()
            .integrate(
                |_, _: &[f64; 1]| [1.0],
                0.0,
                [0.0],
                &ts,
                |_, y| if y[0] > 3.5 { Control::Stop } else { Control::Continue },
            )
            .unwrap();
        assert!(tr.t.len() <= 4);
        let (ts, ys) = tr.stopped.unwrap();
        assert!(ys[0] > 3.5 && ts > 3.5);
    }

    #[test]
    fn fixed_step_is_fifth_order() {
        let err = |steps| {
            let ys = Dopri5::integrate_fixed(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 2.0, steps);
            (ys.last().unwrap()[0] - 2f64.exp()).abs()
        };
        let ratio = err(10) / err(20);
        assert!(ratio > 25.0, "ratio {ratio}");
    }

    #[test]
    fn rejects_decreasing_output_grid() {
        let r = Dopri5::default().integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            &[1.0, 0.5],
            |_, _| Control::Continue,
        );
        assert_eq!(r.unwrap_err(), OdeError::BadOutputGrid);
    }
}
