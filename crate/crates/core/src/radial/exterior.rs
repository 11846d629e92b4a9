//! Decaying separatrix of `(r^{n-1}|u'|^{p-2}u')' = λ r^{n-1} u^{p-1}` on an
//! exterior interval.
//!
//! The state is `(ln u, ψ)` with `ψ = |σ|^{p-2}σ`, `σ = u'/u`:
//!
//! ```text
//! (ln u)' = σ
//! ψ'      = λ - (n-1)ψ/r - (p-1)σψ
//! ```
//!
//! Trajectories above the separatrix turn upward (`ψ > 0`), those below it
//! reach `u = 0` in finite radius (`σ → -∞`). Deviations from the separatrix
//! grow like `e^{pαr}`, so one double-precision shot only pins it for
//! `~ 36/(pα)` units of radius. The shooter therefore marches: after each
//! bisection it keeps the stretch where both bracket trajectories still
//! agree, then restarts the bisection from the last agreed sample.

use super::{
    log_grid, signed_pow, signed_root, Classification, RadialError, RadialProfile, ShootResult,
    ATOL, BLOWUP_BARRIER, RTOL,
};
use crate::indicial::{eigen_rate_alpha, IndicialError};
use crate::ode::{Control, Dopri5, Trajectory};

const MAX_BISECTIONS: usize = 200;
const BRACKET_WIDTH: f64 = 1e-14;

/// Configuration of one exterior separatrix computation.
#[derive(Debug, Clone)]
pub struct ExteriorShoot {
    pub n: usize,
    pub p: f64,
    pub lambda: f64,
    pub r0: f64,
    pub r_max: f64,
    /// Output samples on the log-spaced grid; `None` picks 800 per e-fold.
    pub samples: Option<usize>,
    /// Initial bracket on `u'(r0)/u(r0)`; `None` means `[-10α, 0]`.
    pub bracket: Option<(f64, f64)>,
    /// Agreement required between the two bracket trajectories, in `ln u`.
    pub stage_tol: f64,
}

impl ExteriorShoot {
    pub fn new(n: usize, p: f64, lambda: f64, r0: f64, r_max: f64) -> Self {
        Self {
            n,
            p,
            lambda,
            r0,
            r_max,
            samples: None,
            bracket: None,
            stage_tol: 1e-9,
        }
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Self {
        self.bracket = Some((lo, hi));
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = Some(samples);
        self
    }

    fn check(&self) -> Result<f64, RadialError> {
        let nf = self.n as f64;
        if !(nf >= 2.0 && self.p > 1.0) {
            return Err(IndicialError::Domain(format!(
                "need n >= 2 and p > 1, got n = {}, p = {}",
                self.n, self.p
            ))
            .into());
        }
        let alpha = eigen_rate_alpha(self.lambda, self.p)?;
        if !(self.r0 > 0.0) {
            return Err(RadialError::Precondition(format!("r0 = {} must be positive", self.r0)));
        }
        if !(self.r_max >= self.r0 + 10.0 / alpha) {
            return Err(RadialError::Precondition(format!(
                "r_max = {} must exceed r0 + 10/alpha = {}",
                self.r_max,
                self.r0 + 10.0 / alpha
            )));
        }
        Ok(alpha)
    }

    pub fn run(&self) -> Result<ShootResult, RadialError> {
        let alpha = self.check()?;
        let (n, p, lambda) = (self.n as f64, self.p, self.lambda);
        let samples = self
            .samples
            .unwrap_or_else(|| ((800.0 * (self.r_max / self.r0).ln()).ceil() as usize).max(400));
        let mut grid = log_grid(self.r0, self.r_max, samples);
        let last = grid.len() - 1;
        // Shots run past r_max so that an off-separatrix slope always has room
        // to declare itself before the output span ends.
        let ratio = grid[last] / grid[last - 1];
        let horizon = self.r_max + 50.0 / (p * alpha);
        while grid[grid.len() - 1] < horizon {
            let next = grid[grid.len() - 1] * ratio;
            grid.push(next);
        }
        let ext_last = grid.len() - 1;
        let (b_lo, b_hi) = self.bracket.unwrap_or((-10.0 * alpha, 0.0));
        let slope_cap = 1e3 * (alpha + b_lo.abs().max(b_hi.abs()));
        let log_cap = BLOWUP_BARRIER.ln();

        let rhs = move |r: f64, y: &[f64; 2]| {
            let psi = y[1];
            let sigma = signed_root(psi, p);
            [sigma, lambda - (n - 1.0) * psi / r - (p - 1.0) * sigma * psi]
        };
        let solver = Dopri5::new(RTOL, ATOL);
        // Integrates from grid[k] with slope `sigma`, sampling grid[k+1..].
        let shoot = |k: usize, log_u: f64, sigma: f64| -> Result<(Classification, Trajectory<2>), RadialError> {
            let mut class = Classification::Decaying;
            let traj = solver.integrate(
                rhs,
                grid[k],
                [log_u, signed_pow(sigma, p)],
                &grid[k + 1..],
                |_, y| {
                    let s = signed_root(y[1], p);
                    if y[1] > 0.0 || y[0] > log_cap {
                        class = Classification::BlowUp;
                        Control::Stop
                    } else if s < -slope_cap {
                        class = Classification::HitZero;
                        Control::Stop
                    } else {
                        Control::Continue
                    }
                },
            );
            match traj {
                Ok(t) => Ok((class, t)),
                // step collapse only happens on the finite-radius plunge to u = 0
                Err(crate::ode::OdeError::StepFailure { .. }) => Ok((
                    Classification::HitZero,
                    Trajectory { t: vec![], y: vec![], stopped: None, steps: 0 },
                )),
                Err(e) => Err(e.into()),
            }
        };

        let mut log_u = vec![0.0; grid.len()];
        let mut slope = vec![0.0; grid.len()];
        let mut k = 0usize;
        let mut total_iters = 0usize;
        let mut stages = 0usize;
        let mut first_param = f64::NAN;
        let mut bracket_ends = None;
        let mut predicted = 0.0;

        while k < last {
            stages += 1;
            let (mut lo, mut hi, c_lo, c_hi) = if k == 0 {
                let (c_lo, _) = shoot(0, 0.0, b_lo)?;
                let (c_hi, _) = shoot(0, 0.0, b_hi)?;
                if c_lo == c_hi {
                    return Err(RadialError::NoSeparatrix(c_lo));
                }
                (b_lo, b_hi, c_lo, c_hi)
            } else {
                self.local_bracket(&shoot, k, log_u[k], predicted, alpha)?
            };
            let mut decaying: Option<Trajectory<2>> = None;
            for _ in 0..MAX_BISECTIONS {
                let mid = 0.5 * (lo + hi);
                if mid <= lo.min(hi) || mid >= lo.max(hi) {
                    break;
                }
                total_iters += 1;
                let (c, traj) = shoot(k, log_u[k], mid)?;
                if c == Classification::Decaying {
                    lo = mid;
                    hi = mid;
                    decaying = Some(traj);
                    break;
                }
                if c == c_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo).abs() <= BRACKET_WIDTH * mid.abs().max(1.0) {
                    break;
                }
            }
            if k == 0 {
                first_param = 0.5 * (lo + hi);
                bracket_ends = Some(if lo <= hi { (c_lo, c_hi) } else { (c_hi, c_lo) });
            }

            let reach = if let Some(traj) = decaying {
                let end = (k + traj.y.len()).min(ext_last);
                for (i, y) in (k + 1..=end).zip(&traj.y) {
                    log_u[i] = y[0];
                    slope[i] = signed_root(y[1], p);
                }
                end
            } else {
                let (_, t_lo) = shoot(k, log_u[k], lo)?;
                let (_, t_hi) = shoot(k, log_u[k], hi)?;
                let mut end = k;
                for (idx, (a, b)) in t_lo.y.iter().zip(&t_hi.y).enumerate() {
                    let (sa, sb) = (signed_root(a[1], p), signed_root(b[1], p));
                    let agree = (a[0] - b[0]).abs() <= self.stage_tol
                        && (sa - sb).abs() <= self.stage_tol * (sa.abs() + alpha);
                    if !agree {
                        break;
                    }
                    let i = k + 1 + idx;
                    log_u[i] = 0.5 * (a[0] + b[0]);
                    slope[i] = 0.5 * (sa + sb);
                    end = i;
                }
                end
            };
            if k == 0 {
                slope[0] = first_param;
            }
            if reach == k {
                return Err(RadialError::Precondition(format!(
                    "separatrix march stalled at r = {}; refine the output grid",
                    grid[k]
                )));
            }
            k = reach;
            predicted = slope[k];
        }

        grid.truncate(last + 1);
        log_u.truncate(last + 1);
        slope.truncate(last + 1);
        let profile = RadialProfile::from_log(
            grid,
            log_u,
            slope,
            format!(
                "radial_exterior_eigen n={} p={} lambda={} r0={} r_max={}",
                self.n, self.p, self.lambda, self.r0, self.r_max
            ),
        )?;
        Ok(ShootResult {
            profile,
            shoot_param: first_param,
            bisection_iters: total_iters,
            classification: Classification::Decaying,
            bracket_ends,
            stages,
        })
    }

    /// Bracket around the slope carried over from the previous stage,
    /// widened until the endpoints split into HitZero below and BlowUp above.
    #[allow(clippy::type_complexity)]
    fn local_bracket<F>(
        &self,
        shoot: &F,
        k: usize,
        log_u: f64,
        predicted: f64,
        alpha: f64,
    ) -> Result<(f64, f64, Classification, Classification), RadialError>
    where
        F: Fn(usize, f64, f64) -> Result<(Classification, Trajectory<2>), RadialError>,
    {
        let mut w = 1e-7 * (predicted.abs() + alpha);
        loop {
            let lo = predicted - w;
            let hi = (predicted + w).min(0.0);
            let (c_lo, _) = shoot(k, log_u, lo)?;
            let (c_hi, _) = shoot(k, log_u, hi)?;
            if c_lo != c_hi {
                return Ok((lo, hi, c_lo, c_hi));
            }
            w *= 10.0;
            if w > 10.0 * (predicted.abs() + alpha) {
                return Err(RadialError::NoSeparatrix(c_lo));
            }
        }
    }
}

/// Decaying positive solution on `[r0, r_max]` with `u(r0) = 1`.
pub fn radial_exterior_eigen(
    n: usize,
    p: f64,
    lambda: f64,
    r0: f64,
    r_max: f64,
) -> Result<ShootResult, RadialError> {
    ExteriorShoot::new(n, p, lambda, r0, r_max).run()
}
