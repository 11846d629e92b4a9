//! Outward integration from the singular origin in log radius.
//!
//! With `t = ln r`, `σ = r u'/u` and `ψ = |σ|^{p-2}σ` the radial form of
//! `-Δ_p u - μ|x|^{-p}u^{p-1} + λu^{p-1} = A u^{q-1}` becomes
//!
//! ```text
//! (ln u)_t = σ
//! ψ_t      = -μ + r^p (λ - A u^{q-p}) - (n-(a+1)p)ψ - (p-1)σψ
//! ```
//!
//! so the pure power `c r^{-γ₁}` is the fixed point `ψ = -|γ₁|^{p-2}γ₁`
//! and the `r^p` terms are the only perturbation near `r = 0`. A nonzero
//! weight `a` is accepted only for the pure two-weight equation (`λ = 0`,
//! no source term).

use super::{
    log_grid, signed_pow, signed_root, Classification, RadialError, RadialProfile, ShootResult,
    ATOL, BLOWUP_BARRIER, RTOL, ZERO_BARRIER,
};
use crate::indicial::{indicial_roots, ProblemParams};
use crate::ode::{Control, Dopri5};

const SERIES_TOL: f64 = 1e-8;
const SLOPE_CAP: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct SingularShoot {
    pub params: ProblemParams,
    pub r_in: f64,
    pub r_out: f64,
    pub amplitude: f64,
    pub samples: usize,
}

impl SingularShoot {
    pub fn new(params: ProblemParams, r_in: f64, r_out: f64) -> Self {
        Self {
            params,
            r_in,
            r_out,
            amplitude: 1.0,
            samples: 400,
        }
    }

    pub fn with_amplitude(mut self, c: f64) -> Self {
        self.amplitude = c;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    /// Largest start radius at which the neglected `r^p` terms stay below
    /// `SERIES_TOL` relative to the leading balance.
    pub fn series_start(&self, gamma1: f64) -> f64 {
        let pr = &self.params;
        let p = pr.p;
        let mut r = self.r_in;
        if pr.lambda > 0.0 {
            r = r.min((0.5 * SERIES_TOL / pr.lambda).powf(1.0 / p));
        }
        if let Some(nl) = pr.nonlinearity {
            if nl.amplitude != 0.0 {
                let expo = p - gamma1 * (nl.q - p);
                let size = nl.amplitude.abs() * self.amplitude.powf(nl.q - p);
                r = r.min((0.5 * SERIES_TOL / size).powf(1.0 / expo));
            }
        }
        r
    }

    pub fn run(&self) -> Result<ShootResult, RadialError> {
        let pr = &self.params;
        pr.validate()?;
        if !(self.r_in > 0.0 && self.r_out > self.r_in) {
            return Err(RadialError::Precondition(format!(
                "need 0 < r_in < r_out, got r_in = {}, r_out = {}",
                self.r_in, self.r_out
            )));
        }
        if !(self.amplitude > 0.0) || self.samples < 2 {
            return Err(RadialError::Precondition("amplitude must be positive".into()));
        }
        let source = pr.nonlinearity.filter(|nl| nl.amplitude != 0.0);
        if pr.a != 0.0 && (pr.lambda != 0.0 || source.is_some()) {
            return Err(RadialError::Precondition(
                "a weighted operator is only supported without lambda and source terms".into(),
            ));
        }
        if pr.lambda < 0.0 {
            return Err(RadialError::Precondition("lambda must be nonnegative".into()));
        }
        let roots = indicial_roots(pr)?;
        if pr.mu < 0.0 || roots.double_root {
            return Err(RadialError::Precondition(format!(
                "need 0 <= mu < mu_bar = {}, got {}",
                roots.mu_bar, pr.mu
            )));
        }
        let gamma1 = roots.gamma1;
        let (p, mu, lambda) = (pr.p, pr.mu, pr.lambda);
        let drift = pr.n as f64 - (pr.a + 1.0) * p;
        let (q, amp) = source.map_or((p, 0.0), |nl| (nl.q, nl.amplitude));

        let r_start = self.series_start(gamma1);
        let t_start = r_start.ln();
        let grid = log_grid(self.r_in, self.r_out, self.samples);
        let t_out: Vec<f64> = grid.iter().map(|r| r.ln()).collect();
        let sigma0 = -gamma1;
        let y0 = [self.amplitude.ln() + sigma0 * t_start, signed_pow(sigma0, p)];

        let rhs = move |t: f64, y: &[f64; 2]| {
            let sigma = signed_root(y[1], p);
            let rp = (p * t).exp();
            let forcing = if rp == 0.0 {
                0.0
            } else {
                rp * (lambda - amp * ((q - p) * y[0]).exp())
            };
            [sigma, -mu + forcing - drift * y[1] - (p - 1.0) * sigma * y[1]]
        };
        let (log_hi, log_lo) = (BLOWUP_BARRIER.ln(), ZERO_BARRIER.ln());
        let mut fate = Classification::Decaying;
        // the first output may coincide with the start
        let first = t_out.partition_point(|&t| t <= t_start);
        let mut traj = Dopri5::new(RTOL, ATOL).integrate(rhs, t_start, y0, &t_out[first..], |_, y| {
            let s = signed_root(y[1], p);
            if y[0] > log_hi || s > SLOPE_CAP {
                fate = Classification::BlowUp;
                Control::Stop
            } else if y[0] < log_lo || s < -SLOPE_CAP {
                fate = Classification::HitZero;
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        if let Some((t, _)) = traj.stopped {
            return Err(match fate {
                Classification::BlowUp => RadialError::BlowUp { r: t.exp() },
                _ => RadialError::HitZero { r: t.exp() },
            });
        }
        let mut states = vec![y0; first];
        states.append(&mut traj.y);
        let log_u = states.iter().map(|y| y[0]).collect();
        let slope = states
            .iter()
            .zip(&grid)
            .map(|(y, r)| signed_root(y[1], p) / r)
            .collect();
        let profile = RadialProfile::from_log(
            grid,
            log_u,
            slope,
            format!(
                "shoot_singular_profile n={} p={} a={} mu={} lambda={} nonlinearity={:?} c={} gamma1={}",
                pr.n, p, pr.a, mu, lambda, source, self.amplitude, gamma1
            ),
        )?;
        Ok(ShootResult {
            profile,
            shoot_param: self.amplitude,
            bisection_iters: 0,
            classification: Classification::Decaying,
            bracket_ends: None,
            stages: 1,
        })
    }
}

/// Profile on `[r_in, r_out]` started from `u = r^{-γ₁}` (amplitude 1).
pub fn shoot_singular_profile(
    params: &ProblemParams,
    r_in: f64,
    r_out: f64,
) -> Result<ShootResult, RadialError> {
    SingularShoot::new(params.clone(), r_in, r_out).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{gradient_ratio_curve, RatioMode};

    #[test]
    fn p_harmonic_constant() {
        let params = ProblemParams::new(3, 2.0).unwrap();
        let res = shoot_singular_profile(&params, 1e-3, 1.0).unwrap();
        assert!(res.profile.log_u().iter().all(|&l| l == 0.0));
    }

    #[test]
    fn power_propagates_over_two_decades() {
        let params = ProblemParams::new(3, 2.0).unwrap().with_mu(0.1875);
        let res = shoot_singular_profile(&params, 0.01, 1.0).unwrap();
        let prof = &res.profile;
        for (r, l) in prof.r().iter().zip(prof.log_u()) {
            let drift = (l + 0.25 * r.ln()).exp_m1().abs();
            assert!(drift <= 1e-7, "r={r} drift={drift}");
        }
    }

    #[test]
    fn weighted_power() {
        // two-weight equation, a = 0.5, n = 5, p = 2: f(γ) = γ(2 - γ)
        let params = ProblemParams::new(5, 2.0).unwrap().with_a(0.5).with_mu(0.75);
        let res = shoot_singular_profile(&params, 1e-2, 10.0).unwrap();
        for (_, g) in gradient_ratio_curve(&res.profile, RatioMode::Scaled) {
            assert!((g - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_ratio_tends_to_gamma1_with_source() {
        let params = ProblemParams::new(3, 2.0)
            .unwrap()
            .with_mu(0.1875)
            .with_lambda(1.0)
            .with_nonlinearity(3.0, 1.0)
            .unwrap();
        let res = SingularShoot::new(params, 1e-6, 0.5).with_amplitude(0.1).run().unwrap();
        let curve = gradient_ratio_curve(&res.profile, RatioMode::Scaled);
        let near0 = curve[0].1;
        assert!((near0 - 0.25).abs() < 1e-6, "ratio {near0}");
    }

    #[test]
    fn inverted_interval_is_rejected() {
        let params = ProblemParams::new(3, 2.0).unwrap();
        assert!(matches!(
            shoot_singular_profile(&params, 1.0, 0.5),
            Err(RadialError::Precondition(_))
        ));
    }

    #[test]
    fn strong_source_blows_up() {
        let params = ProblemParams::new(3, 2.0)
            .unwrap()
            .with_nonlinearity(5.0, -50.0)
            .unwrap();
        let r = SingularShoot::new(params, 1e-3, 100.0).with_amplitude(2.0).run();
        assert!(matches!(r, Err(RadialError::BlowUp { .. })), "{r:?}");
    }
}
