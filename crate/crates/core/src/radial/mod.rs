//! Radial and one-dimensional reductions: integration, separatrix shooting,
//! decay-exponent fitting.
//!
//! Profiles are stored as `(r, ln u, u'/u)` rather than `(r, u, u')`: the
//! exterior eigenfunctions decay like `e^{-αr}` and fall below the smallest
//! `f64` long before the Martin-kernel radii are reached, while their
//! logarithms stay well scaled.

mod eigen1d;
mod exterior;
mod fit;
mod hardy;
mod singular;

use std::fmt::Write as _;
use std::io::{self, Write};

use thiserror::Error;

use crate::indicial::IndicialError;
use crate::interp::MonotoneCubic;
use crate::ode::OdeError;
use crate::report::fmt_f64;

pub use eigen1d::{eigen_profile_1d, eigen_profile_1d_fixed, riccati_ratio_flow, RatioTrajectory};
pub use exterior::{radial_exterior_eigen, ExteriorShoot};
pub use fit::{fit_decay_exponents, fit_decay_exponents_window, DecayFit};
pub use hardy::{hardy_power_defect, hardy_power_residual};
pub use singular::{shoot_singular_profile, SingularShoot};

/// Default integrator tolerances for every radial problem.
pub const RTOL: f64 = 1e-10;
pub const ATOL: f64 = 1e-12;
/// Overflow barrier for `u`.
pub const BLOWUP_BARRIER: f64 = 1e150;
/// Underflow barrier for `u` on bounded-span integrations.
pub const ZERO_BARRIER: f64 = 1e-150;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error(transparent)]
    Params(#[from] IndicialError),
    #[error(transparent)]
    Integration(#[from] OdeError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ratio flow reached zero at t = {t}")]
    SingularRatio { t: f64 },
    #[error("bracket endpoints both classify as {0:?}; integration span too short or bracket wrong")]
    NoSeparatrix(Classification),
    #[error("solution blew up at r = {r}")]
    BlowUp { r: f64 },
    #[error("solution reached zero at r = {r}")]
    HitZero { r: f64 },
    #[error("fit window holds {0} samples, need at least 10")]
    IllConditioned(usize),
}

/// Fate of a shot trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Decaying,
    BlowUp,
    HitZero,
}

/// A positive sampled radial function.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    r: Vec<f64>,
    log_u: Vec<f64>,
    log_slope: Vec<f64>,
    /// Free-form description of the parameters that produced the profile.
    pub meta: String,
}

impl RadialProfile {
    /// From `ln u` and `u'/u`.
    pub fn from_log(
        r: Vec<f64>,
        log_u: Vec<f64>,
        log_slope: Vec<f64>,
        meta: impl Into<String>,
    ) -> Result<Self, RadialError> {
        if r.len() != log_u.len() || r.len() != log_slope.len() || r.is_empty() {
            return Err(RadialError::Precondition("profile columns differ in length".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RadialError::Precondition("radii must be strictly increasing".into()));
        }
        if log_u.iter().chain(&log_slope).chain(&r).any(|v| !v.is_finite()) {
            return Err(RadialError::Precondition("profile holds non-finite values".into()));
        }
        Ok(Self {
            r,
            log_u,
            log_slope,
            meta: meta.into(),
        })
    }

    /// From `u > 0` and `u'`.
    pub fn from_samples(
        r: Vec<f64>,
        u: &[f64],
        du: &[f64],
        meta: impl Into<String>,
    ) -> Result<Self, RadialError> {
        if u.iter().any(|&v| !(v > 0.0)) {
            return Err(RadialError::Precondition("profile values must be positive".into()));
        }
        if u.len() != du.len() {
            return Err(RadialError::Precondition("profile columns differ in length".into()));
        }
        let log_u = u.iter().map(|v| v.ln()).collect();
        let log_slope = u.iter().zip(du).map(|(v, d)| d / v).collect();
        Self::from_log(r, log_u, log_slope, meta)
    }

    /// Samples a closed form `u(r)`, `u'(r)` on the given radii.
    pub fn from_fn(
        r: Vec<f64>,
        log_u: impl Fn(f64) -> f64,
        log_slope: impl Fn(f64) -> f64,
        meta: impl Into<String>,
    ) -> Result<Self, RadialError> {
        let lu = r.iter().map(|&x| log_u(x)).collect();
        let ls = r.iter().map(|&x| log_slope(x)).collect();
        Self::from_log(r, lu, ls, meta)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn log_u(&self) -> &[f64] {
        &self.log_u
    }

    /// `u'/u` at each sample.
    pub fn log_slope(&self) -> &[f64] {
        &self.log_slope
    }

    pub fn u(&self) -> Vec<f64> {
        self.log_u.iter().map(|v| v.exp()).collect()
    }

    pub fn du(&self) -> Vec<f64> {
        self.log_u
            .iter()
            .zip(&self.log_slope)
            .map(|(l, s)| s * l.exp())
            .collect()
    }

    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    pub fn r_max(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// Monotone cubic interpolant of `ln u` against `ln r`, using the stored
    /// slopes `r u'/u` as knot derivatives; requires `r > 0`.
    pub fn log_log_interpolant(&self) -> Option<MonotoneCubic> {
        if self.r[0] <= 0.0 {
            return None;
        }
        let slopes = self.r.iter().zip(&self.log_slope).map(|(r, s)| r * s).collect();
        MonotoneCubic::with_slopes(self.r.iter().map(|v| v.ln()).collect(), self.log_u.clone(), slopes)
    }

    /// Restriction to `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> Vec<usize> {
        (0..self.r.len())
            .filter(|&i| self.r[i] >= lo && self.r[i] <= hi)
            .collect()
    }

    /// CSV with columns `r,u,du` preceded by a `#` comment carrying `meta`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut buf = String::new();
        for line in self.meta.lines() {
            let _ = writeln!(buf, "# {line}");
        }
        buf.push_str("r,u,du\n");
        for i in 0..self.r.len() {
            let u = self.log_u[i].exp();
            let _ = writeln!(
                buf,
                "{},{},{}",
                fmt_f64(self.r[i]),
                fmt_f64(u),
                fmt_f64(self.log_slope[i] * u)
            );
        }
        out.write_all(buf.as_bytes())
    }
}

/// Outcome of a shot or a marched separatrix.
#[derive(Debug, Clone)]
pub struct ShootResult {
    pub profile: RadialProfile,
    /// Initial log-slope `u'/u` at the inner radius (or amplitude for singular shots).
    pub shoot_param: f64,
    pub bisection_iters: usize,
    pub classification: Classification,
    /// Classifications of the final first-stage bracket endpoints (lower, upper).
    pub bracket_ends: Option<(Classification, Classification)>,
    /// Number of restarts used to march the separatrix across the span.
    pub stages: usize,
}

/// Which gradient ratio [`gradient_ratio_curve`] reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioMode {
    /// `r |u'| / u`, the power-law exponent near the origin.
    Scaled,
    /// `|u'| / u`, the exponential rate at infinity.
    Plain,
}

pub fn gradient_ratio_curve(profile: &RadialProfile, mode: RatioMode) -> Vec<(f64, f64)> {
    profile
        .r
        .iter()
        .zip(&profile.log_slope)
        .map(|(&r, &s)| match mode {
            RatioMode::Scaled => (r, (r * s).abs()),
            RatioMode::Plain => (r, s.abs()),
        })
        .collect()
}

/// `count` radii log-spaced on `[lo, hi]`, endpoints exact.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    let mut out: Vec<f64> = (0..count)
        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
        .collect();
    out[0] = lo;
    out[count - 1] = hi;
    out
}

/// `|x|^{1/(p-1)}` with the sign of `x`: inverts `|s|^{p-2}s`.
#[inline]
pub(crate) fn signed_root(x: f64, p: f64) -> f64 {
    x.abs().powf(1.0 / (p - 1.0)).copysign(x)
}

/// `|s|^{p-2}s`.
#[inline]
pub(crate) fn signed_pow(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.abs().powf(p - 1.0).copysign(s)
    }
}
