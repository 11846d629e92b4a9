//! Rescaling limits of radial profiles: dilations at the origin, translations
//! to infinity, Busemann functions and the Martin-kernel ratio.
//!
//! All evaluations go through the profile's monotone cubic interpolant in
//! `(ln r, ln u)`, so ratios `u(a)/u(b)` are formed as differences of logs and
//! never underflow.

use std::io::{self, Write};

use thiserror::Error;

use crate::exec::{self, Exec};
use crate::interp::MonotoneCubic;
use crate::radial::RadialProfile;
use crate::report::fmt_f64;

/// Window half-width (in `ln`-free units) for origin dilations: `s ∈ [1/10, 10]`.
pub const ORIGIN_WINDOW: f64 = 10.0;
/// Half-width for translations to infinity: `s ∈ [-2, 2]`.
pub const TRANSLATION_WINDOW: f64 = 2.0;
const UNIT_TOL: f64 = 1e-14;
const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BlowupError {
    #[error("radius {r} lies outside the profile domain [{lo}, {hi}]")]
    OutOfRange { r: f64, lo: f64, hi: f64 },
    #[error("direction must have unit length, got |xi| = {0}")]
    NotUnit(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// A unit vector `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    xi: Vec<f64>,
}

impl Direction {
    /// Accepts `xi` only if `| |xi| - 1 | ≤ 1e-14`.
    pub fn new(xi: Vec<f64>) -> Result<Self, BlowupError> {
        let norm = norm(&xi);
        if xi.is_empty() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(BlowupError::NotUnit(norm));
        }
        Ok(Self { xi })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(v: &[f64]) -> Result<Self, BlowupError> {
        let n = norm(v);
        if !(n > 0.0) || !n.is_finite() {
            return Err(BlowupError::NotUnit(n));
        }
        Ok(Self {
            xi: v.iter().map(|c| c / n).collect(),
        })
    }

    /// The `k`-th coordinate axis in dimension `dim`.
    pub fn axis(dim: usize, k: usize) -> Self {
        let mut xi = vec![0.0; dim];
        xi[k] = 1.0;
        Self { xi }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist_to_ray_point(x: &[f64], xi: &Direction, t: f64) -> f64 {
    x.iter()
        .zip(xi.as_slice())
        .map(|(a, b)| (a - t * b) * (a - t * b))
        .sum::<f64>()
        .sqrt()
}

/// `t - |x - tξ|`, evaluated as `(2t⟨x,ξ⟩ - |x|²)/(t + |x - tξ|)` to avoid
/// cancellation for large `t`.
pub fn busemann(x: &[f64], xi: &Direction, t: f64) -> f64 {
    let d = dist_to_ray_point(x, xi, t);
    let num = 2.0 * t * dot(x, xi.as_slice()) - dot(x, x);
    if num == 0.0 {
        return 0.0;
    }
    num / (t + d)
}

/// `⟨x, ξ⟩`.
pub fn busemann_limit(x: &[f64], xi: &Direction) -> f64 {
    dot(x, xi.as_slice())
}

/// Upper bound `|x|²/(2(t - |x|))` on `|busemann - busemann_limit|`.
pub fn busemann_error_bound(x: &[f64], t: f64) -> f64 {
    let nx = norm(x);
    nx * nx / (2.0 * (t - nx))
}

/// Interpolated `ln u` and `r u'/u` of a profile.
struct LogProfile {
    interp: MonotoneCubic,
    lo: f64,
    hi: f64,
}

impl LogProfile {
    fn new(profile: &RadialProfile) -> Result<Self, BlowupError> {
        let interp = profile
            .log_log_interpolant()
            .ok_or_else(|| BlowupError::Precondition("profile needs r > 0 and two samples".into()))?;
        Ok(Self {
            interp,
            lo: profile.r_min(),
            hi: profile.r_max(),
        })
    }

    fn check(&self, r: f64) -> Result<(), BlowupError> {
        // window endpoints are built through exp/ln and may miss a knot by an ulp
        if r >= self.lo * (1.0 - DOMAIN_SLACK) && r <= self.hi * (1.0 + DOMAIN_SLACK) {
            Ok(())
        } else {
            Err(BlowupError::OutOfRange {
                r,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }

    /// `(ln u(r), r u'(r)/u(r))`.
    fn at(&self, r: f64) -> Result<(f64, f64), BlowupError> {
        self.check(r)?;
        // endpoints are exact knots; guard against ln/exp round trips leaving the domain
        let (a, b) = self.interp.domain();
        let lr = r.ln().clamp(a, b);
        Ok(self.interp.eval_with_derivative(lr).expect("clamped into domain"))
    }
}

/// `u(|x - tξ|)/u(t)` for a radial profile `u`.
pub fn martin_kernel_estimate(
    profile: &RadialProfile,
    x: &[f64],
    xi: &Direction,
    t: f64,
) -> Result<f64, BlowupError> {
    if x.len() != xi.dim() {
        return Err(BlowupError::Precondition(format!(
            "x has dimension {}, xi has {}",
            x.len(),
            xi.dim()
        )));
    }
    let lp = LogProfile::new(profile)?;
    let rho = dist_to_ray_point(x, xi, t);
    let (l_rho, _) = lp.at(rho)?;
    let (l_t, _) = lp.at(t)?;
    Ok((l_rho - l_t).exp())
}

/// Distances of the rescaled profiles from the expected limit, one entry per scale.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RescaleReport {
    pub k_values: Vec<f64>,
    pub sup_distance: Vec<f64>,
    pub grad_distance: Vec<f64>,
}

impl RescaleReport {
    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    /// True when each sup-distance is no larger than the one before it.
    pub fn is_decreasing(&self) -> bool {
        self.sup_distance.windows(2).all(|w| w[1] <= w[0])
    }

    /// CSV with columns `scale,sup_distance,grad_distance`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "scale,sup_distance,grad_distance")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{}",
                fmt_f64(self.k_values[i]),
                fmt_f64(self.sup_distance[i]),
                fmt_f64(self.grad_distance[i])
            )?;
        }
        Ok(())
    }
}

/// Window and sampling for the rescaling experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaleOptions {
    /// `R_win` for dilations, `S` for translations.
    pub window: f64,
    /// Evaluation points per window.
    pub samples: usize,
    pub exec: Exec,
}

impl RescaleOptions {
    pub fn origin() -> Self {
        Self {
            window: ORIGIN_WINDOW,
            samples: 401,
            exec: Exec::default(),
        }
    }

    pub fn infinity() -> Self {
        Self {
            window: TRANSLATION_WINDOW,
            samples: 401,
            exec: Exec::default(),
        }
    }
}

fn collect(scales: &[f64], rows: Vec<Result<(f64, f64), BlowupError>>) -> Result<RescaleReport, BlowupError> {
    let mut report = RescaleReport::default();
    for (&k, row) in scales.iter().zip(rows) {
        let (sup, grad) = row?;
        report.k_values.push(k);
        report.sup_distance.push(sup);
        report.grad_distance.push(grad);
    }
    Ok(report)
}

/// `u_k(s) = u(R_k s)/u(R_k)` against `s^{-γ₁}` on `s ∈ [1/10, 10]`.
pub fn rescale_near_zero(profile: &RadialProfile, scales: &[f64], gamma1: f64) -> Result<RescaleReport, BlowupError> {
    rescale_near_zero_with(profile, scales, gamma1, &RescaleOptions::origin())
}

pub fn rescale_near_zero_with(
    profile: &RadialProfile,
    scales: &[f64],
    gamma1: f64,
    opts: &RescaleOptions,
) -> Result<RescaleReport, BlowupError> {
    if scales.is_empty() {
        return Ok(RescaleReport::default());
    }
    if !(opts.window >= 1.0) || opts.samples < 2 {
        return Err(BlowupError::Precondition("window must be >= 1 with two or more samples".into()));
    }
    let lp = LogProfile::new(profile)?;
    let w = opts.window.ln();
    let log_s: Vec<f64> = (0..opts.samples)
        .map(|j| -w + 2.0 * w * j as f64 / (opts.samples - 1) as f64)
        .collect();
    let rows = exec::map(opts.exec, scales, |&big_r| {
        if !(big_r > 0.0) {
            return Err(BlowupError::Precondition(format!("scale {big_r} must be positive")));
        }
        let (l0, _) = lp.at(big_r)?;
        let (mut sup, mut grad) = (0.0f64, 0.0f64);
        for &ls in &log_s {
            let s = ls.exp();
            let (l, d) = lp.at(big_r * s)?;
            let uk = (l - l0).exp();
            let target = (-gamma1 * ls).exp();
            sup = sup.max((uk - target).abs());
            grad = grad.max((uk * d / s + gamma1 * target / s).abs());
        }
        Ok((sup, grad))
    });
    collect(scales, rows)
}

/// `v_k(s) = u(t_k + s)/u(t_k)` against `e^{-αs}` on `s ∈ [-2, 2]`.
pub fn translate_rescale_at_infinity(
    profile: &RadialProfile,
    shifts: &[f64],
    alpha: f64,
) -> Result<RescaleReport, BlowupError> {
    translate_rescale_at_infinity_with(profile, shifts, alpha, &RescaleOptions::infinity())
}

pub fn translate_rescale_at_infinity_with(
    profile: &RadialProfile,
    shifts: &[f64],
    alpha: f64,
    opts: &RescaleOptions,
) -> Result<RescaleReport, BlowupError> {
    if shifts.is_empty() {
        return Ok(RescaleReport::default());
    }
    if !(opts.window >= 0.0) || opts.samples < 1 {
        return Err(BlowupError::Precondition("window must be nonnegative".into()));
    }
    let lp = LogProfile::new(profile)?;
    let s_pts: Vec<f64> = if opts.window == 0.0 || opts.samples == 1 {
        vec![0.0]
    } else {
        let m = opts.samples - 1;
        (0..=m)
            .map(|j| opts.window * (2.0 * j as f64 - m as f64) / m as f64)
            .collect()
    };
    let rows = exec::map(opts.exec, shifts, |&t| {
        let (l0, _) = lp.at(t)?;
        let (mut sup, mut grad) = (0.0f64, 0.0f64);
        for &s in &s_pts {
            let r = t + s;
            let (l, d) = lp.at(r)?;
            let vk = (l - l0).exp();
            let target = (-alpha * s).exp();
            sup = sup.max((vk - target).abs());
            grad = grad.max((vk * d / r + alpha * target).abs());
        }
        Ok((sup, grad))
    });
    collect(shifts, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::log_grid;

    fn yukawa(lo: f64, hi: f64, count: usize) -> RadialProfile {
        RadialProfile::from_fn(log_grid(lo, hi, count), |r| -r - r.ln(), |r| -1.0 - 1.0 / r, "").unwrap()
    }

    #[test]
    fn busemann_examples() {
        let xi = Direction::axis(3, 0);
        assert_eq!(busemann(&[0.0; 3], &xi, 5.0), 0.0);
        assert_eq!(busemann(&[1.0, 0.0, 0.0], &xi, 10.0), 1.0);
        let b = busemann(&[0.0, 1.0, 0.0], &xi, 1e3);
        let exact = -1.0 / (1e3 + (1e6f64 + 1.0).sqrt());
        assert!((b - exact).abs() < 1e-15);
        assert!((b + 5.0e-4).abs() < 1e-9);
        assert_eq!(busemann_limit(&[0.0, 1.0, 0.0], &xi), 0.0);
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(vec![0.6, 0.8]).is_ok());
        assert!(Direction::new(vec![1.0, 1.0]).is_err());
        assert!(Direction::normalized(&[0.0, 0.0]).is_err());
        let d = Direction::normalized(&[3.0, 4.0]).unwrap();
        assert!((norm(d.as_slice()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn martin_closed_form() {
        let prof = yukawa(1.0, 1100.0, 8000);
        let xi = Direction::axis(3, 0);
        let m = martin_kernel_estimate(&prof, &[1.0, 0.0, 0.0], &xi, 1e3).unwrap();
        let exact = 1e3 / 999.0 * 1f64.exp();
        assert!((m - exact).abs() < 1e-9, "{m} vs {exact}");
        assert_eq!(martin_kernel_estimate(&prof, &[0.0; 3], &xi, 1e3).unwrap(), 1.0);
        let perp = martin_kernel_estimate(&prof, &[0.0, 1.0, 0.0], &xi, 1e3).unwrap();
        assert!((perp - 1.0).abs() < 2e-3);
        assert!(matches!(
            martin_kernel_estimate(&prof, &[-200.0, 0.0, 0.0], &xi, 1e3),
            Err(BlowupError::OutOfRange { .. })
        ));
    }

    #[test]
    fn origin_fixed_point() {
        let prof = RadialProfile::from_fn(log_grid(1e-6, 1e2, 300), |r| -0.25 * r.ln(), |r| -0.25 / r, "").unwrap();
        let rep = rescale_near_zero(&prof, &[1e-1, 1e-2, 1e-3, 1e-4], 0.25).unwrap();
        assert_eq!(rep.len(), 4);
        assert!(rep.sup_distance.iter().chain(&rep.grad_distance).all(|&d| d <= 1e-12));
        assert!(rescale_near_zero(&prof, &[], 0.25).unwrap().is_empty());
        assert!(rescale_near_zero(&prof, &[5e-6], 0.25).is_err());
    }

    #[test]
    fn infinity_fixed_point() {
        let prof = RadialProfile::from_fn(log_grid(1.0, 200.0, 20000), |r| -0.7 * r, |_| -0.7, "").unwrap();
        let rep = translate_rescale_at_infinity(&prof, &[10.0, 20.0, 40.0, 80.0, 160.0], 0.7).unwrap();
        assert!(rep.sup_distance.iter().all(|&d| d <= 1e-12), "{:?}", rep.sup_distance);
    }

    #[test]
    fn yukawa_translation_trend() {
        let prof = yukawa(1.0, 200.0, 8000);
        let rep = translate_rescale_at_infinity(&prof, &[10.0, 20.0, 40.0, 80.0, 160.0], 1.0).unwrap();
        assert!(rep.is_decreasing());
        // leading term e^{2}·2/(t-2) at s = -2
        let t = 160.0;
        let expect = 2f64.exp() * (t / (t - 2.0) - 1.0);
        assert!((rep.sup_distance[4] - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn zero_window() {
        let prof = yukawa(1.0, 50.0, 500);
        let opts = RescaleOptions {
            window: 0.0,
            ..RescaleOptions::infinity()
        };
        let rep = translate_rescale_at_infinity_with(&prof, &[10.0, 20.0], 1.0, &opts).unwrap();
        assert_eq!(rep.sup_distance, vec![0.0, 0.0]);
    }

    #[test]
    fn amplitude_cancels() {
        let a = yukawa(0.1, 50.0, 500);
        let b = RadialProfile::from_fn(a.r().to_vec(), |r| 3.0f64.ln() - r - r.ln(), |r| -1.0 - 1.0 / r, "").unwrap();
        let ra = rescale_near_zero(&a, &[1.0, 2.0], 1.0).unwrap();
        let rb = rescale_near_zero(&b, &[1.0, 2.0], 1.0).unwrap();
        for (x, y) in ra.sup_distance.iter().zip(&rb.sup_distance) {
            assert!((x - y).abs() <= 1e-13 * x.max(1.0));
        }
    }

    #[test]
    fn csv_header() {
        let rep = RescaleReport {
            k_values: vec![1.0],
            sup_distance: vec![0.5],
            grad_distance: vec![0.25],
        };
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "scale,sup_distance,grad_distance\n1.0000000000000000e0,5.0000000000000000e-1,2.5000000000000000e-1\n"
        );
    }
}
