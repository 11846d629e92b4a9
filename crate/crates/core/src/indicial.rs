//! Indicial polynomial of the weighted Hardy operator.
//!
//! For `u = r^{-γ}` the operator `-div(|x|^{-ap}|∇u|^{p-2}∇u) - μ|x|^{-(a+1)p}u^{p-1}`
//! vanishes exactly when `f(γ) = μ`, where
//!
//! ```text
//! f(γ) = |γ|^{p-2} γ (n - (a+1)p - (p-1)γ)
//! ```
//!
//! `f` increases strictly up to `γ* = (n-(a+1)p)/p`, decreases strictly after
//! it, and `f(γ*) = |γ*|^p` is the best constant in the two-weight Hardy
//! inequality. Every power-law exponent used elsewhere in the crate comes
//! from the two roots computed here.

use thiserror::Error;

use crate::exec::{self, Exec};

/// Relative tolerance used to call a root double.
pub const DOUBLE_ROOT_TOL: f64 = 1e-10;
/// Tolerance on `a - (n-p)/p` below which the weight is treated as critical.
pub const CRITICAL_WEIGHT_TOL: f64 = 1e-14;
/// Residual tolerance for returned roots, relative to `max(1, |μ|)`.
pub const ROOT_RESIDUAL_TOL: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndicialError {
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("no real indicial root: mu = {mu} exceeds the Hardy constant {mu_bar}")]
    NoRealRoot { mu: f64, mu_bar: f64 },
}

/// Source term `f(u) = A u^{q-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonlinearity {
    pub q: f64,
    pub amplitude: f64,
}

/// Every equation parameter in one place.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemParams {
    pub n: usize,
    pub p: f64,
    pub a: f64,
    pub mu: f64,
    pub lambda: f64,
    pub nonlinearity: Option<Nonlinearity>,
}

impl ProblemParams {
    /// Checked constructor; `a`, `mu` and `lambda` start at zero.
    pub fn new(n: usize, p: f64) -> Result<Self, IndicialError> {
        let params = Self {
            n,
            p,
            a: 0.0,
            mu: 0.0,
            lambda: 0.0,
            nonlinearity: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_nonlinearity(mut self, q: f64, amplitude: f64) -> Result<Self, IndicialError> {
        self.nonlinearity = Some(Nonlinearity { q, amplitude });
        self.validate()?;
        Ok(self)
    }

    /// Sobolev exponent `np/(n-p)`.
    pub fn sobolev_exponent(&self) -> f64 {
        let n = self.n as f64;
        n * self.p / (n - self.p)
    }

    pub fn validate(&self) -> Result<(), IndicialError> {
        check_np(self.n as f64, self.p)?;
        if !(self.a.is_finite() && self.mu.is_finite() && self.lambda.is_finite()) {
            return Err(IndicialError::Domain("a, mu and lambda must be finite".into()));
        }
        if let Some(nl) = self.nonlinearity {
            let p_star = self.sobolev_exponent();
            if !(nl.q > self.p && nl.q < p_star) {
                return Err(IndicialError::Domain(format!(
                    "nonlinearity exponent q = {} must lie in (p, p*) = ({}, {})",
                    nl.q, self.p, p_star
                )));
            }
            if !nl.amplitude.is_finite() {
                return Err(IndicialError::Domain("nonlinearity amplitude must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn polynomial(&self) -> Result<IndicialPolynomial, IndicialError> {
        IndicialPolynomial::new(self.n, self.p, self.a)
    }
}

fn check_np(n: f64, p: f64) -> Result<(), IndicialError> {
    if !(n >= 2.0) {
        return Err(IndicialError::Domain(format!("dimension n = {n} must be at least 2")));
    }
    if !(p > 1.0 && p < n) {
        return Err(IndicialError::Domain(format!("exponent p = {p} must lie in (1, n) = (1, {n})")));
    }
    Ok(())
}

/// The five root-placement regimes, selected by the sign of `a - (n-p)/p`
/// and the sign of `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Placement {
    /// `a < (n-p)/p`, `μ ∈ [0, μ̄]`: `0 ≤ γ₁ ≤ γ* ≤ γ₂ ≤ z`.
    SubcriticalNonnegative,
    /// `a < (n-p)/p`, `μ < 0`: `γ₁ < 0 < z < γ₂`.
    SubcriticalNegative,
    /// `a = (n-p)/p`, `μ ≤ 0`: `γ₁ ≤ 0 ≤ γ₂`.
    CriticalWeight,
    /// `a > (n-p)/p`, `μ ∈ [0, μ̄]`: `z ≤ γ₁ ≤ γ* ≤ γ₂ ≤ 0`.
    SupercriticalNonnegative,
    /// `a > (n-p)/p`, `μ < 0`: `γ₁ < z < 0 < γ₂`.
    SupercriticalNegative,
}

/// Roots and constants for one `(n, p, a, μ)`.
///
/// `outer_zero` is `z = (n-(a+1)p)/(p-1)`, the nonzero root of `f` at `μ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialData {
    pub mu: f64,
    pub mu_bar: f64,
    pub gamma_star: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub outer_zero: f64,
    pub placement: Placement,
    pub double_root: bool,
}

impl IndicialData {
    /// Checks the placement inequalities of the regime, non-strictly, at `tol`.
    pub fn placement_holds(&self, tol: f64) -> bool {
        let le = |x: f64, y: f64| x <= y + tol;
        let (g1, g2, gs, z) = (self.gamma1, self.gamma2, self.gamma_star, self.outer_zero);
        let ordered = le(g1, gs) && le(gs, g2);
        ordered
            && match self.placement {
                Placement::SubcriticalNonnegative => le(0.0, g1) && le(g2, z),
                Placement::SubcriticalNegative => le(g1, 0.0) && le(0.0, z) && le(z, g2),
                Placement::CriticalWeight => le(g1, 0.0) && le(0.0, g2),
                Placement::SupercriticalNonnegative => le(z, g1) && le(g2, 0.0),
                Placement::SupercriticalNegative => le(g1, z) && le(z, 0.0) && le(0.0, g2),
            }
    }
}

/// `f(γ)` for fixed `(n, p, a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndicialPolynomial {
    n: f64,
    p: f64,
    a: f64,
}

impl IndicialPolynomial {
    pub fn new(n: usize, p: f64, a: f64) -> Result<Self, IndicialError> {
        let n = n as f64;
        check_np(n, p)?;
        if !a.is_finite() {
            return Err(IndicialError::Domain("weight exponent a must be finite".into()));
        }
        Ok(Self { n, p, a })
    }

    /// `n - (a+1)p`.
    pub fn drift(&self) -> f64 {
        drift(self.n, self.p, self.a)
    }

    pub fn gamma_star(&self) -> f64 {
        self.drift() / self.p
    }

    pub fn mu_bar(&self) -> f64 {
        self.gamma_star().abs().powf(self.p)
    }

    pub fn outer_zero(&self) -> f64 {
        self.drift() / (self.p - 1.0)
    }

    pub fn eval(&self, gamma: f64) -> f64 {
        auxiliary_f(gamma, self.n as usize, self.p, self.a)
    }

    /// `f'(γ) = (p-1)|γ|^{p-2}(n-(a+1)p - pγ)`; infinite at 0 for `p < 2`.
    pub fn derivative(&self, gamma: f64) -> f64 {
        let p = self.p;
        if gamma == 0.0 {
            return match p.partial_cmp(&2.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY * self.drift().signum(),
                Some(std::cmp::Ordering::Equal) => self.drift(),
                _ => 0.0,
            };
        }
        (p - 1.0) * gamma.abs().powf(p - 2.0) * (self.drift() - p * gamma)
    }

    /// Sign of `a - (n-p)/p` with the critical-weight tolerance.
    pub fn weight_regime(&self) -> std::cmp::Ordering {
        let crit = (self.n - self.p) / self.p;
        let diff = self.a - crit;
        if diff.abs() <= CRITICAL_WEIGHT_TOL * crit.abs().max(1.0) {
            std::cmp::Ordering::Equal
        } else if diff < 0.0 {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    }

    /// Both real roots of `f(γ) = μ`.
    pub fn roots(&self, mu: f64) -> Result<IndicialData, IndicialError> {
        if !mu.is_finite() {
            return Err(IndicialError::Domain(format!("mu = {mu} is not finite")));
        }
        let regime = self.weight_regime();
        let critical = regime == std::cmp::Ordering::Equal;
        let gamma_star = if critical { 0.0 } else { self.gamma_star() };
        let mu_bar = if critical { 0.0 } else { self.mu_bar() };
        let outer_zero = if critical { 0.0 } else { self.outer_zero() };
        let double_tol = DOUBLE_ROOT_TOL * mu_bar.max(1.0);

        if mu > mu_bar + double_tol {
            return Err(IndicialError::NoRealRoot { mu, mu_bar });
        }
        let placement = match regime {
            std::cmp::Ordering::Equal => Placement::CriticalWeight,
            std::cmp::Ordering::Less if mu >= 0.0 => Placement::SubcriticalNonnegative,
            std::cmp::Ordering::Less => Placement::SubcriticalNegative,
            std::cmp::Ordering::Greater if mu >= 0.0 => Placement::SupercriticalNonnegative,
            std::cmp::Ordering::Greater => Placement::SupercriticalNegative,
        };
        let mut data = IndicialData {
            mu,
            mu_bar,
            gamma_star,
            gamma1: gamma_star,
            gamma2: gamma_star,
            outer_zero,
            placement,
            double_root: false,
        };
        if (mu_bar - mu).abs() <= double_tol {
            data.double_root = true;
            return Ok(data);
        }
        if mu == 0.0 {
            data.gamma1 = outer_zero.min(0.0);
            data.gamma2 = outer_zero.max(0.0);
            return Ok(data);
        }
        let (inner_lo, inner_hi) = (outer_zero.min(0.0), outer_zero.max(0.0));
        let (left, right) = if mu > 0.0 {
            // both roots sit between the two zeros of f
            ((inner_lo, gamma_star), (gamma_star, inner_hi))
        } else {
            (
                (self.expand_bracket(inner_lo, mu, -1.0), inner_lo),
                (inner_hi, self.expand_bracket(inner_hi, mu, 1.0)),
            )
        };
        data.gamma1 = self.solve_branch(left, mu, true);
        data.gamma2 = self.solve_branch(right, mu, false);
        Ok(data)
    }

    /// Geometric expansion away from `start` until `f < μ`.
    fn expand_bracket(&self, start: f64, mu: f64, dir: f64) -> f64 {
        let mut step = start.abs().max(1.0);
        let mut end = start + dir * step;
        while self.eval(end) >= mu {
            step *= 2.0;
            end = start + dir * step;
        }
        end
    }

    /// Bisection in `t = |γ|^{p-2}γ`, which straightens `f` near the origin,
    /// followed by one guarded Newton step in `γ`.
    fn solve_branch(&self, (lo, hi): (f64, f64), mu: f64, increasing: bool) -> f64 {
        let p = self.p;
        let to_t = |g: f64| g.abs().powf(p - 1.0).copysign(g);
        let to_g = |t: f64| t.abs().powf(1.0 / (p - 1.0)).copysign(t);
        let sign = if increasing { 1.0 } else { -1.0 };
        // g(t) > 0 on the `up` side of the root
        let g = |t: f64| sign * (self.eval(to_g(t)) - mu);
        let (mut t_lo, mut t_hi) = (to_t(lo), to_t(hi));
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (t_lo + t_hi);
            if mid <= t_lo || mid >= t_hi {
                break;
            }
            if g(mid) > 0.0 {
                t_hi = mid;
            } else {
                t_lo = mid;
            }
            if t_hi - t_lo <= 1e-15 * t_lo.abs().max(t_hi.abs()) {
                break;
            }
        }
        let (g_lo, g_hi) = (to_g(t_lo), to_g(t_hi));
        let mut best = 0.5 * (g_lo + g_hi);
        let mut best_res = (self.eval(best) - mu).abs();
        for cand in [g_lo, g_hi] {
            let r = (self.eval(cand) - mu).abs();
            if r < best_res {
                best = cand;
                best_res = r;
            }
        }
        let d = self.derivative(best);
        if d.is_finite() && d != 0.0 {
            let polished = best - (self.eval(best) - mu) / d;
            if polished >= g_lo.min(g_hi) && polished <= g_lo.max(g_hi) {
                let r = (self.eval(polished) - mu).abs();
                if r < best_res {
                    best = polished;
                }
            }
        }
        best
    }
}

/// Best constant `|(n-(a+1)p)/p|^p` of the two-weight Hardy inequality.
pub fn hardy_best_constant(n: usize, p: f64, a: f64) -> Result<f64, IndicialError> {
    IndicialPolynomial::new(n, p, a).map(|poly| poly.mu_bar())
}

/// Exponential rate `(λ/(p-1))^{1/p}` of the eigenfunctions `e^{α<x,ξ>}`.
pub fn eigen_rate_alpha(lambda: f64, p: f64) -> Result<f64, IndicialError> {
    if !(p > 1.0) {
        return Err(IndicialError::Domain(format!("p = {p} must exceed 1")));
    }
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(IndicialError::Domain(format!("lambda = {lambda} must be positive")));
    }
    Ok((lambda / (p - 1.0)).powf(1.0 / p))
}

/// `f(γ) = |γ|^{p-2}γ(n-(a+1)p-(p-1)γ)`, with `f(0) = 0` for every `p > 1`.
pub fn auxiliary_f(gamma: f64, n: usize, p: f64, a: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    // fused forms keep the linear factor accurate near its zero, where it cancels
    let linear = (-(p - 1.0)).mul_add(gamma, drift(n as f64, p, a));
    gamma.signum() * gamma.abs().powf(p - 1.0) * linear
}

fn drift(n: f64, p: f64, a: f64) -> f64 {
    (-(a + 1.0)).mul_add(p, n)
}

/// Roots of `f(γ) = params.mu` for the weight `params.a`.
pub fn indicial_roots(params: &ProblemParams) -> Result<IndicialData, IndicialError> {
    params.polynomial()?.roots(params.mu)
}

/// Batch root solve, order preserving.
pub fn indicial_roots_batch(
    exec: Exec,
    params: &[ProblemParams],
) -> Vec<Result<IndicialData, IndicialError>> {
    exec::map(exec, params, indicial_roots)
}

/// Hardy–Sobolev–Maz'ya critical exponent `np/(n-(a+1-b)p)`.
pub fn critical_exponent(n: usize, p: f64, a: f64, b: f64) -> Result<f64, IndicialError> {
    let nf = n as f64;
    check_np(nf, p)?;
    let a_max = (nf - p) / p;
    if !(a >= 0.0 && a < a_max) {
        return Err(IndicialError::Domain(format!("weight a = {a} must lie in [0, {a_max})")));
    }
    if !(b >= a && b < a + 1.0) {
        return Err(IndicialError::Domain(format!(
            "weight b = {b} must lie in [a, a+1) = [{a}, {})",
            a + 1.0
        )));
    }
    Ok(nf * p / (nf - (a + 1.0 - b) * p))
}
