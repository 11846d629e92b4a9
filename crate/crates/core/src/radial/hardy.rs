use crate::indicial::auxiliary_f;

/// Scaled residual of the two-weight equation
/// `-(r^{n-1-ap}|u'|^{p-2}u')' - μ r^{n-1-(a+1)p} u^{p-1}` at `u = r^{-γ}`.
///
/// The flux derivative is taken in closed form, the residual at each
/// radius is divided by `r^{n-1-(a+1)p-(p-1)γ}`, and the largest magnitude
/// over `r_samples` is returned. For a root of `f(γ) = μ` it vanishes.
pub fn hardy_power_residual(n: usize, p: f64, a: f64, mu: f64, gamma: f64, r_samples: &[f64]) -> f64 {
    let nf = n as f64;
    let drift = (-(a + 1.0)).mul_add(p, nf);
    let weight_exp = drift - 1.0;
    let flux_exp = (-(p - 1.0)).mul_add(gamma, drift);
    let coeff = if gamma == 0.0 {
        0.0
    } else {
        gamma.signum() * gamma.abs().powf(p - 1.0)
    };
    let scale_exp = flux_exp - 1.0;
    // m(r) = -coeff r^{flux_exp}, so -m'(r) = coeff·flux_exp·r^{flux_exp-1};
    // the powers of r are divided out before exponentiating
    let flux_shift = (flux_exp - 1.0) - scale_exp;
    let potential_shift = (-(p - 1.0)).mul_add(gamma, weight_exp) - scale_exp;
    r_samples
        .iter()
        .map(|&r| {
            let minus_dflux = coeff * flux_exp * r.powf(flux_shift);
            let potential = mu * r.powf(potential_shift);
            (minus_dflux - potential).abs()
        })
        .fold(0.0, f64::max)
}

/// The residual predicted by the indicial polynomial alone.
pub fn hardy_power_defect(n: usize, p: f64, a: f64, mu: f64, gamma: f64) -> f64 {
    (auxiliary_f(gamma, n, p, a) - mu).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicial::IndicialPolynomial;
    use crate::radial::log_grid;

    #[test]
    fn roots_have_no_residual() {
        let rs = log_grid(1e-3, 1e3, 61);
        let poly = IndicialPolynomial::new(4, 2.5, 0.2).unwrap();
        let d = poly.roots(0.05).unwrap();
        for g in [d.gamma1, d.gamma2] {
            assert!(hardy_power_residual(4, 2.5, 0.2, 0.05, g, &rs) <= 1e-12);
        }
    }

    #[test]
    fn perturbed_root_matches_polynomial() {
        let rs = log_grid(1e-2, 1e2, 21);
        let poly = IndicialPolynomial::new(3, 2.0, 0.0).unwrap();
        let d = poly.roots(0.1).unwrap();
        let g = d.gamma2 + 0.1;
        let res = hardy_power_residual(3, 2.0, 0.0, 0.1, g, &rs);
        let expect = hardy_power_defect(3, 2.0, 0.0, 0.1, g);
        assert!(expect > 1e-3);
        assert!((res - expect).abs() < 1e-12);
    }

    #[test]
    fn constant_solution() {
        let rs = log_grid(0.1, 10.0, 11);
        assert_eq!(hardy_power_residual(3, 1.7, 0.4, 0.0, 0.0, &rs), 0.0);
    }
}
