use plap_core::indicial::{IndicialPolynomial, Placement};
use plap_core::{auxiliary_f, hardy_best_constant, ProblemParams};
use proptest::prelude::*;

/// Placement predicted from the signs of `a - (n-p)/p` and `μ`, and the
/// ordering chain that case asserts, written out independently of the library.
fn expected(n: usize, p: f64, a: f64, mu: f64, g1: f64, g2: f64) -> (Placement, bool) {
    let nf = n as f64;
    let crit = (nf - p) / p;
    let z = (nf - (a + 1.0) * p) / (p - 1.0);
    let gs = (nf - (a + 1.0) * p) / p;
    let tol = 1e-10 * (1.0 + z.abs());
    let le = |x: f64, y: f64| x <= y + tol;
    let diff = a - crit;
    if diff.abs() <= 1e-14 {
        (Placement::CriticalWeight, le(g1, 0.0) && le(0.0, g2))
    } else if diff < 0.0 {
        if mu >= 0.0 {
            let ok = le(0.0, g1) && le(g1, gs) && le(gs, g2) && le(g2, z);
            (Placement::SubcriticalNonnegative, ok)
        } else {
            (Placement::SubcriticalNegative, g1 < 0.0 && 0.0 < z && le(z, g2))
        }
    } else if mu >= 0.0 {
        let ok = le(z, g1) && le(g1, gs) && le(gs, g2) && le(g2, 0.0);
        (Placement::SupercriticalNonnegative, ok)
    } else {
        (Placement::SupercriticalNegative, le(g1, z) && z < 0.0 && 0.0 < g2)
    }
}

fn admissible() -> impl Strategy<Value = (usize, f64, f64)> {
    (2usize..=10)
        .prop_flat_map(|n| (Just(n), 1.05..(n as f64 - 0.05)))
        .prop_flat_map(|(n, p)| {
            let crit = (n as f64 - p) / p;
            let a = prop_oneof![4 => -2.0..3.0f64, 1 => Just(crit)];
            (Just(n), Just(p), a)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn maximum_sits_at_gamma_star((n, p, a) in admissible()) {
        let poly = IndicialPolynomial::new(n, p, a).unwrap();
        let gs = (n as f64 - (a + 1.0) * p) / p;
        let mu_bar = gs.abs().powf(p);
        let scale = mu_bar.max(1.0);
        prop_assert!((hardy_best_constant(n, p, a).unwrap() - mu_bar).abs() <= 1e-10 * scale);
        prop_assert!((auxiliary_f(gs, n, p, a) - mu_bar).abs() <= 1e-10 * scale);

        let step = 1e-3;
        let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
        for k in -4000..=4000 {
            let g = gs + k as f64 * step;
            let v = poly.eval(g);
            if v > best {
                best = v;
                arg = g;
            }
        }
        prop_assert!((arg - gs).abs() <= step);
        prop_assert!(best <= mu_bar + 1e-10 * scale);
    }

    #[test]
    fn roots_solve_and_respect_the_table((n, p, a) in admissible(), frac in 0.0..1.0f64) {
        let mu_bar = hardy_best_constant(n, p, a).unwrap();
        let mu = -10.0 + frac * (mu_bar + 10.0);
        let params = ProblemParams::new(n, p).unwrap().with_a(a).with_mu(mu);
        let d = plap_core::indicial_roots(&params).unwrap();
        let tol = 1e-12 * mu.abs().max(1.0);
        prop_assert!((auxiliary_f(d.gamma1, n, p, a) - mu).abs() <= tol, "g1 {:?}", d);
        prop_assert!((auxiliary_f(d.gamma2, n, p, a) - mu).abs() <= tol, "g2 {:?}", d);
        let (placement, ordered) = expected(n, p, a, mu, d.gamma1, d.gamma2);
        prop_assert_eq!(d.placement, placement);
        prop_assert!(ordered, "{:?}", d);
    }

    #[test]
    fn quadratic_case_matches_closed_form(n in 3usize..=10, a in -2.0..3.0f64, frac in 0.0..1.0f64) {
        let drift = n as f64 - 2.0 * (a + 1.0);
        let mu_bar = 0.25 * drift * drift;
        let mu = -10.0 + frac * (mu_bar + 10.0);
        let d = IndicialPolynomial::new(n, 2.0, a).unwrap().roots(mu).unwrap();
        // γ² - Dγ + μ = 0, larger-magnitude root first to avoid cancellation
        let disc = (drift * drift - 4.0 * mu).max(0.0).sqrt();
        let big = 0.5 * (drift + drift.signum() * disc);
        let (r1, r2) = if big == 0.0 { (0.0, 0.0) } else { (big, mu / big) };
        let (lo, hi) = (r1.min(r2), r1.max(r2));
        prop_assert!((d.gamma1 - lo).abs() <= 1e-12 * lo.abs().max(1.0), "{} vs {}", d.gamma1, lo);
        prop_assert!((d.gamma2 - hi).abs() <= 1e-12 * hi.abs().max(1.0), "{} vs {}", d.gamma2, hi);
    }

    #[test]
    fn branches_are_strictly_monotone((n, p, a) in admissible()) {
        let poly = IndicialPolynomial::new(n, p, a).unwrap();
        let gs = poly.gamma_star();
        let grid: Vec<f64> = (1..=600).map(|k| 0.01 * k as f64).collect();
        for w in grid.windows(2) {
            prop_assert!(poly.eval(gs - w[1]) < poly.eval(gs - w[0]));
            prop_assert!(poly.eval(gs + w[1]) < poly.eval(gs + w[0]));
        }
    }
}

#[test]
fn double_root_at_the_hardy_constant() {
    let poly = IndicialPolynomial::new(5, 2.5, 0.1).unwrap();
    let d = poly.roots(poly.mu_bar()).unwrap();
    assert!(d.double_root);
    assert_eq!(d.gamma1, d.gamma2);
    assert!((d.gamma1 - poly.gamma_star()).abs() < 1e-14);
}

#[test]
fn above_the_hardy_constant_is_rejected() {
    let poly = IndicialPolynomial::new(3, 2.0, 0.0).unwrap();
    assert!(poly.roots(poly.mu_bar() + 1e-3).is_err());
}
