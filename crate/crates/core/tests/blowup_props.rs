use plap_core::blowup::{
    busemann, busemann_error_bound, busemann_limit, martin_kernel_estimate, rescale_near_zero,
    translate_rescale_at_infinity, Direction,
};
use plap_core::radial::{log_grid, RadialProfile};
use proptest::prelude::*;

fn yukawa(log_c: f64) -> RadialProfile {
    RadialProfile::from_fn(log_grid(1e-3, 2e3, 4000), |r| log_c - r - r.ln(), |r| -1.0 - 1.0 / r, "yukawa").unwrap()
}

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..std::f64::consts::TAU).prop_map(|th| Direction::normalized(&[th.cos(), th.sin()]).unwrap())
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn busemann_rises_to_its_bound(x in point(), xi in direction(), t0 in 20.0..200.0f64) {
        let limit = busemann_limit(&x, &xi);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..20 {
            let t = t0 * 1.5f64.powi(k);
            let b = busemann(&x, &xi, t);
            prop_assert!(b >= prev - 1e-13 * limit.abs().max(1.0));
            prop_assert!(b <= limit + busemann_error_bound(&x, t) + 1e-13);
            prop_assert!(limit - b <= busemann_error_bound(&x, t) + 1e-13);
            prev = b;
        }
    }

    #[test]
    fn martin_estimate_ignores_amplitude(x in point(), xi in direction(), log_c in -20.0..20.0f64, t in 50.0..1000.0f64) {
        let base = martin_kernel_estimate(&yukawa(0.0), &x, &xi, t).unwrap();
        let scaled = martin_kernel_estimate(&yukawa(log_c), &x, &xi, t).unwrap();
        prop_assert!((base - scaled).abs() <= 1e-12 * base);
    }

    #[test]
    fn origin_rescaling_ignores_amplitude(log_c in -20.0..20.0f64) {
        let scales = [0.1, 0.3, 1.0];
        let base = rescale_near_zero(&yukawa(0.0), &scales, 1.0).unwrap();
        let scaled = rescale_near_zero(&yukawa(log_c), &scales, 1.0).unwrap();
        for (a, b) in base.sup_distance.iter().zip(&scaled.sup_distance) {
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{a} {b}");
        }
        // slopes come from differences of ln u, whose rounding grows with |ln C|
        for (a, b) in base.grad_distance.iter().zip(&scaled.grad_distance) {
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{a} {b}");
        }
    }

    #[test]
    fn exact_profiles_are_fixed_points(gamma in -3.0..3.0f64, alpha in 0.2..3.0f64) {
        let power = RadialProfile::from_fn(log_grid(1e-4, 1e2, 300), |r| -gamma * r.ln(), |r| -gamma / r, "power").unwrap();
        let rep = rescale_near_zero(&power, &[1e-2, 1e-1, 1.0], gamma).unwrap();
        // the target and its gradient reach 10^{|γ|} and |γ|·10^{|γ|+1} at the window's edge
        let sup_scale = 10f64.powf(gamma.abs());
        let grad_scale = (gamma.abs() * 10f64.powf(gamma.abs() + 1.0)).max(1.0);
        prop_assert!(rep.sup_distance.iter().all(|&d| d <= 1e-12 * sup_scale), "{:?}", rep);
        prop_assert!(rep.grad_distance.iter().all(|&d| d <= 1e-12 * grad_scale), "{:?}", rep);

        let expo = RadialProfile::from_fn(log_grid(1.0, 200.0, 20000), |r| -alpha * r, |_| -alpha, "exp").unwrap();
        let shifts = [10.0, 50.0, 150.0];
        let rep = translate_rescale_at_infinity(&expo, &shifts, alpha).unwrap();
        for (&t, &d) in shifts.iter().zip(&rep.sup_distance) {
            // ln u ≈ -α(t+2) carries relative rounding, and e^{2α} magnifies it
            let floor = 8.0 * f64::EPSILON * alpha * (t + 2.0) * (2.0 * alpha).exp();
            prop_assert!(d <= floor.max(1e-12), "t = {t}: {d} > {floor}");
        }
    }
}

#[test]
fn translation_distances_shrink_along_the_yukawa_tail() {
    let shifts = [10.0, 20.0, 40.0, 80.0, 160.0];
    let rep = translate_rescale_at_infinity(&yukawa(1.0), &shifts, 1.0).unwrap();
    assert!(rep.is_decreasing(), "{:?}", rep.sup_distance);
}

#[test]
fn martin_kernel_tends_to_the_exponential() {
    let xi = Direction::axis(2, 0);
    let k = martin_kernel_estimate(&yukawa(1.0), xi.as_slice(), &xi, 1e3).unwrap();
    assert!((k - std::f64::consts::E).abs() <= 5e-3, "{k}");
}
