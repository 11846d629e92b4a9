use plap_core::blowup::Direction;
use plap_core::eigen_rate_alpha;
use plap_core::grid::{
    directional_range, ellipticity_check, gradient_log_sup, solve_dirichlet, solve_dirichlet_with, Field2D, Rect,
    SolveOptions,
};
use proptest::prelude::*;

const H: f64 = 1.0 / 16.0;

fn direction() -> impl Strategy<Value = Direction> {
    (0.0..std::f64::consts::TAU).prop_map(|th| Direction::normalized(&[th.cos(), th.sin()]).unwrap())
}

fn tight() -> SolveOptions {
    SolveOptions {
        tol: 1e-11,
        ..SolveOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn linearized_operator_is_uniformly_elliptic(
        p in 1.05..6.0f64,
        gv in prop::collection::vec(-10.0..10.0f64, 2..4),
        gg in prop::collection::vec(-10.0..10.0f64, 4),
    ) {
        let gg = &gg[..gv.len()];
        prop_assume!(gv.iter().any(|c| c.abs() > 1e-6) && gg.iter().any(|c| c.abs() > 1e-6));
        let e = ellipticity_check(&gv, gg, p);
        prop_assert!(e >= 1f64.min(p - 1.0) - 1e-14);
        prop_assert!(e <= 1f64.max(p - 1.0) + 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_stays_inside_the_barrier(p in 1.5..4.0f64, lambda in 0.5..3.0f64, xi in direction()) {
        let alpha = eigen_rate_alpha(lambda, p).unwrap();
        let (v, _) = solve_dirichlet(p, lambda, &xi, &Rect::unit_square(), H, 1e-10).unwrap();
        let boundary: Vec<f64> = (0..v.ny)
            .flat_map(|j| (0..v.nx).map(move |i| (i, j)))
            .filter(|&(i, j)| v.is_boundary(i, j))
            .map(|(i, j)| v.at(i, j))
            .collect();
        let lo = boundary.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = boundary.iter().copied().fold(0.0, f64::max);
        let spread = (alpha * 2f64.sqrt()).exp();
        prop_assert!(v.values.iter().all(|&x| x >= lo / spread && x <= hi * spread));
    }

    #[test]
    fn amplitude_factors_out(p in 1.5..4.0f64, lambda in 0.5..3.0f64, xi in direction(), c in 0.01..100.0f64) {
        let alpha = eigen_rate_alpha(lambda, p).unwrap();
        let (a, b) = (alpha * xi.as_slice()[0], alpha * xi.as_slice()[1]);
        let rect = Rect::unit_square();
        let opts = tight();
        // the residual is (p-1)-homogeneous, so the tolerance scales with it
        let scaled = SolveOptions {
            tol: opts.tol * c.powf(p - 1.0),
            ..opts
        };
        let (v1, _) = solve_dirichlet_with(p, lambda, &rect, H, |x, y| (a * x + b * y).exp(), &opts).unwrap();
        let (vc, _) = solve_dirichlet_with(p, lambda, &rect, H, |x, y| c * (a * x + b * y).exp(), &scaled).unwrap();
        for (u, w) in v1.values.iter().zip(&vc.values) {
            prop_assert!((c * u - w).abs() <= 1e-9 * w, "{} vs {}", c * u, w);
        }
    }

    #[test]
    fn quarter_turn_commutes_with_the_solve(p in 1.5..4.0f64, lambda in 0.5..3.0f64, xi in direction()) {
        let alpha = eigen_rate_alpha(lambda, p).unwrap();
        let (a, b) = (alpha * xi.as_slice()[0], alpha * xi.as_slice()[1]);
        let g = move |x: f64, y: f64| (a * x + b * y).exp();
        // rotation about the square's centre: (x, y) ↦ (1 - y, x)
        let g_rot = move |x: f64, y: f64| g(y, 1.0 - x);
        let rect = Rect::unit_square();
        let opts = tight();
        let (v, _) = solve_dirichlet_with(p, lambda, &rect, H, g, &opts).unwrap();
        let (w, _) = solve_dirichlet_with(p, lambda, &rect, H, g_rot, &opts).unwrap();
        let m = v.nx - 1;
        for j in 0..v.ny {
            for i in 0..v.nx {
                let (x, y) = (w.at(i, j), v.at(j, m - i));
                prop_assert!((x - y).abs() <= 1e-10 * y, "({i},{j}) {x} vs {y}");
            }
        }
    }

    #[test]
    fn gradient_bound_on_solutions(p in 1.5..4.0f64, lambda in 0.5..3.0f64, xi in direction()) {
        let alpha = eigen_rate_alpha(lambda, p).unwrap();
        let (v, _) = solve_dirichlet(p, lambda, &xi, &Rect::unit_square(), H, 1e-10).unwrap();
        let (a, b) = (alpha * xi.as_slice()[0], alpha * xi.as_slice()[1]);
        let err = v.sup_distance(|x, y| (a * x + b * y).exp());
        let tol = 5.0 * err / H + alpha * H * H;
        prop_assert!(gradient_log_sup(&v).unwrap() <= alpha + tol);

        let nu = Direction::axis(2, 1);
        let target = alpha * xi.as_slice()[1];
        let (lo, hi) = directional_range(&v, &nu).unwrap();
        prop_assert!((lo - target).abs() <= tol && (hi - target).abs() <= tol, "{lo} {hi} {target} {tol}");
    }
}

#[test]
fn refinement_sharpens_the_gradient_bound() {
    let xi = Direction::new(vec![0.6, 0.8]).unwrap();
    let alpha = eigen_rate_alpha(2.0, 3.0).unwrap();
    let excess: Vec<f64> = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0]
        .iter()
        .map(|&h| {
            let (v, _) = solve_dirichlet(3.0, 2.0, &xi, &Rect::unit_square(), h, 1e-10).unwrap();
            (gradient_log_sup(&v).unwrap() - alpha).abs()
        })
        .collect();
    assert!(excess[2] < excess[0], "{excess:?}");
}

#[test]
fn binary_round_trip() {
    let f = Field2D::sample(&Rect::new(-1.0, 0.5, 1.0, 2.0).unwrap(), 0.25, |x, y| x * x + y).unwrap();
    let mut buf = Vec::new();
    f.write_binary(&mut buf).unwrap();
    assert_eq!(&buf[..4], b"PLF2");
    assert_eq!(Field2D::read_binary(&buf[..]).unwrap(), f);
}
