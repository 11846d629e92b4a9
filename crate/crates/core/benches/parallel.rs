use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use plap_core::blowup::{translate_rescale_at_infinity_with, Direction, RescaleOptions};
use plap_core::grid::{p_laplace_residual_with, solve_dirichlet_exponential, Field2D, Rect, SolveOptions};
use plap_core::indicial::indicial_roots_batch;
use plap_core::radial::{log_grid, RadialProfile};
use plap_core::{hardy_best_constant, Exec, ProblemParams};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn root_sweep() -> Vec<ProblemParams> {
    let mut out = Vec::new();
    for n in 2..=8usize {
        for k in 1..=24 {
            let p = 1.0 + (n as f64 - 1.0) * k as f64 / 25.0;
            for a in [-1.0, -0.25, 0.5, 1.5] {
                let mu_bar = hardy_best_constant(n, p, a).unwrap();
                for m in 0..16 {
                    let mu = mu_bar - 0.5 * m as f64;
                    out.push(ProblemParams::new(n, p).unwrap().with_a(a).with_mu(mu));
                }
            }
        }
    }
    out
}

fn bench_roots(c: &mut Criterion) {
    let params = root_sweep();
    let mut group = c.benchmark_group("indicial_roots_batch");
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new(name, params.len()), &params, |b, ps| {
            b.iter(|| black_box(indicial_roots_batch(exec, ps)))
        });
    }
    group.finish();
}

fn bench_residual(c: &mut Criterion) {
    let field = Field2D::sample(&Rect::unit_square(), 1.0 / 256.0, |x, y| (0.6 * x + 0.8 * y).exp()).unwrap();
    let mut group = c.benchmark_group("p_laplace_residual");
    for (name, exec) in POLICIES {
        group.bench_function(name, |b| b.iter(|| black_box(p_laplace_residual_with(exec, &field, 3.0, 2.0, 1e-8))));
    }
    group.finish();
}

fn bench_solve(c: &mut Criterion) {
    let xi = Direction::new(vec![0.6, 0.8]).unwrap();
    let mut group = c.benchmark_group("solve_dirichlet_h64");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let opts = SolveOptions {
            exec,
            ..SolveOptions::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| black_box(solve_dirichlet_exponential(3.0, 2.0, &xi, &Rect::unit_square(), 1.0 / 64.0, &opts)))
        });
    }
    group.finish();
}

fn bench_rescale(c: &mut Criterion) {
    let profile =
        RadialProfile::from_fn(log_grid(1.0, 400.0, 8000), |r| -r - r.ln(), |r| -1.0 - 1.0 / r, "yukawa").unwrap();
    let shifts: Vec<f64> = (0..256).map(|k| 10.0 + 1.5 * k as f64).collect();
    let mut group = c.benchmark_group("translate_rescale");
    for (name, exec) in POLICIES {
        let opts = RescaleOptions {
            exec,
            ..RescaleOptions::infinity()
        };
        group.bench_function(name, |b| {
            b.iter(|| black_box(translate_rescale_at_infinity_with(&profile, &shifts, 1.0, &opts)))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_roots, bench_residual, bench_solve, bench_rescale);
criterion_main!(benches);
