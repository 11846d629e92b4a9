use plap_core::blowup::Direction;
use plap_core::eigen_rate_alpha;
use plap_core::grid::{gradient_log_sup, kappa_bound_check, solve_dirichlet, Field2D, Rect};

use super::{CheckError, Checked, StepOutput};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, CheckRow};

fn exact(alpha: f64, xi: [f64; 2]) -> impl Fn(f64, f64) -> f64 {
    move |x, y| (alpha * (xi[0] * x + xi[1] * y)).exp()
}

/// Solves on each level; sup errors, observed orders, the gradient bound
/// and `f/κ` on the finest grid.
pub(super) fn solves(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    const NAME: &str = "c2.sup_error_finest";
    let g = &cfg.grid;
    let alpha = eigen_rate_alpha(g.lambda, g.p).check(NAME)?;
    let xi = Direction::new(g.xi.to_vec()).check(NAME)?;
    let target = exact(alpha, g.xi);

    let mut table: Vec<Vec<f64>> = Vec::new();
    let mut errs = Vec::new();
    let mut violations = 0usize;
    let mut finest = None;
    for &level in &g.levels {
        let h = 1.0 / level as f64;
        let (v, stats) = solve_dirichlet(g.p, g.lambda, &xi, &Rect::unit_square(), h, g.tol).check(NAME)?;
        let err = v.sup_distance(&target);
        let grad = gradient_log_sup(&v).check("c3.gradient_bound")?;
        let bound = alpha + 5.0 * err / h;
        violations += usize::from(!(grad <= bound));
        let kc = kappa_bound_check(&v, g.p, g.lambda).check("c4.kappa_solve")?;
        let order = errs.last().map_or(f64::NAN, |&prev: &f64| (prev / err).log2());
        table.push(vec![
            h,
            err,
            order,
            grad,
            bound,
            kc.ratio(),
            stats.newton_iters as f64,
            stats.final_residual,
        ]);
        errs.push(err);
        finest = Some((v, kc.ratio()));
    }
    let (field, kappa_ratio) = finest.expect("levels validated nonempty");
    let min_order = table.iter().skip(1).map(|row| row[2]).fold(f64::INFINITY, f64::min);

    let mut csv = Vec::new();
    field.write_csv(&mut csv).expect("writing to memory");
    let mut bin = Vec::new();
    field.write_binary(&mut bin).expect("writing to memory");
    let finest_level = g.levels.last().copied().unwrap_or(0);
    Ok(StepOutput {
        rows: vec![
            CheckRow::new(NAME, 0.0, *errs.last().expect("levels nonempty"), 5e-4),
            CheckRow::new("c2.observed_order", 2.0, min_order, 0.2),
            CheckRow::count("c3.gradient_bound", violations),
            CheckRow::new("c4.kappa_solve", 1.0, kappa_ratio, 1e-2),
        ],
        artifacts: vec![
            Artifact::csv(
                "grid_convergence.csv",
                &[format!("p={} lambda={} xi={:?} tol={:e}", g.p, g.lambda, g.xi, g.tol)],
                "h,sup_error,order,gradient_log_sup,gradient_bound,kappa_ratio,newton_iters,final_residual",
                &table,
            ),
            Artifact::new(format!("field_h{finest_level}.csv"), csv),
            Artifact::new(format!("field_h{finest_level}.plf2"), bin),
        ],
    })
}

/// The exponential itself: `|∇ ln v| = α` in closed form on nodes, to
/// `O(h²)` through stencils, and `f/κ = 1`.
pub(super) fn equality(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    const NAME: &str = "c3.equality_analytic";
    let g = &cfg.grid;
    let alpha = eigen_rate_alpha(g.lambda, g.p).check(NAME)?;
    let rect = Rect::unit_square();

    let mut analytic = 0.0f64;
    let mut stencil_c = 0.0f64;
    let mut table = Vec::new();
    let mut kappa_ratio = f64::NAN;
    for &level in &g.levels {
        let h = 1.0 / level as f64;
        let v = Field2D::sample(&rect, h, exact(alpha, g.xi)).check(NAME)?;
        // closed-form ∇v over the sampled v
        let f = exact(alpha, g.xi);
        for j in 0..v.ny {
            for i in 0..v.nx {
                let dv = alpha * f(v.x(i), v.y(j));
                let (gx, gy) = (g.xi[0] * dv / v.at(i, j), g.xi[1] * dv / v.at(i, j));
                analytic = analytic.max((gx.hypot(gy) - alpha).abs());
            }
        }
        let s = gradient_log_sup(&v).check("c3.equality_stencil")?;
        stencil_c = stencil_c.max((s - alpha).abs() / (h * h));
        kappa_ratio = kappa_bound_check(&v, g.p, g.lambda).check("c4.kappa_exact")?.ratio();
        table.push(vec![h, s, (s - alpha).abs(), kappa_ratio]);
    }
    Ok(StepOutput {
        rows: vec![
            CheckRow::new(NAME, 0.0, analytic, 1e-10),
            CheckRow::new("c3.equality_stencil", 0.0, stencil_c, 1.0),
            CheckRow::new("c4.kappa_exact", 1.0, kappa_ratio, 1e-12),
        ],
        artifacts: vec![Artifact::csv(
            "grid_equality.csv",
            &[format!("alpha={alpha}")],
            "h,gradient_log_sup,gap,kappa_ratio",
            &table,
        )],
    })
}
