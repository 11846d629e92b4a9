use plap_core::indicial::{IndicialData, IndicialPolynomial, Placement};
use plap_core::radial::{hardy_power_residual, log_grid};
use plap_core::{auxiliary_f, ProblemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CheckError, Checked, StepOutput};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, CheckRow};

/// Separate streams so that changing one sweep's size leaves the other intact.
const INDICIAL_STREAM: u64 = 1;
const QUADRATIC_STREAM: u64 = 2;
const HARDY_STREAM: u64 = 3;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy)]
struct Instance {
    n: usize,
    p: f64,
    a: f64,
    mu: f64,
}

/// Uniform `n`, `p ∈ (1, n)`, `a` with a tenth of draws on the critical
/// weight, and `μ ∈ [-10, μ̄]` with a twentieth of draws exactly at `μ̄`.
fn draw(rng: &mut ChaCha8Rng, max_n: usize, fixed_p: Option<f64>) -> Instance {
    let n = rng.gen_range(if fixed_p.is_some() { 3 } else { 2 }..=max_n);
    let nf = n as f64;
    let p = fixed_p.unwrap_or_else(|| 1.0 + (nf - 1.0) * rng.gen_range(0.005..0.995));
    let a = if rng.gen_bool(0.1) {
        (nf - p) / p
    } else {
        rng.gen_range(-2.0..3.0)
    };
    let mu_bar = ((nf - (a + 1.0) * p) / p).abs().powf(p);
    let mu = if rng.gen_bool(0.05) {
        mu_bar
    } else {
        -10.0 + (mu_bar + 10.0) * rng.gen::<f64>()
    };
    Instance { n, p, a, mu }
}

/// The placement case and its inequality chain, read off the case table.
fn table_case(inst: &Instance, d: &IndicialData) -> (Placement, bool) {
    let Instance { n, p, a, mu } = *inst;
    let nf = n as f64;
    let z = (nf - (a + 1.0) * p) / (p - 1.0);
    let gs = (nf - (a + 1.0) * p) / p;
    let (g1, g2) = (d.gamma1, d.gamma2);
    let tol = 1e-10 * (1.0 + z.abs());
    let le = |x: f64, y: f64| x <= y + tol;
    let diff = a - (nf - p) / p;
    if diff.abs() <= 1e-14 {
        (Placement::CriticalWeight, le(g1, 0.0) && le(0.0, g2))
    } else if diff < 0.0 && mu >= 0.0 {
        let ok = le(0.0, g1) && le(g1, gs) && le(gs, g2) && le(g2, z);
        (Placement::SubcriticalNonnegative, ok)
    } else if diff < 0.0 {
        (Placement::SubcriticalNegative, g1 < 0.0 && 0.0 < z && le(z, g2))
    } else if mu >= 0.0 {
        let ok = le(z, g1) && le(g1, gs) && le(gs, g2) && le(g2, 0.0);
        (Placement::SupercriticalNonnegative, ok)
    } else {
        (Placement::SupercriticalNegative, le(g1, z) && z < 0.0 && 0.0 < g2)
    }
}

fn solve(inst: &Instance) -> Result<IndicialData, plap_core::IndicialError> {
    IndicialPolynomial::new(inst.n, inst.p, inst.a)?.roots(inst.mu)
}

fn scaled_residual(inst: &Instance, gamma: f64) -> f64 {
    (auxiliary_f(gamma, inst.n, inst.p, inst.a) - inst.mu).abs() / inst.mu.abs().max(1.0)
}

/// Roots of `γ² - Dγ + μ = 0`, computed without cancellation.
fn quadratic_roots(drift: f64, mu: f64) -> (f64, f64) {
    let disc = (drift * drift - 4.0 * mu).max(0.0).sqrt();
    let big = 0.5 * (drift + drift.signum() * disc);
    if big == 0.0 {
        return (0.0, 0.0);
    }
    let small = mu / big;
    (big.min(small), big.max(small))
}

pub(super) fn indicial_sweep(cfg: &ExperimentConfig, seed: u64) -> Result<StepOutput, CheckError> {
    let name = "c1.root_residual";
    let mut r = rng(seed, INDICIAL_STREAM);
    let (mut worst, mut mismatches) = (0.0f64, 0usize);
    let mut table = Vec::with_capacity(cfg.roots.samples);
    for _ in 0..cfg.roots.samples {
        let inst = draw(&mut r, cfg.roots.max_n, None);
        let d = solve(&inst).check(name)?;
        let (r1, r2) = (scaled_residual(&inst, d.gamma1), scaled_residual(&inst, d.gamma2));
        worst = worst.max(r1).max(r2);
        let (case, ordered) = table_case(&inst, &d);
        let ok = case == d.placement && ordered;
        mismatches += usize::from(!ok);
        table.push(vec![
            inst.n as f64,
            inst.p,
            inst.a,
            inst.mu,
            d.gamma1,
            d.gamma2,
            r1.max(r2),
            f64::from(u8::from(ok)),
        ]);
    }

    let mut q = rng(seed, QUADRATIC_STREAM);
    let mut oracle_err = 0.0f64;
    for _ in 0..cfg.roots.samples {
        let inst = draw(&mut q, cfg.roots.max_n.max(3), Some(2.0));
        let d = solve(&inst).check("c1.quadratic_oracle")?;
        let (lo, hi) = quadratic_roots(inst.n as f64 - 2.0 * (inst.a + 1.0), inst.mu);
        oracle_err = oracle_err
            .max((d.gamma1 - lo).abs() / lo.abs().max(1.0))
            .max((d.gamma2 - hi).abs() / hi.abs().max(1.0));
    }

    let comments = [format!("seed={seed} samples={}", cfg.roots.samples)];
    Ok(StepOutput {
        rows: vec![
            CheckRow::new(name, 0.0, worst, 1e-12),
            CheckRow::count("c1.placement_mismatches", mismatches),
            CheckRow::new("c1.quadratic_oracle", 0.0, oracle_err, 1e-12),
        ],
        artifacts: vec![Artifact::csv(
            "indicial_sweep.csv",
            &comments,
            "n,p,a,mu,gamma1,gamma2,scaled_residual,placement_ok",
            &table,
        )],
    })
}

/// Rounding floor of the power-solution residual at a computed root: the
/// half-ulp errors in `γ` and in `D` are amplified by `|γ f'(γ)|` and
/// `|γ|^{p-1}|D|`, and the exponent cancellation by `|μ| ln r` times the
/// size of the exponent's terms.
fn residual_floor(inst: &Instance, gamma: f64, ln_r: f64) -> f64 {
    let Instance { n, p, a, mu } = *inst;
    let d = n as f64 - (a + 1.0) * p;
    let power = gamma.abs().powf(p - 1.0);
    let sensitivity = power * ((p - 1.0) * (d - p * gamma).abs() + d.abs());
    let exponent_terms = n as f64 + (a + 1.0).abs() * p + (p - 1.0) * gamma.abs();
    f64::EPSILON * (mu.abs() * (1.0 + exponent_terms * ln_r) + sensitivity + 1.0)
}

pub(super) fn hardy_sweep(cfg: &ExperimentConfig, seed: u64) -> Result<StepOutput, CheckError> {
    let mut r = rng(seed, HARDY_STREAM);
    let radii = log_grid(1e-2, 1e2, 41);
    let ln_r = 1e2f64.ln();
    let (mut worst, mut weak) = (0.0f64, 0usize);
    let mut table = Vec::with_capacity(cfg.roots.hardy_samples);
    for _ in 0..cfg.roots.hardy_samples {
        let inst = draw(&mut r, cfg.roots.max_n, None);
        let d = solve(&inst).check("c9.power_residual")?;
        for gamma in [d.gamma1, d.gamma2] {
            let res = hardy_power_residual(inst.n, inst.p, inst.a, inst.mu, gamma, &radii);
            let off = hardy_power_residual(inst.n, inst.p, inst.a, inst.mu, gamma + 0.1, &radii);
            worst = worst.max(res);
            weak += usize::from(!(off >= 1e-3));
            let floor = residual_floor(&inst, gamma, ln_r);
            table.push(vec![inst.n as f64, inst.p, inst.a, inst.mu, gamma, res, floor, off]);
        }
    }
    let comments = [format!("seed={seed} samples={}", cfg.roots.hardy_samples)];
    Ok(StepOutput {
        rows: vec![
            CheckRow::new("c9.power_residual", 0.0, worst, 1e-12),
            CheckRow::count("c9.perturbed_below_1e-3", weak),
        ],
        artifacts: vec![Artifact::csv(
            "hardy_sweep.csv",
            &comments,
            "n,p,a,mu,gamma,residual,rounding_floor,perturbed_residual",
            &table,
        )],
    })
}

/// Rows for the configured `params` block, if any; closed-form targets are
/// used where they exist (`p = 2`, or `μ = 0` where the roots are `0` and `z`).
pub(super) fn instance(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let Some(block) = cfg.params else {
        return Ok(StepOutput::default());
    };
    let params: ProblemParams = block.to_params().check("roots.params")?;
    let d = plap_core::indicial_roots(&params).check("roots.params")?;
    let inst = Instance {
        n: params.n,
        p: params.p,
        a: params.a,
        mu: params.mu,
    };
    let drift = inst.n as f64 - (inst.a + 1.0) * inst.p;
    let exact = if inst.p == 2.0 {
        Some(quadratic_roots(drift, inst.mu))
    } else if inst.mu == 0.0 {
        let z = drift / (inst.p - 1.0);
        Some((z.min(0.0), z.max(0.0)))
    } else {
        None
    };
    let mut rows = vec![CheckRow::new(
        "roots.residual",
        0.0,
        scaled_residual(&inst, d.gamma1).max(scaled_residual(&inst, d.gamma2)),
        1e-12,
    )];
    if let Some((lo, hi)) = exact {
        rows.push(CheckRow::new("roots.gamma1", lo, d.gamma1, 1e-12 * lo.abs().max(1.0)));
        rows.push(CheckRow::new("roots.gamma2", hi, d.gamma2, 1e-12 * hi.abs().max(1.0)));
    }
    let table = vec![vec![inst.n as f64, inst.p, inst.a, inst.mu, d.gamma_star, d.mu_bar, d.gamma1, d.gamma2]];
    Ok(StepOutput {
        rows,
        artifacts: vec![Artifact::csv(
            "roots_instance.csv",
            &[format!("placement={:?}", d.placement)],
            "n,p,a,mu,gamma_star,mu_bar,gamma1,gamma2",
            &table,
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_stable() {
        let (lo, hi) = quadratic_roots(1e8, 1.0);
        assert!((lo - 1e-8).abs() < 1e-22);
        assert!((hi - 1e8).abs() < 1e-6);
        assert_eq!(quadratic_roots(0.0, 0.0), (0.0, 0.0));
        assert_eq!(quadratic_roots(-2.0, 0.0), (-2.0, 0.0));
    }

    #[test]
    fn draws_are_admissible() {
        let mut r = rng(7, INDICIAL_STREAM);
        for _ in 0..1000 {
            let i = draw(&mut r, 10, None);
            assert!(i.p > 1.0 && i.p < i.n as f64);
            let mu_bar = ((i.n as f64 - (i.a + 1.0) * i.p) / i.p).abs().powf(i.p);
            assert!(i.mu <= mu_bar);
        }
    }
}
