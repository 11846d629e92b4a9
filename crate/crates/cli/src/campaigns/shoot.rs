use plap_core::radial::{
    fit_decay_exponents, fit_decay_exponents_window, radial_exterior_eigen, riccati_ratio_flow, DecayFit,
    RadialProfile,
};
use plap_core::eigen_rate_alpha;

use super::{CheckError, Checked, StepOutput};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, CheckRow};

fn profile_artifact(name: &str, profile: &RadialProfile) -> Artifact {
    let mut bytes = Vec::new();
    profile.write_csv(&mut bytes).expect("writing to memory");
    Artifact::new(name, bytes)
}

fn fit_row(label: f64, fit: &DecayFit) -> Vec<f64> {
    vec![label, fit.rate, fit.power, fit.log_c, fit.rms, fit.samples as f64]
}

const FIT_HEADER: &str = "window,rate,power,log_c,rms,samples";

fn exterior(
    cfg: &ExperimentConfig,
    n: usize,
    p: f64,
    lambda: f64,
    check: &str,
) -> Result<(RadialProfile, DecayFit), CheckError> {
    let s = &cfg.shoot;
    let res = radial_exterior_eigen(n, p, lambda, s.r0, s.r_max).check(check)?;
    let fit = fit_decay_exponents(&res.profile).check(check)?;
    Ok((res.profile, fit))
}

/// `u = C e^{-r}/r` in three dimensions.
pub(super) fn yukawa(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let (profile, fit) = exterior(cfg, 3, 2.0, 1.0, "c6.yukawa_rate")?;
    Ok(StepOutput {
        rows: vec![
            CheckRow::new("c6.yukawa_rate", 1.0, fit.rate, 1e-3),
            CheckRow::new("c6.yukawa_power", 1.0, fit.power, 5e-2),
        ],
        artifacts: vec![
            profile_artifact("exterior_n3_p2.csv", &profile),
            Artifact::csv("fit_n3_p2.csv", &["outer half".into()], FIT_HEADER, &[fit_row(1.0, &fit)]),
        ],
    })
}

/// Two dimensions, where the power is `1/2`.
pub(super) fn planar(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let (profile, fit) = exterior(cfg, 2, 2.0, 1.0, "c6.planar_power")?;
    Ok(StepOutput {
        rows: vec![CheckRow::new("c6.planar_power", 0.5, fit.power, 5e-2)],
        artifacts: vec![
            profile_artifact("exterior_n2_p2.csv", &profile),
            Artifact::csv("fit_n2_p2.csv", &["outer half".into()], FIT_HEADER, &[fit_row(1.0, &fit)]),
        ],
    })
}

/// `p = 3/2`, `λ = 1/2`, so `α = 1` and the power is `(n-1)/(p(p-1)) = 8/3`,
/// fitted over the outer half and over an inner window.
pub(super) fn nonlinear(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let (n, p, lambda) = (3usize, 1.5, 0.5);
    let alpha = eigen_rate_alpha(lambda, p).check("c7.rate_outer")?;
    let power = (n as f64 - 1.0) / (p * (p - 1.0));
    let (profile, outer) = exterior(cfg, n, p, lambda, "c7.rate_outer")?;
    let [lo, hi] = cfg.shoot.inner_window;
    let inner = fit_decay_exponents_window(&profile, lo, hi).check("c7.rate_inner")?;
    Ok(StepOutput {
        rows: vec![
            CheckRow::new("c7.rate_outer", alpha, outer.rate, 5e-3),
            CheckRow::new("c7.power_outer", power, outer.power, 0.1),
            CheckRow::new("c7.rate_inner", alpha, inner.rate, 5e-3),
            CheckRow::new("c7.power_inner", power, inner.power, 0.1),
        ],
        artifacts: vec![
            profile_artifact("exterior_n3_p1.5.csv", &profile),
            Artifact::csv(
                "fit_n3_p1.5.csv",
                &[format!("window 1 = outer half, window 2 = [{lo}, {hi}]")],
                FIT_HEADER,
                &[fit_row(1.0, &outer), fit_row(2.0, &inner)],
            ),
        ],
    })
}

/// `s' = λ - s²` for `p = 2`: `α tanh(αt + atanh(s₀/α))` below `α`,
/// `α coth(αt + acoth(s₀/α))` above.
fn ratio_closed_form(alpha: f64, s0: f64, t: f64) -> f64 {
    let z = s0 / alpha;
    if z < 1.0 {
        alpha * (alpha * t + z.atanh()).tanh()
    } else {
        let shift = 0.5 * ((z + 1.0) / (z - 1.0)).ln();
        alpha / (alpha * t + shift).tanh()
    }
}

pub(super) fn riccati(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let t_end = cfg.shoot.riccati_t;
    let (mut gap, mut oracle) = (0.0f64, 0.0f64);
    let mut table = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        for lambda in [0.5, 1.0, 2.0] {
            let alpha = eigen_rate_alpha(lambda, p).check("c8.ratio_gap")?;
            for s0 in [0.25 * alpha, 4.0 * alpha] {
                let traj = riccati_ratio_flow(lambda, p, s0, (0.0, t_end), 501).check("c8.ratio_gap")?;
                let g = (traj.last() - alpha).abs();
                gap = gap.max(g);
                let mut o = f64::NAN;
                if p == 2.0 {
                    o = traj
                        .t
                        .iter()
                        .zip(&traj.s)
                        .map(|(&t, &s)| (s - ratio_closed_form(alpha, s0, t)).abs())
                        .fold(0.0, f64::max);
                    oracle = oracle.max(o);
                }
                table.push(vec![p, lambda, s0, traj.last(), g, o]);
            }
        }
    }
    Ok(StepOutput {
        rows: vec![
            CheckRow::new("c8.ratio_gap", 0.0, gap, 1e-6),
            CheckRow::new("c8.tanh_coth_oracle", 0.0, oracle, 1e-8),
        ],
        artifacts: vec![Artifact::csv(
            "riccati.csv",
            &[format!("T={t_end}; oracle column is NaN where no closed form exists")],
            "p,lambda,s0,s_T,gap,oracle_error",
            &table,
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_is_continuous_and_settles() {
        assert!((ratio_closed_form(1.0, 0.25, 0.0) - 0.25).abs() < 1e-15);
        assert!((ratio_closed_form(1.0, 4.0, 0.0) - 4.0).abs() < 1e-14);
        assert!((ratio_closed_form(2.0, 0.5, 30.0) - 2.0).abs() < 1e-15);
        assert!((ratio_closed_form(2.0, 8.0, 30.0) - 2.0).abs() < 1e-15);
    }
}
