use plap_core::blowup::{
    rescale_near_zero_with, translate_rescale_at_infinity_with, RescaleOptions, RescaleReport,
};
use plap_core::radial::{log_grid, RadialProfile};

use super::{CheckError, Checked, StepOutput};
use crate::config::{BlowupBlock, ExperimentConfig};
use crate::report::{Artifact, CheckRow};

fn report_artifact(name: &str, rep: &RescaleReport) -> Artifact {
    let mut bytes = Vec::new();
    rep.write_csv(&mut bytes).expect("writing to memory");
    Artifact::new(name, bytes)
}

/// Acceptance is on the sup-norm; the derivative distances go to the CSV only.
fn worst(rep: &RescaleReport) -> f64 {
    rep.sup_distance.iter().fold(0.0, |m, &d| m.max(d))
}

fn origin_opts(b: &BlowupBlock) -> RescaleOptions {
    RescaleOptions {
        window: b.origin_window,
        ..RescaleOptions::origin()
    }
}

fn infinity_opts(b: &BlowupBlock) -> RescaleOptions {
    RescaleOptions {
        window: b.infinity_window,
        ..RescaleOptions::infinity()
    }
}

fn reach(b: &BlowupBlock) -> f64 {
    b.shifts.iter().copied().fold(0.0, f64::max) + b.infinity_window + 1.0
}

/// Exact `r^{-γ}` and `e^{-αr}` are fixed by their rescalings.
pub(super) fn fixed_points(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let b = &cfg.blowup;
    let (gamma, alpha) = (b.gamma, b.alpha);
    let smallest = b.scales.iter().copied().fold(1.0, f64::min);
    let power = RadialProfile::from_fn(
        log_grid(0.1 * smallest / b.origin_window, 10.0 * b.origin_window, 600),
        |r| -gamma * r.ln(),
        |r| -gamma / r,
        format!("r^-{gamma}"),
    )
    .check("c10.power_fixed_point")?;
    let origin = rescale_near_zero_with(&power, &b.scales, gamma, &origin_opts(b)).check("c10.power_fixed_point")?;

    let expo = RadialProfile::from_fn(log_grid(1.0, reach(b), 20_000), |r| -alpha * r, |_| -alpha, format!("exp(-{alpha} r)"))
        .check("c10.exponential_fixed_point")?;
    let infinity =
        translate_rescale_at_infinity_with(&expo, &b.shifts, alpha, &infinity_opts(b)).check("c10.exponential_fixed_point")?;

    Ok(StepOutput {
        rows: vec![
            CheckRow::new("c10.power_fixed_point", 0.0, worst(&origin), 1e-12),
            CheckRow::new("c10.exponential_fixed_point", 0.0, worst(&infinity), 1e-12),
        ],
        artifacts: vec![
            report_artifact("blowup_power.csv", &origin),
            report_artifact("blowup_exponential.csv", &infinity),
        ],
    })
}

/// Translations of `e^{-r}/r` approach `e^{-s}`; the distance is
/// `e^{-s}|s|/(t+s)`, largest at the window's left end.
pub(super) fn yukawa_translation(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    let b = &cfg.blowup;
    let prof = RadialProfile::from_fn(log_grid(1.0, reach(b), 8000), |r| -r - r.ln(), |r| -1.0 - 1.0 / r, "exp(-r)/r")
        .check("c10.yukawa_monotone")?;
    let rep = translate_rescale_at_infinity_with(&prof, &b.shifts, 1.0, &infinity_opts(b)).check("c10.yukawa_monotone")?;
    let rises = rep.sup_distance.windows(2).filter(|w| !(w[1] < w[0])).count();
    let last = *rep.sup_distance.last().expect("shifts validated nonempty");
    Ok(StepOutput {
        rows: vec![
            CheckRow::count("c10.yukawa_monotone", rises),
            CheckRow::new("c10.yukawa_final_distance", 0.0, last, 1e-2),
        ],
        artifacts: vec![report_artifact("blowup_yukawa.csv", &rep)],
    })
}
