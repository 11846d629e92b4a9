use plap_core::grid::{bochner_residual, Field2D, Rect};

use super::{CheckError, Checked, StepOutput};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, CheckRow};

/// `v = e^x + e^y` solves the `p = 2`, `λ = 1` problem; its Bochner
/// residual should shrink by at least 1.5 per halving of `h`.
pub(super) fn refinement(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    const NAME: &str = "c5.slow_halvings";
    let mut table: Vec<Vec<f64>> = Vec::new();
    for &level in &cfg.bochner.levels {
        let h = 1.0 / level as f64;
        let v = Field2D::sample(&Rect::unit_square(), h, |x, y| x.exp() + y.exp()).check(NAME)?;
        let r = bochner_residual(&v, 2.0, 1.0, None).check(NAME)?;
        let ratio = table.last().map_or(f64::NAN, |prev| prev[1] / r);
        table.push(vec![h, r, ratio]);
    }
    let slow = table.iter().skip(1).filter(|row| !(row[2] >= 1.5)).count();
    Ok(StepOutput {
        rows: vec![CheckRow::count(NAME, slow)],
        artifacts: vec![Artifact::csv(
            "bochner.csv",
            &["v = e^x + e^y, p = 2, lambda = 1".into()],
            "h,residual,ratio",
            &table,
        )],
    })
}
