use plap_core::blowup::{martin_kernel_estimate, Direction};
use plap_core::eigen_rate_alpha;
use plap_core::radial::radial_exterior_eigen;

use super::{CheckError, Checked, StepOutput};
use crate::config::ExperimentConfig;
use crate::report::{Artifact, CheckRow};

/// `u(x - tξ)/u(tξ)` from a shot profile against its limit `e^{α⟨x,ξ⟩}`,
/// with `ξ = e₁`. Smaller `t` are reported for the convergence trend.
pub(super) fn kernel(cfg: &ExperimentConfig, _seed: u64) -> Result<StepOutput, CheckError> {
    const NAME: &str = "c6.martin_kernel";
    let m = &cfg.martin;
    let x = m.point();
    let xi = Direction::axis(m.n, 0);
    let alpha = eigen_rate_alpha(m.lambda, m.p).check(NAME)?;
    let x_norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let res = radial_exterior_eigen(m.n, m.p, m.lambda, 1.0, m.t + x_norm + 1.0).check(NAME)?;
    let target = (alpha * x[0]).exp();

    let mut table = Vec::new();
    let mut t = m.t;
    let mut ts = vec![t];
    while t / 10.0 > 10.0 * (1.0 + x_norm) {
        t /= 10.0;
        ts.push(t);
    }
    ts.reverse();
    let mut last = f64::NAN;
    for &t in &ts {
        last = martin_kernel_estimate(&res.profile, &x, &xi, t).check(NAME)?;
        table.push(vec![t, last, target, (last - target).abs()]);
    }
    Ok(StepOutput {
        rows: vec![CheckRow::new(NAME, target, last, 5e-3)],
        artifacts: vec![Artifact::csv(
            "martin.csv",
            &[format!("n={} p={} lambda={} x={:?}", m.n, m.p, m.lambda, x)],
            "t,estimate,limit,error",
            &table,
        )],
    })
}
