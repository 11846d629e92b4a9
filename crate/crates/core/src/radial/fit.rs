use nalgebra::{DMatrix, DVector};

use super::{RadialError, RadialProfile};

/// Least-squares model `ln u = -rate·r - power·ln r + log_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub power: f64,
    pub log_c: f64,
    pub rms: f64,
    pub samples: usize,
}

/// Fit over the outer half `[r_max/2, r_max]` of the profile.
pub fn fit_decay_exponents(profile: &RadialProfile) -> Result<DecayFit, RadialError> {
    let hi = profile.r_max();
    fit_decay_exponents_window(profile, 0.5 * hi, hi)
}

pub fn fit_decay_exponents_window(
    profile: &RadialProfile,
    lo: f64,
    hi: f64,
) -> Result<DecayFit, RadialError> {
    let idx = profile.window(lo, hi);
    if idx.len() < 10 {
        return Err(RadialError::IllConditioned(idx.len()));
    }
    if profile.r()[idx[0]] <= 0.0 {
        return Err(RadialError::Precondition("fit window must have r > 0".into()));
    }
    // columns scaled to unit max so the SVD sees comparable magnitudes
    let r_scale = profile.r()[idx[idx.len() - 1]];
    let l_scale = idx
        .iter()
        .map(|&i| profile.r()[i].ln().abs())
        .fold(0.0, f64::max)
        .max(1.0);
    let m = idx.len();
    let mut a = DMatrix::<f64>::zeros(m, 3);
    let mut b = DVector::<f64>::zeros(m);
    for (row, &i) in idx.iter().enumerate() {
        let r = profile.r()[i];
        a[(row, 0)] = -r / r_scale;
        a[(row, 1)] = -r.ln() / l_scale;
        a[(row, 2)] = 1.0;
        b[row] = profile.log_u()[i];
    }
    let svd = a.clone().svd(true, true);
    let x = svd
        .solve(&b, 1e-14)
        .map_err(|e| RadialError::Precondition(format!("least squares failed: {e}")))?;
    let resid = &a * &x - &b;
    let rms = (resid.norm_squared() / m as f64).sqrt();
    Ok(DecayFit {
        rate: x[0] / r_scale,
        power: x[1] / l_scale,
        log_c: x[2],
        rms,
        samples: m,
    })
}
