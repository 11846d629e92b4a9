//! Gradient-bound diagnostics on positive grid functions.
//!
//! With `w = -(p-1) ln v` and `f = |∇w|²`, positive solutions of the
//! eigenfunction equation satisfy `f ≤ κ`, `κ = ((p-1)^{p-1} λ)^{2/p}`, which
//! is the same statement as `|∇ ln v| ≤ α`. The Bochner residual compares the
//! two sides of
//!
//! ```text
//! L_w(f) = 2 f^{p/2-1} |D²w|² + (p/2 - 1) |∇f|² f^{p/2-2} + p f^{p/2-1} ⟨∇w, ∇f⟩
//! ```
//!
//! where `L_w(g) = div(f^{(p-2)/2} [∇g + (p-2) ⟨∇w,∇g⟩ ∇w / f])`.

use super::operators::{centered_grad, interior_map, interior_mask};
use super::{Field2D, GridError, MaskedField};
use crate::blowup::Direction;
use crate::exec::Exec;
use crate::indicial::eigen_rate_alpha;

fn log_values(field: &Field2D) -> Result<Vec<f64>, GridError> {
    if !field.is_positive() {
        return Err(GridError::NotPositive);
    }
    Ok(field.values.iter().map(|v| v.ln()).collect())
}

/// `max |∇ ln v|` over interior nodes, centered differences.
pub fn gradient_log_sup(field: &Field2D) -> Result<f64, GridError> {
    let w = log_values(field)?;
    let (nx, h) = (field.nx, field.h);
    let norms = interior_map(Exec::default(), nx, field.ny, |i, j| {
        let (gx, gy) = centered_grad(&w, nx, h, i, j);
        gx.hypot(gy)
    });
    Ok(norms.into_iter().fold(0.0, f64::max))
}

/// `(min, max)` of `⟨∇ ln v, ν⟩` over interior nodes.
pub fn directional_range(field: &Field2D, nu: &Direction) -> Result<(f64, f64), GridError> {
    if nu.dim() != 2 {
        return Err(GridError::Domain(format!("direction must be 2-D, got dimension {}", nu.dim())));
    }
    let w = log_values(field)?;
    let (nx, h) = (field.nx, field.h);
    let (a, b) = (nu.as_slice()[0], nu.as_slice()[1]);
    let values = interior_map(Exec::default(), nx, field.ny, |i, j| {
        let (gx, gy) = centered_grad(&w, nx, h, i, j);
        a * gx + b * gy
    });
    let masked = MaskedField {
        field: Field2D {
            values,
            ..field.clone()
        },
        mask: interior_mask(field.nx, field.ny),
    };
    Ok(masked.range().expect("fields have at least one interior node"))
}

/// `κ = ((p-1)^{p-1} λ)^{2/p}`.
pub fn kappa(p: f64, lambda: f64) -> f64 {
    ((p - 1.0).powf(p - 1.0) * lambda).powf(2.0 / p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaCheck {
    pub max_f: f64,
    pub kappa: f64,
}

impl KappaCheck {
    pub fn ratio(&self) -> f64 {
        self.max_f / self.kappa
    }
}

/// Largest `f = (p-1)² |∇ ln v|²` over interior nodes, alongside `κ`.
pub fn kappa_bound_check(field: &Field2D, p: f64, lambda: f64) -> Result<KappaCheck, GridError> {
    eigen_rate_alpha(lambda, p).map_err(|e| GridError::Domain(e.to_string()))?;
    let g = gradient_log_sup(field)?;
    Ok(KappaCheck {
        max_f: (p - 1.0) * (p - 1.0) * g * g,
        kappa: kappa(p, lambda),
    })
}

/// Pointwise Bochner defect `L_w(f) - RHS`, valid three nodes in from the
/// boundary wherever `f` exceeds `threshold` at the node and its four neighbours.
pub fn bochner_residual_field(field: &Field2D, p: f64, threshold: f64) -> Result<MaskedField, GridError> {
    let (nx, ny, h) = (field.nx, field.ny, field.h);
    if nx < 7 || ny < 7 {
        return Err(GridError::Domain("Bochner stencil needs at least 7 x 7 nodes".into()));
    }
    let w: Vec<f64> = log_values(field)?.into_iter().map(|l| -(p - 1.0) * l).collect();
    let len = nx * ny;
    let interior = |i: usize, j: usize, margin: usize| i >= margin && j >= margin && i + margin < nx && j + margin < ny;

    let (mut wx, mut wy, mut f, mut hess2) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    let h2 = h * h;
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let c = j * nx + i;
            let (gx, gy) = centered_grad(&w, nx, h, i, j);
            let wxx = (w[c + 1] - 2.0 * w[c] + w[c - 1]) / h2;
            let wyy = (w[c + nx] - 2.0 * w[c] + w[c - nx]) / h2;
            let wxy = (w[c + nx + 1] - w[c + nx - 1] - w[c - nx + 1] + w[c - nx - 1]) / (4.0 * h2);
            wx[c] = gx;
            wy[c] = gy;
            f[c] = gx * gx + gy * gy;
            hess2[c] = wxx * wxx + 2.0 * wxy * wxy + wyy * wyy;
        }
    }

    let (mut fx, mut fy, mut phix, mut phiy) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
    for j in 2..ny - 2 {
        for i in 2..nx - 2 {
            let c = j * nx + i;
            let (gx, gy) = centered_grad(&f, nx, h, i, j);
            fx[c] = gx;
            fy[c] = gy;
            if f[c] > threshold {
                let k = f[c].powf(0.5 * (p - 2.0));
                let proj = (p - 2.0) * (wx[c] * gx + wy[c] * gy) / f[c];
                phix[c] = k * (gx + proj * wx[c]);
                phiy[c] = k * (gy + proj * wy[c]);
            }
        }
    }

    let mut out = vec![0.0; len];
    let mut mask = vec![false; len];
    for j in 0..ny {
        for i in 0..nx {
            if !interior(i, j, 3) {
                continue;
            }
            let c = j * nx + i;
            if [c, c + 1, c - 1, c + nx, c - nx].iter().any(|&k| f[k] <= threshold) {
                continue;
            }
            let div = (phix[c + 1] - phix[c - 1] + phiy[c + nx] - phiy[c - nx]) / (2.0 * h);
            let fc = f[c];
            let grad_f2 = fx[c] * fx[c] + fy[c] * fy[c];
            let rhs = 2.0 * fc.powf(0.5 * p - 1.0) * hess2[c]
                + (0.5 * p - 1.0) * grad_f2 * fc.powf(0.5 * p - 2.0)
                + p * fc.powf(0.5 * p - 1.0) * (wx[c] * fx[c] + wy[c] * fy[c]);
            out[c] = div - rhs;
            mask[c] = true;
        }
    }
    Ok(MaskedField {
        field: Field2D {
            values: out,
            ..field.clone()
        },
        mask,
    })
}

/// Sup-norm of [`bochner_residual_field`]; 0 when the mask is empty.
/// `threshold` defaults to `1e-6 κ` when `None`.
pub fn bochner_residual(field: &Field2D, p: f64, lambda: f64, threshold: Option<f64>) -> Result<f64, GridError> {
    let thr = threshold.unwrap_or(1e-6 * kappa(p, lambda));
    Ok(bochner_residual_field(field, p, thr)?.sup_norm())
}
