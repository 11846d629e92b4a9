//! Divergence-form discretization of the regularized p-Laplacian and its
//! linearization.
//!
//! Fluxes live on cell faces. On the east face of node `(i, j)` the normal
//! derivative is the two-point difference across the face and the tangential
//! derivative is the average of the two centered differences at its ends;
//! north faces are the mirror image. The residual at an interior node is
//! `-(F_e - F_w + F_n - F_s)/h + λ v^{p-1}`.

use super::{Field2D, MaskedField};
use crate::exec::{self, Exec};

/// `(normal, tangential)` gradient on the east face of `(i, j)`.
#[inline]
pub(crate) fn east_grad(v: &[f64], nx: usize, h: f64, i: usize, j: usize) -> (f64, f64) {
    let c = j * nx + i;
    let gn = (v[c + 1] - v[c]) / h;
    let gt = (v[c + nx] + v[c + nx + 1] - v[c - nx] - v[c - nx + 1]) / (4.0 * h);
    (gn, gt)
}

/// `(normal, tangential)` gradient on the north face of `(i, j)`.
#[inline]
pub(crate) fn north_grad(v: &[f64], nx: usize, h: f64, i: usize, j: usize) -> (f64, f64) {
    let c = j * nx + i;
    let gn = (v[c + nx] - v[c]) / h;
    let gt = (v[c + 1] + v[c + nx + 1] - v[c - 1] - v[c + nx - 1]) / (4.0 * h);
    (gn, gt)
}

/// Regularized diffusivity `(|g|² + ε²)^{(p-2)/2}` and `|g|² + ε²`.
#[inline]
fn diffusivity(gn: f64, gt: f64, p: f64, eps: f64) -> (f64, f64) {
    let s = gn * gn + gt * gt + eps * eps;
    if s == 0.0 {
        return (0.0, 0.0);
    }
    (s.powf(0.5 * (p - 2.0)), s)
}

#[inline]
pub(crate) fn flux(gn: f64, gt: f64, p: f64, eps: f64) -> f64 {
    if gn == 0.0 {
        return 0.0;
    }
    diffusivity(gn, gt, p, eps).0 * gn
}

/// `(∂F/∂g_n, ∂F/∂g_t)` of the face flux.
#[inline]
pub(crate) fn flux_partials(gn: f64, gt: f64, p: f64, eps: f64) -> (f64, f64) {
    let (k, s) = diffusivity(gn, gt, p, eps);
    if s == 0.0 {
        return (0.0, 0.0);
    }
    let k2 = (p - 2.0) * k / s;
    (k + k2 * gn * gn, k2 * gn * gt)
}

/// Row-parallel evaluation of `f(i, j)` on interior nodes; boundary entries are 0.
pub(crate) fn interior_map(exec: Exec, nx: usize, ny: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
    let mut out = vec![0.0; nx * ny];
    exec::for_each_chunk(exec, &mut out, nx, |j, row| {
        if j == 0 || j + 1 == ny {
            return;
        }
        for (i, slot) in row.iter_mut().enumerate().take(nx - 1).skip(1) {
            *slot = f(i, j);
        }
    });
    out
}

pub(crate) fn interior_mask(nx: usize, ny: usize) -> Vec<bool> {
    let mut mask = vec![false; nx * ny];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            mask[j * nx + i] = true;
        }
    }
    mask
}

/// Discrete `-div((|∇v|² + ε²)^{(p-2)/2}∇v) + λ v^{p-1}` on interior nodes.
pub fn p_laplace_residual(field: &Field2D, p: f64, lambda: f64, epsilon: f64) -> MaskedField {
    p_laplace_residual_with(Exec::default(), field, p, lambda, epsilon)
}

pub fn p_laplace_residual_with(exec: Exec, field: &Field2D, p: f64, lambda: f64, epsilon: f64) -> MaskedField {
    let values = residual_values(exec, field, p, lambda, epsilon);
    MaskedField {
        field: Field2D {
            values,
            ..field.clone()
        },
        mask: interior_mask(field.nx, field.ny),
    }
}

pub(crate) fn residual_values(exec: Exec, field: &Field2D, p: f64, lambda: f64, eps: f64) -> Vec<f64> {
    let (nx, h, v) = (field.nx, field.h, &field.values[..]);
    interior_map(exec, nx, field.ny, |i, j| {
        let (en, et) = east_grad(v, nx, h, i, j);
        let (wn, wt) = east_grad(v, nx, h, i - 1, j);
        let (nn, nt) = north_grad(v, nx, h, i, j);
        let (sn, st) = north_grad(v, nx, h, i, j - 1);
        let div = flux(en, et, p, eps) - flux(wn, wt, p, eps) + flux(nn, nt, p, eps) - flux(sn, st, p, eps);
        let vc = v[j * nx + i];
        -div / h + lambda * vc.abs().powf(p - 1.0).copysign(vc)
    })
}

/// Face flux of the linearized operator: `k [∇g + (p-2)⟨∇v,∇g⟩∇v/(|∇v|²+ε²)]·n`.
#[inline]
fn linear_flux(gv: (f64, f64), gg: (f64, f64), p: f64, eps: f64) -> f64 {
    let (k, s) = diffusivity(gv.0, gv.1, p, eps);
    if s == 0.0 {
        return 0.0;
    }
    k * (gg.0 + (p - 2.0) * (gv.0 * gg.0 + gv.1 * gg.1) * gv.0 / s)
}

/// Discrete `L_v(g) = div(|∇v|^{p-2} A(∇g))`, masked where the centered
/// `|∇v|` is at most `grad_threshold`.
pub fn linearized_apply(v: &Field2D, g: &Field2D, p: f64, epsilon: f64, grad_threshold: f64) -> MaskedField {
    assert!(v.check_same_grid(g).is_ok(), "v and g must share a grid");
    let (nx, ny, h) = (v.nx, v.ny, v.h);
    let (vv, gv) = (&v.values[..], &g.values[..]);
    let exec = Exec::default();
    let values = interior_map(exec, nx, ny, |i, j| {
        let e = linear_flux(east_grad(vv, nx, h, i, j), east_grad(gv, nx, h, i, j), p, epsilon);
        let w = linear_flux(east_grad(vv, nx, h, i - 1, j), east_grad(gv, nx, h, i - 1, j), p, epsilon);
        let n = linear_flux(north_grad(vv, nx, h, i, j), north_grad(gv, nx, h, i, j), p, epsilon);
        let s = linear_flux(north_grad(vv, nx, h, i, j - 1), north_grad(gv, nx, h, i, j - 1), p, epsilon);
        (e - w + n - s) / h
    });
    let mut mask = interior_mask(nx, ny);
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let (gx, gy) = centered_grad(vv, nx, h, i, j);
            if (gx * gx + gy * gy).sqrt() <= grad_threshold {
                mask[j * nx + i] = false;
            }
        }
    }
    MaskedField {
        field: Field2D {
            values,
            ..v.clone()
        },
        mask,
    }
}

#[inline]
pub(crate) fn centered_grad(v: &[f64], nx: usize, h: f64, i: usize, j: usize) -> (f64, f64) {
    let c = j * nx + i;
    ((v[c + 1] - v[c - 1]) / (2.0 * h), (v[c + nx] - v[c - nx]) / (2.0 * h))
}

/// `⟨A(∇g), ∇g⟩ / |∇g|²` with `A(ζ) = ζ + (p-2)⟨∇v,ζ⟩∇v/|∇v|²`; at least `min(1, p-1)`.
pub fn ellipticity_check(grad_v: &[f64], grad_g: &[f64], p: f64) -> f64 {
    let vv: f64 = grad_v.iter().map(|a| a * a).sum();
    let gg: f64 = grad_g.iter().map(|a| a * a).sum();
    let vg: f64 = grad_v.iter().zip(grad_g).map(|(a, b)| a * b).sum();
    // cos² clipped to [0, 1] so rounding cannot push the ratio past p - 1
    let cos2 = (vg * vg / (vv * gg)).clamp(0.0, 1.0);
    1.0 + (p - 2.0) * cos2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Rect;

    fn exp_field(h: f64, a: f64, b: f64) -> Field2D {
        Field2D::sample(&Rect::unit_square(), h, |x, y| (a * x + b * y).exp()).unwrap()
    }

    fn order(errs: &[f64]) -> f64 {
        (errs[0] / errs[1]).log2()
    }

    #[test]
    fn linear_exponential_second_order() {
        let e: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0]
            .iter()
            .map(|&h| p_laplace_residual(&exp_field(h, 1.0, 0.0), 2.0, 1.0, 0.0).sup_norm())
            .collect();
        assert!(order(&e) > 1.95, "{e:?}");
        assert!(e[1] < 1e-3);
    }

    #[test]
    fn cubic_exponential_second_order() {
        let e: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0]
            .iter()
            .map(|&h| p_laplace_residual(&exp_field(h, 0.6, 0.8), 3.0, 2.0, 0.0).sup_norm())
            .collect();
        assert!(order(&e[..2]) > 1.8 && order(&e[1..]) > 1.9, "{e:?}");
    }

    #[test]
    fn constants_are_p_harmonic() {
        let one = Field2D::sample(&Rect::unit_square(), 0.125, |_, _| 1.0).unwrap();
        for p in [1.5, 2.0, 3.0] {
            assert_eq!(p_laplace_residual(&one, p, 0.0, 0.0).sup_norm(), 0.0);
        }
    }

    #[test]
    fn linearized_identities() {
        let (p, lambda) = (3.0, 2.0);
        let errs: Vec<(f64, f64)> = [1.0 / 16.0, 1.0 / 32.0]
            .iter()
            .map(|&h| {
                let v = exp_field(h, 1.0, 0.0);
                let g = v.clone();
                let lv = linearized_apply(&v, &g, p, 0.0, 1e-8);
                let mut worst_v = 0.0f64;
                for (k, &ok) in lv.mask.iter().enumerate() {
                    if ok {
                        // g = v and g = v_{x1} coincide for α = 1
                        let r = -lv.field.values[k] + (p - 1.0) * lambda * v.values[k].powf(p - 1.0);
                        worst_v = worst_v.max(r.abs());
                    }
                }
                let zero = linearized_apply(&v, &Field2D::zeros_like(&v), p, 0.0, 1e-8);
                (worst_v, zero.sup_norm())
            })
            .collect();
        assert!(errs[0].0 / errs[1].0 > 3.5, "{errs:?}");
        assert_eq!(errs[0].1, 0.0);
    }

    #[test]
    fn linearization_matches_finite_difference_of_residual() {
        let h = 1.0 / 16.0;
        let v = Field2D::sample(&Rect::unit_square(), h, |x, y| 1.0 + x * x + 0.5 * y + x * y).unwrap();
        let g = Field2D::sample(&Rect::unit_square(), h, |x, y| (3.0 * x).sin() * y).unwrap();
        let p = 2.7;
        let eps = 1e-3;
        let lv = linearized_apply(&v, &g, p, eps, 0.0);
        let t = 1e-6;
        let plus = Field2D {
            values: v.values.iter().zip(&g.values).map(|(a, b)| a + t * b).collect(),
            ..v.clone()
        };
        let minus = Field2D {
            values: v.values.iter().zip(&g.values).map(|(a, b)| a - t * b).collect(),
            ..v.clone()
        };
        let rp = p_laplace_residual(&plus, p, 0.0, eps);
        let rm = p_laplace_residual(&minus, p, 0.0, eps);
        for k in 0..v.values.len() {
            if lv.mask[k] {
                let fd = -(rp.field.values[k] - rm.field.values[k]) / (2.0 * t);
                assert!((fd - lv.field.values[k]).abs() < 1e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn ellipticity_extremes() {
        assert!((ellipticity_check(&[1.0, 0.0], &[0.0, 2.0], 3.0) - 1.0).abs() < 1e-15);
        assert!((ellipticity_check(&[1.0, 1.0], &[-2.0, -2.0], 3.0) - 2.0).abs() < 1e-15);
        assert!((ellipticity_check(&[1.0, 1.0], &[2.0, 2.0], 1.5) - 0.5).abs() < 1e-15);
    }
}
