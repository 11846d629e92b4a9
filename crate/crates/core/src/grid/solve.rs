//! Damped Newton for the Dirichlet problem `-Δ_p v + λ v^{p-1} = 0`.
//!
//! Interior unknowns are numbered row by row, so the 9-point Jacobian is a
//! band matrix with half-bandwidth `nx - 1`. It is factored without pivoting:
//! the operator is elliptic and the `λ (p-1) v^{p-2}` term strengthens the
//! diagonal.

use super::operators::{east_grad, flux_partials, north_grad, residual_values};
use super::{Field2D, GridError, Rect};
use crate::blowup::Direction;
use crate::exec::{self, Exec};
use crate::indicial::eigen_rate_alpha;

const STEP_FLOOR: f64 = 1.0 / (1u64 << 30) as f64;
/// Rows of the band handed to one task during elimination.
const ELIM_ROWS_PER_TASK: usize = 16;
/// Pivots whose updates are applied together to the rows below them.
const PIVOT_BLOCK: usize = 32;

/// Starting iterate for Newton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    /// Transfinite (Coons) interpolation of the four boundary traces.
    #[default]
    Coons,
    /// The boundary function evaluated at interior nodes.
    BoundaryExtension,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Target sup-norm of the discrete residual.
    pub tol: f64,
    pub max_iters: usize,
    /// Regularization; `None` uses `1e-8 · α · max|boundary|`.
    pub epsilon: Option<f64>,
    pub initial: InitialGuess,
    pub exec: Exec,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iters: 50,
            epsilon: None,
            initial: InitialGuess::Coons,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub newton_iters: usize,
    pub final_residual: f64,
    pub damping_events: usize,
    pub epsilon: f64,
}

/// Solves with boundary data `e^{α⟨x,ξ⟩}` on `rect`.
pub fn solve_dirichlet(
    p: f64,
    lambda: f64,
    xi: &Direction,
    rect: &Rect,
    h: f64,
    tol: f64,
) -> Result<(Field2D, SolveStats), GridError> {
    let opts = SolveOptions {
        tol,
        ..SolveOptions::default()
    };
    solve_dirichlet_exponential(p, lambda, xi, rect, h, &opts)
}

pub fn solve_dirichlet_exponential(
    p: f64,
    lambda: f64,
    xi: &Direction,
    rect: &Rect,
    h: f64,
    opts: &SolveOptions,
) -> Result<(Field2D, SolveStats), GridError> {
    if xi.dim() != 2 {
        return Err(GridError::Domain(format!("direction must be 2-D, got dimension {}", xi.dim())));
    }
    let alpha = eigen_rate_alpha(lambda, p).map_err(|e| GridError::Domain(e.to_string()))?;
    let (a, b) = (alpha * xi.as_slice()[0], alpha * xi.as_slice()[1]);
    solve_dirichlet_with(p, lambda, rect, h, |x, y| (a * x + b * y).exp(), opts)
}

/// Solves with arbitrary positive boundary data `g`.
pub fn solve_dirichlet_with(
    p: f64,
    lambda: f64,
    rect: &Rect,
    h: f64,
    g: impl Fn(f64, f64) -> f64,
    opts: &SolveOptions,
) -> Result<(Field2D, SolveStats), GridError> {
    if !(p > 1.0) {
        return Err(GridError::Domain(format!("need p > 1, got {p}")));
    }
    let alpha = eigen_rate_alpha(lambda, p).map_err(|e| GridError::Domain(e.to_string()))?;
    let exact = Field2D::sample(rect, h, &g)?;
    let (nx, ny) = (exact.nx, exact.ny);
    let mut v = match opts.initial {
        InitialGuess::BoundaryExtension => exact.clone(),
        InitialGuess::Coons => coons_patch(&exact),
    };
    let mut vscale = 0.0f64;
    for j in 0..ny {
        for i in 0..nx {
            if exact.is_boundary(i, j) {
                let b = exact.at(i, j);
                if !(b > 0.0) {
                    return Err(GridError::NotPositive);
                }
                vscale = vscale.max(b);
            }
        }
    }
    if !v.is_positive() {
        let floor = v.values.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
        v = v.map(|x| x.max(floor));
    }
    let eps = opts.epsilon.unwrap_or(1e-8 * alpha * vscale);
    newton(v, p, lambda, eps, opts)
}

fn coons_patch(b: &Field2D) -> Field2D {
    let (nx, ny) = (b.nx, b.ny);
    let mut out = b.clone();
    let (c00, c10, c01, c11) = (b.at(0, 0), b.at(nx - 1, 0), b.at(0, ny - 1), b.at(nx - 1, ny - 1));
    for j in 1..ny - 1 {
        let t = j as f64 / (ny - 1) as f64;
        for i in 1..nx - 1 {
            let s = i as f64 / (nx - 1) as f64;
            let edges = (1.0 - s) * b.at(0, j) + s * b.at(nx - 1, j) + (1.0 - t) * b.at(i, 0) + t * b.at(i, ny - 1);
            let corners = (1.0 - s) * (1.0 - t) * c00 + s * (1.0 - t) * c10 + (1.0 - s) * t * c01 + s * t * c11;
            out.values[j * nx + i] = edges - corners;
        }
    }
    out
}

fn sup(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn newton(mut v: Field2D, p: f64, lambda: f64, eps: f64, opts: &SolveOptions) -> Result<(Field2D, SolveStats), GridError> {
    let exec = opts.exec;
    let mut res = residual_values(exec, &v, p, lambda, eps);
    let mut rn = sup(&res);
    let mut stats = SolveStats {
        newton_iters: 0,
        final_residual: rn,
        damping_events: 0,
        epsilon: eps,
    };
    let mut band = Band::new(v.nx, v.ny);
    while rn > opts.tol {
        if stats.newton_iters >= opts.max_iters {
            return Err(GridError::NoConvergence {
                iters: stats.newton_iters,
                residual: rn,
                reason: "iteration limit reached".into(),
            });
        }
        band.assemble(exec, &v, p, lambda, eps);
        band.factor(exec);
        let delta = band.solve(&res);
        let mut theta = 1.0;
        loop {
            let trial = band.update(&v, &delta, -theta);
            if trial.is_positive() {
                let r_trial = residual_values(exec, &trial, p, lambda, eps);
                let rt = sup(&r_trial);
                if rt < rn {
                    v = trial;
                    res = r_trial;
                    rn = rt;
                    break;
                }
            }
            theta *= 0.5;
            stats.damping_events += 1;
            if theta < STEP_FLOOR {
                return Err(GridError::NoConvergence {
                    iters: stats.newton_iters,
                    residual: rn,
                    reason: "damping floor 2^-30 reached".into(),
                });
            }
        }
        stats.newton_iters += 1;
        stats.final_residual = rn;
    }
    Ok((v, stats))
}

/// Band matrix over interior unknowns, stored row-wise with `2b + 1` slots.
struct Band {
    nx: usize,
    ny: usize,
    m: usize,
    n: usize,
    b: usize,
    w: usize,
    a: Vec<f64>,
}

impl Band {
    fn new(nx: usize, ny: usize) -> Self {
        let m = nx - 2;
        let n = m * (ny - 2);
        let b = m + 1;
        let w = 2 * b + 1;
        Self {
            nx,
            ny,
            m,
            n,
            b,
            w,
            a: vec![0.0; n * w],
        }
    }

    /// Jacobian of the residual at `v`.
    fn assemble(&mut self, exec: Exec, v: &Field2D, p: f64, lambda: f64, eps: f64) {
        let (nx, ny, h, m, w, b) = (self.nx, self.ny, v.h, self.m, self.w, self.b);
        let vals = &v.values[..];
        let unknown = move |i: usize, j: usize| {
            if i == 0 || j == 0 || i + 1 == nx || j + 1 == ny {
                None
            } else {
                Some((j - 1) * m + (i - 1))
            }
        };
        let mut a = std::mem::take(&mut self.a);
        exec::for_each_chunk(exec, &mut a, m * w, |jr, rows| {
            rows.fill(0.0);
            let j = jr + 1;
            for i in 1..nx - 1 {
                let r = (j - 1) * m + (i - 1);
                let row = &mut rows[(i - 1) * w..i * w];
                let mut add = |ii: usize, jj: usize, val: f64| {
                    if let Some(c) = unknown(ii, jj) {
                        row[c + b - r] += val;
                    }
                };
                // each face: sign of its contribution to the residual, then d(flux)
                let faces = [
                    (-1.0, true, i, j),
                    (1.0, true, i - 1, j),
                    (-1.0, false, i, j),
                    (1.0, false, i, j - 1),
                ];
                for (sign, east, fi, fj) in faces {
                    let (gn, gt) = if east {
                        east_grad(vals, nx, h, fi, fj)
                    } else {
                        north_grad(vals, nx, h, fi, fj)
                    };
                    let (dn, dt) = flux_partials(gn, gt, p, eps);
                    let cn = sign * dn / (h * h);
                    let ct = sign * dt / (4.0 * h * h);
                    if east {
                        add(fi + 1, fj, cn);
                        add(fi, fj, -cn);
                        add(fi, fj + 1, ct);
                        add(fi + 1, fj + 1, ct);
                        add(fi, fj - 1, -ct);
                        add(fi + 1, fj - 1, -ct);
                    } else {
                        add(fi, fj + 1, cn);
                        add(fi, fj, -cn);
                        add(fi + 1, fj, ct);
                        add(fi + 1, fj + 1, ct);
                        add(fi - 1, fj, -ct);
                        add(fi - 1, fj + 1, -ct);
                    }
                }
                let vc = vals[j * nx + i];
                row[b] += lambda * (p - 1.0) * vc.powf(p - 2.0);
            }
        });
        self.a = a;
    }

    /// In-place LU without pivoting; `L` has unit diagonal.
    ///
    /// Pivots are taken in blocks: the block's own rows are eliminated first,
    /// then every row below receives the block's updates in pivot order. Each
    /// row sees exactly the operations of the unblocked algorithm, so the
    /// factors do not depend on the execution policy.
    fn factor(&mut self, exec: Exec) {
        let (n, b, w) = (self.n, self.b, self.w);
        let mut k0 = 0;
        while k0 < n {
            let k1 = (k0 + PIVOT_BLOCK).min(n);
            for k in k0..k1 {
                let (head, tail) = self.a.split_at_mut((k + 1) * w);
                let pivot_row = &head[k * w..];
                for i in k + 1..k1.min(k + b + 1) {
                    eliminate(&mut tail[(i - k - 1) * w..(i - k) * w], i, k, pivot_row, n, b);
                }
            }
            let below_end = (k1 - 1 + b).min(n - 1) + 1;
            if below_end > k1 {
                let (head, tail) = self.a.split_at_mut(k1 * w);
                let pivots = &head[k0 * w..];
                let tail = &mut tail[..(below_end - k1) * w];
                exec::for_each_chunk(exec, tail, ELIM_ROWS_PER_TASK * w, |chunk, rows| {
                    for (off, row) in rows.chunks_mut(w).enumerate() {
                        let i = k1 + chunk * ELIM_ROWS_PER_TASK + off;
                        for k in k0.max(i.saturating_sub(b))..k1 {
                            eliminate(row, i, k, &pivots[(k - k0) * w..(k - k0 + 1) * w], n, b);
                        }
                    }
                });
            }
            k0 = k1;
        }
    }

    /// Solves `J x = rhs` restricted to interior unknowns.
    fn solve(&self, rhs_field: &[f64]) -> Vec<f64> {
        let (n, b, w) = (self.n, self.b, self.w);
        let mut x = vec![0.0; n];
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                x[(j - 1) * self.m + (i - 1)] = rhs_field[j * self.nx + i];
            }
        }
        for i in 0..n {
            let row = &self.a[i * w..(i + 1) * w];
            let mut s = x[i];
            for c in i.saturating_sub(b)..i {
                s -= row[c + b - i] * x[c];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = &self.a[i * w..(i + 1) * w];
            let mut s = x[i];
            for c in i + 1..=(i + b).min(n - 1) {
                s -= row[c + b - i] * x[c];
            }
            x[i] = s / row[b];
        }
        x
    }

    fn update(&self, v: &Field2D, delta: &[f64], scale: f64) -> Field2D {
        let mut out = v.clone();
        for j in 1..self.ny - 1 {
            for i in 1..self.nx - 1 {
                out.values[j * self.nx + i] += scale * delta[(j - 1) * self.m + (i - 1)];
            }
        }
        out
    }
}

/// Row `i` minus `l` times pivot row `k`, storing `l` in column `k`.
#[inline]
fn eliminate(row: &mut [f64], i: usize, k: usize, pivot_row: &[f64], n: usize, b: usize) {
    let lk = k + b - i;
    let l = row[lk] / pivot_row[b];
    row[lk] = l;
    if l == 0.0 {
        return;
    }
    let last = (k + b).min(n - 1);
    let (dst, src) = (&mut row[lk + 1..=last + b - i], &pivot_row[b + 1..=last + b - k]);
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= l * s;
    }
}
