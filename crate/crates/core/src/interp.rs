//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch–Carlson
//! slopes with the Fritsch–Butland harmonic mean at interior knots).

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing with at least two knots.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
            return Some(Self { x, y, d });
        }
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Some(Self { x, y, d })
    }

    /// Hermite interpolant with caller-supplied slopes, clipped where needed
    /// so each interval stays monotone.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut d: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || d.len() != n || x.windows(2).any(|w| !(w[1] > w[0])) {
            return None;
        }
        for k in 0..n - 1 {
            let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
            if delta == 0.0 {
                d[k] = 0.0;
                d[k + 1] = 0.0;
                continue;
            }
            for j in [k, k + 1] {
                if d[j] * delta < 0.0 {
                    d[j] = 0.0;
                }
            }
            let (a, b) = (d[k] / delta, d[k + 1] / delta);
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                d[k] = tau * a * delta;
                d[k + 1] = tau * b * delta;
            }
        }
        Some(Self { x, y, d })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, t: f64) -> Option<usize> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let k = self.x.partition_point(|&xk| xk <= t);
        Some(k.saturating_sub(1).min(self.x.len() - 2))
    }

    /// Value and first derivative at `t`, `None` outside the knot range.
    pub fn eval_with_derivative(&self, t: f64) -> Option<(f64, f64)> {
        let k = self.locate(t)?;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k], self.d[k + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        Some((value, deriv))
    }

    pub fn eval(&self, t: f64) -> Option<f64> {
        self.eval_with_derivative(t).map(|(v, _)| v)
    }
}

/// Three-point end slope, limited so the end interval stays monotone.
fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data() {
        let x: Vec<f64> = (0..20).map(|k| (k as f64 * 0.3).exp()).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.7 * v).collect();
        let m = MonotoneCubic::new(x.clone(), y).unwrap();
        for t in [1.0, 1.7, 30.0, x[19]] {
            let (v, d) = m.eval_with_derivative(t).unwrap();
            assert!((v - (2.0 - 0.7 * t)).abs() < 1e-12);
            assert!((d + 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.0, 1.0, 1.0, 5.0];
        let m = MonotoneCubic::new(x, y).unwrap();
        let mut prev = -1.0;
        for k in 0..=400 {
            let v = m.eval(k as f64 * 0.01).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn exact_slopes_give_fourth_order() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
            let y: Vec<f64> = x.iter().map(|v| -v.exp()).collect();
            let m = MonotoneCubic::with_slopes(x.clone(), y, x.iter().map(|v| -v.exp()).collect()).unwrap();
            (0..500)
                .map(|k| {
                    let t = k as f64 / 499.0;
                    (m.eval(t).unwrap() + t.exp()).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(21) / err(41) > 14.0);
    }

    #[test]
    fn outside_domain_is_none() {
        let m = MonotoneCubic::new(vec![1.0, 2.0], vec![0.0, 1.0]).unwrap();
        assert!(m.eval(0.5).is_none());
        assert!(m.eval(2.5).is_none());
        assert!(MonotoneCubic::new(vec![1.0, 1.0], vec![0.0, 1.0]).is_none());
    }

    #[test]
    fn smooth_data_converges() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64 * 3.0).collect();
            let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
            let m = MonotoneCubic::new(x, y).unwrap();
            (0..300)
                .map(|k| {
                    let t = 0.1 + k as f64 * 0.009;
                    (m.eval(t).unwrap() - t.sin()).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(41) < err(21) / 4.0);
    }
}
