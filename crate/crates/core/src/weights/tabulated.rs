//! Monotone piecewise-cubic (Fritsch-Carlson) interpolation of sampled weights.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::invalid;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Samples `(r, value)` with `r` strictly increasing in `[0, 1)` and
    /// positive values. The interpolant (extended by its end segments) must
    /// stay positive on `[0, 1)`.
    pub fn new(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("tabulated weight needs at least two samples"));
        }
        for (i, &(r, v)) in samples.iter().enumerate() {
            if !(0.0..1.0).contains(&r) {
                return Err(invalid(alloc::format!("sample {i}: r = {r} outside [0, 1)")));
            }
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(alloc::format!("sample {i}: value {v} is not positive")));
            }
            if i > 0 && !(r > samples[i - 1].0) {
                return Err(invalid(alloc::format!("sample {i}: r values must strictly increase")));
            }
        }
        let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ys: Vec<f64> = samples.iter().map(|s| s.1).collect();
        let m = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..m - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = alloc::vec![0.0; m];
        slopes[0] = delta[0];
        slopes[m - 1] = delta[m - 2];
        for k in 1..m - 1 {
            if delta[k - 1] * delta[k] <= 0.0 {
                slopes[k] = 0.0;
            } else {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        let interp = MonotoneCubic { xs, ys, slopes };
        interp.check_positive()?;
        Ok(interp)
    }

    pub fn first_sample(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_sample(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    fn segment(&self, x: f64) -> usize {
        let m = self.xs.len();
        match self.xs.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(m - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(m - 2),
        }
    }

    /// Power-basis coefficients of segment `k` in `s = x - x_k`.
    fn coefficients(&self, k: usize) -> [f64; 4] {
        let h = self.xs[k + 1] - self.xs[k];
        let (y0, y1) = (self.ys[k], self.ys[k + 1]);
        let (m0, m1) = (self.slopes[k], self.slopes[k + 1]);
        let delta = (y1 - y0) / h;
        let c2 = (3.0 * delta - 2.0 * m0 - m1) / h;
        let c3 = (m0 + m1 - 2.0 * delta) / (h * h);
        [y0, m0, c2, c3]
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let [a, b, c, d] = self.coefficients(k);
        let s = x - self.xs[k];
        a + s * (b + s * (c + s * d))
    }

    fn check_positive(&self) -> Result<()> {
        let m = self.xs.len();
        for k in 0..m - 1 {
            let lo = if k == 0 { 0.0 } else { self.xs[k] };
            let hi = if k == m - 2 { 1.0 } else { self.xs[k + 1] };
            let [_, b, c, d] = self.coefficients(k);
            let x0 = self.xs[k];
            let mut probes = alloc::vec![lo, hi];
            // critical points of the cubic: b + 2c s + 3d s² = 0
            if d != 0.0 {
                let disc = 4.0 * c * c - 12.0 * d * b;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    probes.push(x0 + (-2.0 * c + sq) / (6.0 * d));
                    probes.push(x0 + (-2.0 * c - sq) / (6.0 * d));
                }
            } else if c != 0.0 {
                probes.push(x0 - b / (2.0 * c));
            }
            for p in probes {
                if p < lo || p > hi {
                    continue;
                }
                let v = self.eval_on_segment(k, p);
                let ok = if p >= 1.0 { v >= 0.0 } else { v > 0.0 };
                if !ok {
                    return Err(invalid(alloc::format!(
                        "interpolated weight is not positive near r = {p:.6} (value {v:e})"
                    )));
                }
            }
        }
        Ok(())
    }

    fn eval_on_segment(&self, k: usize, x: f64) -> f64 {
        let [a, b, c, d] = self.coefficients(k);
        let s = x - self.xs[k];
        a + s * (b + s * (c + s * d))
    }
}
