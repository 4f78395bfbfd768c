//! Convex bodies in the Lie algebra described by a gauge function.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};

/// A convex body `{rho < 1}` containing the origin, with boundary `{rho = 1}`.
pub trait ConvexGauge: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Gradient of the gauge; central differences unless overridden.
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        let mut p = x.to_vec();
        (0..x.len())
            .map(|j| {
                p[j] = x[j] + h;
                let a = self.value(&p);
                p[j] = x[j] - h;
                let b = self.value(&p);
                p[j] = x[j];
                (a - b) / (2.0 * h)
            })
            .collect()
    }

    /// The `t > 0` with `base + t w` on the boundary.
    fn chord(&self, base: &[f64], w: &[f64]) -> Result<f64> {
        let at = |t: f64| {
            let p: Vec<f64> = base.iter().zip(w).map(|(b, d)| b + t * d).collect();
            self.value(&p) - 1.0
        };
        if !(at(0.0) < 0.0) {
            return Err(Error::GaugeFailure);
        }
        let mut hi = 1.0;
        let mut tries = 0;
        while at(hi) < 0.0 {
            hi *= 2.0;
            tries += 1;
            if tries > 60 {
                return Err(Error::GaugeFailure);
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if at(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Euclidean ball of radius `radius`.
#[derive(Clone, Debug)]
pub struct EuclideanBall {
    pub dim: usize,
    pub radius: f64,
}

impl ConvexGauge for EuclideanBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt() / self.radius
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return vec![0.0; x.len()];
        }
        x.iter().map(|v| v / (r * self.radius)).collect()
    }
}

/// Korányi ball `(|x|^4 + u^2)^(1/4) < 1` in coordinates `(x, u)` of `H^m`.
#[derive(Clone, Debug)]
pub struct KoranyiBall {
    pub m: usize,
}

impl ConvexGauge for KoranyiBall {
    fn dim(&self) -> usize {
        2 * self.m + 1
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = 2 * self.m;
        let r2: f64 = x[..n].iter().map(|v| v * v).sum();
        (r2 * r2 + x[n] * x[n]).sqrt().sqrt()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let n = 2 * self.m;
        let r2: f64 = x[..n].iter().map(|v| v * v).sum();
        let rho = self.value(x);
        if rho == 0.0 {
            return vec![0.0; n + 1];
        }
        let c = rho.powi(-3);
        let mut g: Vec<f64> = x[..n].iter().map(|v| c * r2 * v).collect();
        g.push(0.5 * c * x[n]);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chord_hits_boundary() {
        let k = KoranyiBall { m: 1 };
        let base = [0.3, 0.0, 0.0];
        let w = [0.0, 0.6, 0.8];
        let t = k.chord(&base, &w).unwrap();
        let p: Vec<f64> = base.iter().zip(&w).map(|(b, d)| b + t * d).collect();
        assert!((k.value(&p) - 1.0).abs() < 1e-12);
        assert_eq!(
            k.chord(&[2.0, 0.0, 0.0], &w).unwrap_err(),
            Error::GaugeFailure
        );
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let k = KoranyiBall { m: 1 };
        let x = [0.4, -0.3, 0.5];
        let g = k.gradient(&x);
        let p = [0.4, -0.3, 0.5];
        let h = 1e-6;
        for j in 0..3 {
            let mut a = p;
            let mut b = p;
            a[j] += h;
            b[j] -= h;
            assert!((g[j] - (k.value(&a) - k.value(&b)) / (2.0 * h)).abs() < 1e-7);
        }
    }
}
