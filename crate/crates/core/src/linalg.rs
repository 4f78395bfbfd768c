//! Small dense linear algebra: exact rank over the rationals and singular
//! values by one-sided Jacobi rotations.

use alloc::vec::Vec;
use num_traits::{Float, Zero};

use crate::algebra::Rational;

/// Relative threshold under which a singular value counts as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Exact rank of a row-major `rows x cols` rational matrix.
pub fn rank_exact(rows: usize, cols: usize, data: &[Rational]) -> usize {
    let mut m: Vec<Rational> = data.to_vec();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r * cols + c].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                m.swap(p * cols + j, rank * cols + j);
            }
        }
        let pivot = m[rank * cols + c];
        for r in (rank + 1)..rows {
            let f = m[r * cols + c] / pivot;
            if f.is_zero() {
                continue;
            }
            for j in c..cols {
                let v = m[rank * cols + j];
                m[r * cols + j] -= f * v;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Singular values (unsorted) of a row-major `rows x cols` matrix.
pub fn singular_values(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    // Work on columns: a[c] is column c.
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|c| (0..rows).map(|r| data[r * cols + c]).collect())
        .collect();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for r in 0..rows {
                    alpha += a[p][r] * a[p][r];
                    beta += a[q][r] * a[q][r];
                    gamma += a[p][r] * a[q][r];
                }
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for r in 0..rows {
                    let x = a[p][r];
                    let y = a[q][r];
                    a[p][r] = c * x - s * y;
                    a[q][r] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    a.iter()
        .map(|col| col.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect()
}

/// Numerical rank with the relative threshold [`RANK_RTOL`].
pub fn rank_float(rows: usize, cols: usize, data: &[f64]) -> usize {
    let sv = singular_values(rows, cols, data);
    let top = sv.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s >= RANK_RTOL * top).count()
}

/// Solves a least-squares line fit `y = a + b x`; returns `(a, b, r2)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let r2 = if syy > 0.0 {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    (a, b, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn exact_rank_detects_dependence() {
        let m = [q(1), q(2), q(3), q(2), q(4), q(6), q(0), q(1), q(1)];
        assert_eq!(rank_exact(3, 3, &m), 2);
        assert_eq!(rank_exact(2, 2, &[q(0); 4]), 0);
    }

    #[test]
    fn singular_values_of_diagonal() {
        let mut sv = singular_values(3, 2, &[3.0, 0.0, 0.0, -4.0, 0.0, 0.0]);
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sv[0] - 3.0).abs() < 1e-12 && (sv[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn float_rank_matches_exact_on_rank_one() {
        let m = [1.0, 2.0, 2.0, 4.0, -1.0, -2.0];
        assert_eq!(rank_float(3, 2, &m), 1);
        assert_eq!(rank_float(2, 2, &[0.0; 4]), 0);
    }

    #[test]
    fn ols_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 0.25 * x).collect();
        let (a, b, r2) = ols(&xs, &ys);
        assert!((a - 1.5).abs() < 1e-12 && (b + 0.25).abs() < 1e-12 && r2 > 0.999_999);
    }
}
