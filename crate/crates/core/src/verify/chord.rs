use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use num_traits::Float;

use crate::algebra::{ad_kernel_basis, GradedLieAlgebra};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::measure::ConvexGauge;

const INITIAL_ANGLES: usize = 64;

/// A direction `W` in `ker ad_X` whose chord through `X` is bisected by `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoublePoint {
    /// `exp(t W)`
    pub w: GroupElement,
    pub direction: Vec<f64>,
    /// `t(W) = s(W)` at the solution (their mean).
    pub t: f64,
    /// `|t(W) - s(W)|`
    pub residual: f64,
    /// Angles bracketing the sign change of `t - s` on the kernel circle.
    pub bracket: (f64, f64),
    /// `|rho(x w) - 1|` and `|rho(w^-1 x) - 1|`, computed through the group law.
    pub boundary_residuals: (f64, f64),
}

/// Finds `W` in a two-plane of `ker ad_{log x}` with `t(W) = s(W)`, so that
/// `x w` and `w^-1 x` both lie on the boundary of the gauge body.
pub fn convex_double_point(
    alg: &GradedLieAlgebra,
    gauge: &dyn ConvexGauge,
    x: &GroupElement,
    tol: f64,
) -> Result<DoublePoint> {
    let n = alg.dim();
    if x.dim() != n || gauge.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim().min(gauge.dim()),
        });
    }
    let base = x.coords();
    let kernel = orthonormal(ad_kernel_basis(alg, base));
    if kernel.len() < 2 {
        return Err(Error::KernelTooSmall { dim: kernel.len() });
    }
    let (e1, e2) = (&kernel[0], &kernel[1]);
    let dir = |th: f64| -> Vec<f64> {
        e1.iter()
            .zip(e2)
            .map(|(a, b)| th.cos() * a + th.sin() * b)
            .collect()
    };
    let chords = |th: f64| -> Result<(f64, f64)> {
        let w = dir(th);
        let back: Vec<f64> = w.iter().map(|v| -v).collect();
        Ok((gauge.chord(base, &w)?, gauge.chord(base, &back)?))
    };
    let f = |th: f64| -> Result<f64> { chords(th).map(|(t, s)| t - s) };

    let mut prev = (0.0, f(0.0)?);
    let mut found = None;
    if prev.1.abs() < tol {
        found = Some((0.0, 0.0, 0.0));
    } else {
        for i in 1..=INITIAL_ANGLES {
            let th = PI * i as f64 / INITIAL_ANGLES as f64;
            let v = f(th)?;
            if v.abs() < tol {
                found = Some((th, prev.0, th));
                break;
            }
            if v.signum() != prev.1.signum() {
                let (mut a, mut fa, mut b) = (prev.0, prev.1, th);
                let mut mid = 0.5 * (a + b);
                for _ in 0..200 {
                    mid = 0.5 * (a + b);
                    let fm = f(mid)?;
                    if fm.abs() < tol || b - a < 1e-16 {
                        break;
                    }
                    if fm.signum() == fa.signum() {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                found = Some((mid, a, b));
                break;
            }
            prev = (th, v);
        }
    }
    let Some((th, a, b)) = found else {
        return Err(Error::NoSignChange);
    };
    let direction = dir(th);
    let (t, s) = chords(th)?;
    let tm = 0.5 * (t + s);
    let wc: Vec<f64> = direction.iter().map(|v| tm * v).collect();
    let winv: Vec<f64> = wc.iter().map(|v| -v).collect();
    let mut p = vec![0.0; n];
    alg.law_f64(base, &wc, &mut p);
    let r1 = (gauge.value(&p) - 1.0).abs();
    alg.law_f64(&winv, base, &mut p);
    let r2 = (gauge.value(&p) - 1.0).abs();
    Ok(DoublePoint {
        w: GroupElement::new(wc),
        direction,
        t: tm,
        residual: (t - s).abs(),
        bracket: (a, b),
        boundary_residuals: (r1, r2),
    })
}

/// Gram-Schmidt in the coordinate inner product, dropping dependent vectors.
fn orthonormal(vs: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mut v in vs {
        for u in &out {
            let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let nrm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            v.iter_mut().for_each(|a| *a /= nrm);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;
    use crate::measure::{EuclideanBall, KoranyiBall};

    #[test]
    fn sphere_chord_is_perpendicular() {
        let a = algebras::abelian(3);
        let ball = EuclideanBall {
            dim: 3,
            radius: 1.0,
        };
        let x = GroupElement::new(vec![0.2, -0.1, 0.4]);
        let dp = convex_double_point(&a, &ball, &x, 1e-12).unwrap();
        let dot: f64 = dp
            .direction
            .iter()
            .zip(x.coords())
            .map(|(a, b)| a * b)
            .sum();
        assert!(dot.abs() < 1e-9, "{dot}");
        assert!(dp.boundary_residuals.0 < 1e-9 && dp.boundary_residuals.1 < 1e-9);
    }

    #[test]
    fn identity_returns_first_direction() {
        let a = algebras::abelian(2);
        let ball = EuclideanBall {
            dim: 2,
            radius: 1.0,
        };
        let dp = convex_double_point(&a, &ball, &GroupElement::identity(2), 1e-12).unwrap();
        assert_eq!(dp.residual, 0.0);
        assert_eq!(dp.direction, vec![1.0, 0.0]);
    }

    #[test]
    fn koranyi_ball_in_heisenberg() {
        let h = algebras::heisenberg(1);
        let x = GroupElement::new(vec![0.3, 0.0, 0.0]);
        let dp = convex_double_point(&h, &KoranyiBall { m: 1 }, &x, 1e-10).unwrap();
        assert!(dp.residual < 1e-8);
        assert!(dp.boundary_residuals.0 < 1e-8 && dp.boundary_residuals.1 < 1e-8);
    }

    #[test]
    fn one_dimensional_kernel_rejected() {
        let a = algebras::abelian(1);
        let err = convex_double_point(
            &a,
            &EuclideanBall {
                dim: 1,
                radius: 1.0,
            },
            &GroupElement::new(vec![0.2]),
            1e-10,
        );
        assert_eq!(err.unwrap_err(), Error::KernelTooSmall { dim: 1 });
    }
}
