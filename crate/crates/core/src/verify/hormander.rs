use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::group::{hom_norm_raw, scale_pow, GroupElement};
use crate::measure::DiscreteMeasure;
use crate::operator::average;
use crate::par;

/// The kernel `K = psi_l * nu` on a grid with its measured support radius.
#[derive(Clone, Debug, PartialEq)]
pub struct HormanderKernel {
    pub l: i32,
    pub values: GridFunction,
    /// Largest homogeneous norm reached by the interpolation support of `K`.
    pub support_radius: f64,
    pub l1_norm: f64,
    support: Vec<usize>,
}

impl HormanderKernel {
    /// Radius beyond which `I_l^k(y)` vanishes: `2 R 2^k`.
    pub fn vanishing_radius(&self, k: i32) -> f64 {
        2.0 * self.support_radius * 2f64.powi(k)
    }
}

/// Samples `psi_l = 2^(-lQ) psi o delta_{2^-l}` on `grid` and convolves with `nu`.
///
/// Fails with `SupportTooLarge` when `K` does not vanish on the boundary of the box.
pub fn hormander_kernel(
    alg: &GradedLieAlgebra,
    psi: &GridFunction,
    nu: &DiscreteMeasure,
    l: i32,
    grid: &Grid,
) -> Result<HormanderKernel> {
    let n = alg.dim();
    if grid.dim() != n || psi.grid().dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    let lam = alg.exponents_f64();
    let t = 2f64.powi(-l);
    let amp = 2f64.powf(-f64::from(l) * alg.q());
    let psi_l = GridFunction::from_fn(grid.clone(), |x| {
        let y: Vec<f64> = x
            .iter()
            .zip(lam)
            .map(|(v, &a)| v * scale_pow(t, a))
            .collect();
        amp * psi.interpolate(&y)
    });
    let values = average(alg, &psi_l, nu)?;
    let res = grid.resolution();
    let strides = grid.strides();
    let h = grid.spacings();
    let mut x = vec![0.0; n];
    let mut support = Vec::new();
    let mut radius = 0.0f64;
    for (i, &v) in values.values().iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        if (0..n).any(|a| {
            let p = (i / strides[a]) % res[a];
            p == 0 || p + 1 == res[a]
        }) {
            return Err(Error::SupportTooLarge);
        }
        grid.node_into(i, &mut x);
        for a in 0..n {
            x[a] = x[a].abs() + h[a];
        }
        radius = radius.max(hom_norm_raw(lam, &x));
        support.push(i);
    }
    let l1_norm = values.abs_quadrature();
    Ok(HormanderKernel {
        l,
        values,
        support_radius: radius,
        l1_norm,
        support,
    })
}

/// `I_l^k(y) = int_{|x| >= c0 |z|} |K(z^-1 x) - K(x)| dx` with `z = delta_{2^-k} y`.
///
/// Fails with `SupportTooLarge` when part of the translated support that lies
/// in the integration region falls outside the box.
pub fn hormander_integral(
    alg: &GradedLieAlgebra,
    kernel: &HormanderKernel,
    k: i32,
    y: &GroupElement,
    c0: f64,
) -> Result<f64> {
    let n = alg.dim();
    if y.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.dim(),
        });
    }
    let lam = alg.exponents_f64();
    let s = 2f64.powi(-k);
    let z: Vec<f64> = y
        .coords()
        .iter()
        .zip(lam)
        .map(|(v, &a)| v * scale_pow(s, a))
        .collect();
    if z.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let cut = c0 * hom_norm_raw(lam, &z);
    let kf = &kernel.values;
    let grid = kf.grid();
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for &i in &kernel.support {
        grid.node_into(i, &mut x);
        alg.law_f64(&z, &x, &mut w);
        if !grid.contains(&w) && hom_norm_raw(lam, &w) >= cut {
            return Err(Error::SupportTooLarge);
        }
    }
    let zinv: Vec<f64> = z.iter().map(|v| -v).collect();
    let row = grid.resolution()[n - 1];
    let parts = par::map_indexed(grid.len() / row, |r| {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut acc = 0.0;
        for i in r * row..(r + 1) * row {
            grid.node_into(i, &mut x);
            if hom_norm_raw(lam, &x) < cut {
                continue;
            }
            alg.law_f64(&zinv, &x, &mut w);
            acc += (kf.interpolate(&w) - kf.values()[i]).abs();
        }
        acc
    });
    Ok(parts.iter().sum::<f64>() * grid.cell_volume())
}

/// `sum_k I_l^k(y)` over a finite window.
#[derive(Clone, Debug, PartialEq)]
pub struct HormanderSum {
    pub ks: Vec<i32>,
    pub terms: Vec<f64>,
    pub sum: f64,
}

impl HormanderSum {
    /// Whether the sum obeys the expected bound with constant `c`:
    /// `c` for `l >= 0` and `c (1 + |l|)` for `l < 0`.
    pub fn within(&self, c: f64, l: i32) -> bool {
        let bound = if l >= 0 {
            c
        } else {
            c * (1.0 + f64::from(l.unsigned_abs()))
        };
        self.sum <= bound
    }
}

/// Sums `I_l^k(y)` for `k_lo <= k <= k_hi`; fails with `WindowTooSmall` when
/// either end term exceeds `1e-6 max(1, ||K||_1)`.
pub fn hormander_sum(
    alg: &GradedLieAlgebra,
    kernel: &HormanderKernel,
    y: &GroupElement,
    k_lo: i32,
    k_hi: i32,
    c0: f64,
) -> Result<HormanderSum> {
    if k_lo > k_hi {
        return Err(Error::InvalidArgument("empty scale window".into()));
    }
    let ks: Vec<i32> = (k_lo..=k_hi).collect();
    let terms = ks
        .iter()
        .map(|&k| hormander_integral(alg, kernel, k, y, c0))
        .collect::<Result<Vec<_>>>()?;
    let tol = 1e-6 * kernel.l1_norm.max(1.0);
    if terms[0] > tol {
        return Err(Error::WindowTooSmall {
            boundary: k_lo,
            term: terms[0],
        });
    }
    if terms[terms.len() - 1] > tol {
        return Err(Error::WindowTooSmall {
            boundary: k_hi,
            term: terms[terms.len() - 1],
        });
    }
    let sum = terms.iter().sum();
    Ok(HormanderSum { ks, terms, sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;

    fn setup() -> (GradedLieAlgebra, HormanderKernel) {
        let a = algebras::abelian(1);
        let pg = Grid::cube(1, 1.0, 129).unwrap();
        // odd bump: mean zero
        let psi = GridFunction::from_fn(pg, |x| {
            let s = 2.0 * x[0];
            if s.abs() < 1.0 {
                s * (1.0 - s * s).powi(2)
            } else {
                0.0
            }
        });
        let nu = DiscreteMeasure::new(&a, vec![-0.5, 0.5], vec![1.0, -1.0]).unwrap();
        let grid = Grid::cube(1, 4.0, 1025).unwrap();
        let k = hormander_kernel(&a, &psi, &nu, 0, &grid).unwrap();
        (a, k)
    }

    #[test]
    fn identity_translation_vanishes() {
        let (a, k) = setup();
        assert_eq!(
            hormander_integral(&a, &k, 0, &GroupElement::identity(1), 2.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn vanishes_beyond_radius() {
        let (a, k) = setup();
        let r = k.vanishing_radius(0);
        let v = hormander_integral(&a, &k, 0, &GroupElement::new(vec![1.01 * r]), 2.0).unwrap();
        assert!(v <= 1e-12, "{v}");
        let near = hormander_integral(&a, &k, 0, &GroupElement::new(vec![0.3]), 2.0).unwrap();
        assert!(near > 0.0);
    }

    #[test]
    fn window_must_capture_tails() {
        let (a, k) = setup();
        let y = GroupElement::new(vec![1.0]);
        assert!(matches!(
            hormander_sum(&a, &k, &y, -1, 2, 2.0),
            Err(Error::WindowTooSmall { boundary: 2, .. })
        ));
        let s = hormander_sum(&a, &k, &y, -3, 40, 2.0).unwrap();
        assert!(s.sum > 0.0 && s.terms.len() == 44);
    }
}
