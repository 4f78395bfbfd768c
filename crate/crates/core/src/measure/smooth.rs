//! Kernel density estimates of point clouds and their translation moduli.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use super::{conv_product, DiscreteMeasure};
use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Error, Result};
use crate::fit::{DecayFit, FitFlag};
use crate::grid::{Grid, GridFunction};
use crate::group::dilate_in_place;
use crate::{par, rng};

/// Cubic B-spline with unit integral, supported on `[-2, 2]`.
pub(crate) fn bspline(s: f64) -> f64 {
    let a = s.abs();
    if a < 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

/// Index of the cloud point nearest (in cell units) to the coordinate-wise median.
fn median_point(sigma: &DiscreteMeasure, grid: &Grid) -> usize {
    let d = sigma.dim();
    let med: Vec<f64> = (0..d)
        .map(|a| {
            let mut c: Vec<f64> = sigma.points().chunks(d).map(|p| p[a]).collect();
            c.sort_by(|x, y| x.partial_cmp(y).unwrap());
            c[c.len() / 2]
        })
        .collect();
    let h = grid.spacings();
    (0..sigma.len())
        .min_by(|&i, &j| {
            let di = dist_cells(sigma.point(i), &med, h);
            let dj = dist_cells(sigma.point(j), &med, h);
            di.partial_cmp(&dj).unwrap()
        })
        .unwrap_or(0)
}

fn dist_cells(p: &[f64], q: &[f64], h: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .zip(h)
        .fold(0.0, |m, ((a, b), s)| m.max((a - b).abs() / s))
}

/// Density of `sigma` on `grid` from a product cubic B-spline kernel whose
/// width is `bandwidth` cells per axis (support `+-2 bandwidth` cells).
///
/// Fails with `BandwidthTooSmall` when fewer than 8 cloud points lie within
/// one bandwidth of the median point.
pub fn density_estimate(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    grid: &Grid,
    bandwidth: f64,
) -> Result<GridFunction> {
    let d = grid.dim();
    if sigma.dim() != d || alg.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sigma.dim(),
        });
    }
    if !(bandwidth > 0.0) {
        return invalid("bandwidth must be positive");
    }
    let h = grid.spacings();
    let centre = median_point(sigma, grid);
    let neighbours = sigma
        .points()
        .chunks(d)
        .filter(|p| dist_cells(p, sigma.point(centre), h) <= bandwidth)
        .count();
    if neighbours < 8 {
        return Err(Error::BandwidthTooSmall { neighbours });
    }
    let res = grid.resolution();
    let strides = grid.strides();
    let mut values = vec![0.0; grid.len()];
    let mut axes: Vec<Vec<(usize, f64)>> = vec![Vec::new(); d];
    let mut counter = vec![0usize; d];
    for (p, &w) in sigma.points().chunks(d).zip(sigma.weights()) {
        if w == 0.0 {
            continue;
        }
        let mut empty = false;
        for a in 0..d {
            axes[a].clear();
            let c = (p[a] - grid.lo()[a]) / h[a];
            let lo = (c - 2.0 * bandwidth).ceil().max(0.0) as i64;
            let hi = ((c + 2.0 * bandwidth).floor() as i64).min(res[a] as i64 - 1);
            for i in lo..=hi {
                let k = bspline((i as f64 - c) / bandwidth) / (bandwidth * h[a]);
                if k > 0.0 {
                    axes[a].push((i as usize * strides[a], k));
                }
            }
            empty |= axes[a].is_empty();
        }
        if empty {
            continue;
        }
        counter.iter_mut().for_each(|c| *c = 0);
        'outer: loop {
            let mut idx = 0;
            let mut k = w;
            for a in 0..d {
                let (o, v) = axes[a][counter[a]];
                idx += o;
                k *= v;
            }
            values[idx] += k;
            for a in (0..d).rev() {
                counter[a] += 1;
                if counter[a] < axes[a].len() {
                    continue 'outer;
                }
                counter[a] = 0;
            }
            break;
        }
    }
    GridFunction::new(grid.clone(), values)
}

/// `(int |h(x y^-1) - h(x)| dx, int |h(y^-1 x) - h(x)| dx)` by quadrature.
///
/// Fails with `OutOfDomain` when a translate of the support of `h` leaves the box.
pub fn ca_modulus(alg: &GradedLieAlgebra, h: &GridFunction, y: &[f64]) -> Result<(f64, f64)> {
    let grid = h.grid();
    let n = alg.dim();
    if grid.dim() != n || y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if y.iter().all(|&v| v == 0.0) {
        return Ok((0.0, 0.0));
    }
    let yinv: Vec<f64> = y.iter().map(|v| -v).collect();
    let row = grid.resolution()[n - 1];
    let rows = grid.len() / row;
    let parts = par::map_indexed(rows, |r| {
        let mut x = vec![0.0; n];
        let mut z = vec![0.0; n];
        let (mut left, mut right, mut escaped) = (0.0, 0.0, false);
        for i in r * row..(r + 1) * row {
            grid.node_into(i, &mut x);
            let hx = h.values()[i];
            if hx != 0.0 {
                alg.law_f64(&x, y, &mut z);
                escaped |= !grid.contains(&z);
                alg.law_f64(y, &x, &mut z);
                escaped |= !grid.contains(&z);
            }
            alg.law_f64(&x, &yinv, &mut z);
            left += (h.interpolate(&z) - hx).abs();
            alg.law_f64(&yinv, &x, &mut z);
            right += (h.interpolate(&z) - hx).abs();
        }
        (left, right, escaped)
    });
    let cv = grid.cell_volume();
    let mut out = (0.0, 0.0);
    for (l, r, e) in parts {
        if e {
            return Err(Error::OutOfDomain);
        }
        out.0 += l;
        out.1 += r;
    }
    Ok((out.0 * cv, out.1 * cv))
}

/// Outcome of a translation-modulus sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct CaFit {
    /// Growth fit of the modulus against `log2 r`; `exponent` is the estimate of `gamma`.
    pub fit: DecayFit,
    pub radii: Vec<f64>,
    /// Worst modulus over the sampled directions at each radius.
    pub moduli: Vec<f64>,
    /// `int |h|`; the modulus never exceeds twice this.
    pub l1_norm: f64,
}

/// Random group elements of homogeneous norm exactly 1.
pub(crate) fn unit_sphere_elements(
    alg: &GradedLieAlgebra,
    count: usize,
    seed: u64,
) -> Vec<Vec<f64>> {
    let n = alg.dim();
    let mut rng = rng::stream(seed, 7);
    (0..count)
        .map(|_| {
            let mut y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let j = rng.gen_range(0..n);
            y[j] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            y
        })
        .collect()
}

/// Fits the (CA) exponent of `sigma^(N)`: smooths the convolution power on
/// `grid`, measures the translation modulus at `|y| = r` for each radius and
/// regresses `log2` modulus on `log2 r`.
#[allow(clippy::too_many_arguments)]
pub fn ca_exponent_fit(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    n: usize,
    radii: &[f64],
    grid: &Grid,
    bandwidth: f64,
    directions: usize,
    max_points: usize,
    seed: u64,
) -> Result<CaFit> {
    if radii.len() < 4 || radii.iter().any(|&r| !(r > 0.0)) {
        return invalid("need at least four positive radii");
    }
    let (lo, hi) = radii
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if hi / lo < 4.0 {
        return invalid("radii must span at least two octaves");
    }
    let power = conv_product(alg, sigma, n, max_points, seed)?;
    let h = density_estimate(alg, &power, grid, bandwidth)?;
    let units = unit_sphere_elements(alg, directions.max(1), rng::derive(seed, 11));
    let mut moduli = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst = 0.0f64;
        for u in &units {
            let mut y = u.clone();
            dilate_in_place(alg, r, &mut y);
            let (l, rr) = ca_modulus(alg, &h, &y)?;
            worst = worst.max(l).max(rr);
        }
        moduli.push(worst);
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.log2()).collect();
    let mut fit = DecayFit::growth(&xs, &moduli);
    let l1 = h.abs_quadrature();
    let smallest = radii
        .iter()
        .zip(&moduli)
        .min_by(|a, b| a.0.partial_cmp(b.0).unwrap())
        .map(|(_, m)| *m)
        .unwrap_or(0.0);
    if !(fit.exponent > 0.1) || smallest >= l1 {
        fit.push_flag(FitFlag::Saturated);
    }
    Ok(CaFit {
        fit,
        radii: radii.to_vec(),
        moduli,
        l1_norm: l1,
    })
}
