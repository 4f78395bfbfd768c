//! Grid realisations of averaging, maximal, Littlewood-Paley and square
//! function operators.

mod norm;

pub use norm::{op_norm_l2, op_norm_l2_chain, NormEstimate};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::group::scale_pow;
use crate::measure::{dilate_measure, DiscreteMeasure};
use crate::{par, rng};

/// `A[sigma] f(x) = sum_i w_i f(x y_i^-1)` with multilinear interpolation.
pub fn average(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    sigma: &DiscreteMeasure,
) -> Result<GridFunction> {
    Ok(average_many(alg, &[f], sigma)?.pop().expect("one input"))
}

/// [`average`] applied to several functions on one grid, sharing the
/// per-point setup.
pub fn average_many(
    alg: &GradedLieAlgebra,
    fs: &[&GridFunction],
    sigma: &DiscreteMeasure,
) -> Result<Vec<GridFunction>> {
    average_window(alg, fs, sigma, None)
}

/// Inclusive node-index box; outputs outside it are left at zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IndexBox {
    pub lo: Vec<usize>,
    pub hi: Vec<usize>,
}

impl IndexBox {
    fn holds_row(&self, grid: &Grid, row: usize) -> bool {
        let n = grid.dim();
        let r = grid.resolution()[n - 1];
        (0..n - 1).all(|a| {
            let i = (row * r / grid.strides()[a]) % grid.resolution()[a];
            self.lo[a] <= i && i <= self.hi[a]
        })
    }
}

pub(crate) fn average_window(
    alg: &GradedLieAlgebra,
    fs: &[&GridFunction],
    sigma: &DiscreteMeasure,
    window: Option<&IndexBox>,
) -> Result<Vec<GridFunction>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let grid = first.grid();
    let n = alg.dim();
    if grid.dim() != n || sigma.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.dim().min(sigma.dim()),
        });
    }
    if fs.iter().any(|f| f.grid() != grid) {
        return invalid("all inputs must share one grid");
    }
    let vals: Vec<&[f64]> = fs.iter().map(|f| f.values()).collect();
    let active: Vec<usize> = (0..sigma.len())
        .filter(|&i| sigma.weights()[i] != 0.0)
        .collect();
    let full = IndexBox {
        lo: vec![0; n],
        hi: grid.resolution().iter().map(|r| r - 1).collect(),
    };
    let window = window.unwrap_or(&full);
    let out = if alg.last_coordinate_additive() {
        average_lines(alg, grid, &vals, sigma, &active, window)
    } else {
        average_nodes(alg, grid, &vals, sigma, &active, window)
    };
    out.into_iter()
        .map(|v| GridFunction::new(grid.clone(), v))
        .collect()
}

/// Fast path: the last coordinate of `x y^-1` is `x_n + c(x', y)`, so every
/// (row, point) pair is a constant sub-cell shift along the contiguous axis.
fn average_lines(
    alg: &GradedLieAlgebra,
    grid: &Grid,
    vals: &[&[f64]],
    sigma: &DiscreteMeasure,
    active: &[usize],
    window: &IndexBox,
) -> Vec<Vec<f64>> {
    let n = alg.dim();
    let nv = vals.len();
    let res = grid.resolution();
    let strides = grid.strides();
    let h = grid.spacings();
    let lo = grid.lo();
    let r = res[n - 1];
    let rows = grid.len() / r;
    let m = n - 1;
    let corners = 1usize << m;
    let inv: Vec<f64> = sigma.points().iter().map(|v| -v).collect();
    let live: Vec<bool> = (0..rows)
        .map(|q| {
            vals.iter()
                .any(|f| f[q * r..(q + 1) * r].iter().any(|&v| v != 0.0))
        })
        .collect();
    let rows_out = par::map_indexed(rows, |row| {
        let mut out = vec![0.0; nv * r];
        if !window.holds_row(grid, row) {
            return out;
        }
        let mut x = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut line = vec![0.0; r + 1];
        let mut cw = vec![0.0; corners];
        let mut co = vec![0usize; corners];
        grid.node_into(row * r, &mut x);
        x[n - 1] = 0.0;
        for &i in active {
            let w = sigma.weights()[i];
            alg.law_f64(&x, &inv[i * n..(i + 1) * n], &mut z);
            let mut lower = [0i64; 16];
            let mut frac = [0.0f64; 16];
            let mut inside = true;
            for a in 0..m {
                let s = (z[a] - lo[a]) / h[a];
                if !(s > -1.0 && s < res[a] as f64) {
                    inside = false;
                    break;
                }
                let i0 = s.floor();
                frac[a] = s - i0;
                lower[a] = i0 as i64;
            }
            if !inside {
                continue;
            }
            let mut nc = 0;
            'corner: for mask in 0..corners {
                let mut cwt = 1.0;
                let mut off = 0;
                for a in 0..m {
                    let (i, wa) = if mask >> a & 1 == 1 {
                        (lower[a] + 1, frac[a])
                    } else {
                        (lower[a], 1.0 - frac[a])
                    };
                    if wa == 0.0 || i < 0 || i >= res[a] as i64 {
                        continue 'corner;
                    }
                    cwt *= wa;
                    off += i as usize * strides[a];
                }
                if live[off / r] {
                    cw[nc] = cwt;
                    co[nc] = off;
                    nc += 1;
                }
            }
            if nc == 0 {
                continue;
            }
            // out[j] = (1 - a) g[j + q] + a g[j + q + 1], g zero off the row
            let delta = z[n - 1] / h[n - 1];
            let q = delta.floor();
            let a = delta - q;
            let q = q as i64;
            let ri = r as i64;
            let need_next = a > 0.0;
            let j_lo = (-q - need_next as i64).max(window.lo[m] as i64);
            let j_hi = (ri - 1 - q).min(window.hi[m] as i64);
            if j_hi < j_lo {
                continue;
            }
            let t_lo = j_lo + q;
            let t_hi = j_hi + q + need_next as i64;
            let (s_lo, s_hi) = (t_lo.max(0) as usize, t_hi.min(ri - 1) as usize);
            let pad = (s_lo as i64 - t_lo) as usize;
            for (v, f) in vals.iter().enumerate() {
                let seg = &mut line[..=(t_hi - t_lo) as usize];
                seg.iter_mut().for_each(|s| *s = 0.0);
                for c in 0..nc {
                    let src = &f[co[c] + s_lo..=co[c] + s_hi];
                    let cwc = cw[c];
                    for (s, &fv) in seg[pad..].iter_mut().zip(src) {
                        *s += cwc * fv;
                    }
                }
                let dst = &mut out[v * r + j_lo as usize..=v * r + j_hi as usize];
                if need_next {
                    let (wa, wb) = (w * (1.0 - a), w * a);
                    for (k, o) in dst.iter_mut().enumerate() {
                        *o += wa * seg[k] + wb * seg[k + 1];
                    }
                } else {
                    for (k, o) in dst.iter_mut().enumerate() {
                        *o += w * seg[k];
                    }
                }
            }
        }
        out
    });
    let mut result = vec![vec![0.0; grid.len()]; nv];
    for (row, block) in rows_out.into_iter().enumerate() {
        for v in 0..nv {
            result[v][row * r..(row + 1) * r].copy_from_slice(&block[v * r..(v + 1) * r]);
        }
    }
    result
}

/// General path: full group law and interpolation at every node.
fn average_nodes(
    alg: &GradedLieAlgebra,
    grid: &Grid,
    vals: &[&[f64]],
    sigma: &DiscreteMeasure,
    active: &[usize],
    window: &IndexBox,
) -> Vec<Vec<f64>> {
    let n = alg.dim();
    let r = grid.resolution()[n - 1];
    let rows = grid.len() / r;
    let inv: Vec<f64> = sigma.points().iter().map(|v| -v).collect();
    let funcs: Vec<GridFunction> = vals
        .iter()
        .map(|v| GridFunction::new(grid.clone(), v.to_vec()).expect("same grid"))
        .collect();
    let rows_out = par::map_indexed(rows, |row| {
        let mut out = vec![0.0; vals.len() * r];
        if !window.holds_row(grid, row) {
            return out;
        }
        let mut x = vec![0.0; n];
        let mut z = vec![0.0; n];
        for j in window.lo[n - 1]..=window.hi[n - 1] {
            grid.node_into(row * r + j, &mut x);
            for &i in active {
                alg.law_f64(&x, &inv[i * n..(i + 1) * n], &mut z);
                let w = sigma.weights()[i];
                for (v, f) in funcs.iter().enumerate() {
                    out[v * r + j] += w * f.interpolate(&z);
                }
            }
        }
        out
    });
    let mut result = vec![vec![0.0; grid.len()]; vals.len()];
    for (row, block) in rows_out.into_iter().enumerate() {
        for v in 0..vals.len() {
            result[v][row * r..(row + 1) * r].copy_from_slice(&block[v * r..(v + 1) * r]);
        }
    }
    result
}

/// `max_{k_lo <= k <= k_hi} |A[sigma_k] f|` nodewise.
pub fn lacunary_maximal(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    sigma: &DiscreteMeasure,
    k_lo: i32,
    k_hi: i32,
) -> Result<GridFunction> {
    if k_lo > k_hi {
        return invalid("empty scale window");
    }
    let mut best = GridFunction::zeros(f.grid().clone());
    for k in k_lo..=k_hi {
        let a = average(alg, f, &dilate_measure(alg, k, sigma))?;
        for (b, v) in best.values_mut().iter_mut().zip(a.values()) {
            *b = b.max(v.abs());
        }
    }
    Ok(best)
}

/// `(sum |f|^p cell_volume)^(1/p)`, or `max |f|` for infinite `p`.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let cv = f.grid().cell_volume();
    let s: f64 = if p == 2.0 {
        f.values().iter().map(|v| v * v).sum()
    } else if p == 1.0 {
        f.values().iter().map(|v| v.abs()).sum()
    } else {
        f.values().iter().map(|v| v.abs().powf(p)).sum()
    };
    Ok((s * cv).powf(1.0 / p))
}

/// Builds the Littlewood-Paley generator from a normalised bump `phi`.
///
/// With `h = Q phi + sum_j lambda_j x_j d_j phi` (centred differences) and
/// `h_t = t^-Q h o delta_{1/t}`, returns `psi = int_1^2 h_t dt / t` by the
/// composite midpoint rule on `t_nodes` nodes. The small interpolation
/// residual in the mean is removed by subtracting a multiple of `phi`; the
/// output is flagged mean-zero.
pub fn build_psi(
    alg: &GradedLieAlgebra,
    phi: &GridFunction,
    t_nodes: usize,
) -> Result<GridFunction> {
    let grid = phi.grid();
    let n = alg.dim();
    if grid.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: grid.dim(),
        });
    }
    if t_nodes == 0 {
        return invalid("t_nodes must be positive");
    }
    let integral = phi.quadrature();
    if (integral - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalized { integral });
    }
    let lam = alg.exponents_f64();
    let q = alg.q();
    let mut x = vec![0.0; n];
    let mut margin_ok = true;
    for (i, &v) in phi.values().iter().enumerate() {
        if v != 0.0 {
            grid.node_into(i, &mut x);
            for (a, xa) in x.iter_mut().enumerate() {
                *xa *= scale_pow(2.0, lam[a]);
            }
            margin_ok &= grid.contains(&x);
        }
    }
    if !margin_ok {
        return Err(Error::SupportTooLarge);
    }
    let h = generator_h(alg, phi);
    let len = grid.len();
    let dt = 1.0 / t_nodes as f64;
    let values = par::map_indexed(len, |i| {
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        grid.node_into(i, &mut x);
        let mut acc = 0.0;
        for m in 0..t_nodes {
            let t = 1.0 + (m as f64 + 0.5) * dt;
            for a in 0..n {
                y[a] = x[a] * scale_pow(t, -lam[a]);
            }
            acc += h.interpolate(&y) * t.powf(-q) * dt / t;
        }
        acc
    });
    let mut psi = GridFunction::new(grid.clone(), values)?;
    let resid = psi.quadrature();
    for (p, v) in psi.values_mut().iter_mut().zip(phi.values()) {
        *p -= resid * v;
    }
    psi.set_mean_zero(true);
    Ok(psi)
}

/// `h = Q phi + sum_j lambda_j x_j d_j phi` with centred differences.
pub fn generator_h(alg: &GradedLieAlgebra, phi: &GridFunction) -> GridFunction {
    let grid = phi.grid();
    let n = grid.dim();
    let lam = alg.exponents_f64();
    let q = alg.q();
    let res = grid.resolution().to_vec();
    let strides = grid.strides().to_vec();
    let hs = grid.spacings().to_vec();
    let f = phi.values();
    let values = par::map_indexed(grid.len(), |i| {
        let mut x = vec![0.0; n];
        grid.node_into(i, &mut x);
        let mut acc = q * f[i];
        for a in 0..n {
            let pos = (i / strides[a]) % res[a];
            if pos == 0 || pos + 1 == res[a] {
                continue;
            }
            let d = (f[i + strides[a]] - f[i - strides[a]]) / (2.0 * hs[a]);
            acc += lam[a] * x[a] * d;
        }
        acc
    });
    GridFunction::new(grid.clone(), values).expect("finite differences of finite data")
}

/// Default cloud cell size of [`lp_pieces`], in target grid cells.
pub const DEFAULT_CAP_CELLS: f64 = 4.0;

/// Cells per axis needed before `psi_k` is resampled instead of lumped.
const RESOLVE: f64 = 8.0;

/// Largest cloud [`PsiClouds::cloud`] will build.
const MAX_CLOUD_POINTS: usize = 2_000_000;

/// `f * psi_k` with `psi` given on its own grid, using [`PsiClouds`] with
/// [`DEFAULT_CAP_CELLS`].
pub fn lp_pieces(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    psi: &GridFunction,
    k: i32,
) -> Result<GridFunction> {
    let clouds = PsiClouds::new(alg, psi, f, DEFAULT_CAP_CELLS)?;
    lp_piece(alg, f, &clouds.cloud(k)?, 0)
}

/// Scale-adapted point clouds for `psi_k = 2^-kQ psi o delta_{2^-k}`.
///
/// Cloud cells never exceed `cap_cells` target cells per axis. When the
/// dilated nodes of `psi` are finer than that, blocks of nodes are lumped
/// (mass and first moments kept). Otherwise `psi_k` is resampled at cell
/// midpoints, restricted to the window of translations that can carry the
/// support of `f` back into the target box.
#[derive(Clone, Debug)]
pub struct PsiClouds<'a> {
    alg: &'a GradedLieAlgebra,
    psi: &'a GridFunction,
    cap: Vec<f64>,
    window: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl<'a> PsiClouds<'a> {
    pub fn new(
        alg: &'a GradedLieAlgebra,
        psi: &'a GridFunction,
        f: &GridFunction,
        cap_cells: f64,
    ) -> Result<Self> {
        let n = alg.dim();
        for g in [psi.grid(), f.grid()] {
            if g.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.dim(),
                });
            }
        }
        if !(cap_cells > 0.0 && cap_cells.is_finite()) {
            return invalid("cap_cells must be positive");
        }
        let fg = f.grid();
        let cap = fg.spacings().iter().map(|h| cap_cells * h).collect();
        let box_bound: Vec<f64> = (0..n).map(|a| fg.lo()[a].abs().max(fg.hi()[a].abs())).collect();
        let (flo, fhi) = nonzero_bounds(f);
        let f_bound: Vec<f64> = (0..n).map(|a| flo[a].abs().max(fhi[a].abs())).collect();
        // y = z^-1 x with z in supp f and x in the box; inversion is negation.
        let window = alg.law_abs_bound(&f_bound, &box_bound);
        // interpolation reaches one node past the nonzero ones
        let (mut lo, mut hi) = nonzero_bounds(psi);
        for (a, h) in psi.grid().spacings().iter().enumerate() {
            lo[a] -= h;
            hi[a] += h;
        }
        Ok(Self {
            alg,
            psi,
            cap,
            window,
            lo,
            hi,
        })
    }

    /// Cloud realising `psi_k`, flagged mean-zero when `psi` is.
    pub fn cloud(&self, k: i32) -> Result<DiscreteMeasure> {
        let alg = self.alg;
        let n = alg.dim();
        let lam = alg.exponents_f64();
        let scale: Vec<f64> = lam.iter().map(|&l| scale_pow(2.0, k as f64 * l)).collect();
        let hs = self.psi.grid().spacings();
        let mut lo = vec![0.0; n];
        let mut cells = vec![0usize; n];
        let mut step = vec![0.0; n];
        let mut empty = false;
        for a in 0..n {
            let l = (self.lo[a] * scale[a]).max(-self.window[a]);
            let h = (self.hi[a] * scale[a]).min(self.window[a]);
            empty |= l > h;
            let c = ((h - l).max(0.0) / self.cap[a]).ceil().clamp(1.0, 1e12);
            cells[a] = c as usize;
            step[a] = (h - l).max(0.0) / c;
            lo[a] = l;
        }
        let resampled: f64 = cells.iter().map(|&c| c as f64).product();
        // midpoint sampling is trusted once psi_k spans RESOLVE cells per axis;
        // lumping keeps up to two points per block but needs no window
        let resolved = (0..n).all(|a| (self.hi[a] - self.lo[a]) * scale[a] >= RESOLVE * self.cap[a]);
        if (0..n).all(|a| hs[a] * scale[a] <= self.cap[a]) {
            let blocks: Vec<usize> = (0..n)
                .map(|a| ((self.cap[a] / (hs[a] * scale[a])).floor() as usize).max(1))
                .collect();
            let lumped: f64 = (0..n)
                .map(|a| ((self.hi[a] - self.lo[a]) / hs[a] / blocks[a] as f64).ceil() + 1.0)
                .product::<f64>()
                * 2.0;
            if empty || !resolved || lumped <= resampled {
                let m = self.psi.to_measure_blocked(alg, &blocks)?;
                return Ok(dilate_measure(alg, k, &m));
            }
        }
        if empty {
            return zero_cloud(alg, self.psi.is_mean_zero());
        }
        if resampled > MAX_CLOUD_POINTS as f64 {
            return Err(Error::SupportTooLarge);
        }
        let count = resampled as usize;
        // zero-width axes still carry the psi mass of one node layer
        let vol: f64 = (0..n)
            .map(|a| if step[a] > 0.0 { step[a] } else { hs[a] * scale[a] })
            .product();
        let amp = scale_pow(2.0, -(k as f64) * alg.q());
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        for idx in 0..count {
            let mut rem = idx;
            for a in (0..n).rev() {
                let i = rem % cells[a];
                rem /= cells[a];
                c[a] = lo[a] + (i as f64 + 0.5) * step[a];
                y[a] = c[a] / scale[a];
            }
            let v = self.psi.interpolate(&y);
            if v != 0.0 {
                points.extend_from_slice(&c);
                weights.push(amp * v * vol);
            }
        }
        if weights.is_empty() {
            return zero_cloud(alg, self.psi.is_mean_zero());
        }
        let m = DiscreteMeasure::new(alg, points, weights)?;
        Ok(if self.psi.is_mean_zero() {
            m.with_mean_zero_forced()
        } else {
            m
        })
    }
}

fn zero_cloud(alg: &GradedLieAlgebra, mean_zero: bool) -> Result<DiscreteMeasure> {
    let m = DiscreteMeasure::new(alg, vec![0.0; alg.dim()], vec![0.0])?;
    Ok(if mean_zero { m.with_mean_zero_forced() } else { m })
}

/// Coordinate bounding box of the nonzero nodes (the origin if there are none).
fn nonzero_bounds(f: &GridFunction) -> (Vec<f64>, Vec<f64>) {
    let n = f.grid().dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let mut x = vec![0.0; n];
    for (i, &v) in f.values().iter().enumerate() {
        if v != 0.0 {
            f.grid().node_into(i, &mut x);
            for a in 0..n {
                lo[a] = lo[a].min(x[a]);
                hi[a] = hi[a].max(x[a]);
            }
        }
    }
    if lo[0] > hi[0] {
        return (vec![0.0; n], vec![0.0; n]);
    }
    (lo, hi)
}

/// `f * psi_k` where `psi_k` is the `delta_{2^k}` image of the cloud `psi`.
pub fn lp_piece(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    psi: &DiscreteMeasure,
    k: i32,
) -> Result<GridFunction> {
    let mut out = average(alg, f, &dilate_measure(alg, k, psi))?;
    out.set_mean_zero(psi.is_mean_zero());
    Ok(out)
}

/// IID signs `r_k` over a window of scales.
#[derive(Clone, Debug, PartialEq)]
pub struct SignSequence {
    pub signs: BTreeMap<i32, i8>,
    pub seed: u64,
}

impl SignSequence {
    pub fn random(ks: &[i32], seed: u64) -> Self {
        let mut rng = rng::stream(seed, 13);
        let signs = ks
            .iter()
            .map(|&k| (k, if rng.gen::<bool>() { 1 } else { -1 }))
            .collect();
        Self { signs, seed }
    }

    pub fn constant(ks: &[i32], sign: i8) -> Self {
        Self {
            signs: ks.iter().map(|&k| (k, sign.signum())).collect(),
            seed: 0,
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|(&k, &s)| (k, -s)).collect(),
            seed: self.seed,
        }
    }
}

/// The pieces `T_l^k f = (f * psi_{k+l}) * nu_k` for `k` in the window.
pub fn square_pieces(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    nu: &DiscreteMeasure,
    psi: &DiscreteMeasure,
    l: i32,
    ks: &[i32],
) -> Result<Vec<GridFunction>> {
    if !nu.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    ks.iter()
        .map(|&k| {
            let lp = lp_piece(alg, f, psi, k + l)?;
            average(alg, &lp, &dilate_measure(alg, k, nu))
        })
        .collect()
}

/// `S_l f = (sum_k |T_l^k f|^2)^(1/2)` over the window.
pub fn square_function(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    nu: &DiscreteMeasure,
    psi: &DiscreteMeasure,
    l: i32,
    ks: &[i32],
) -> Result<GridFunction> {
    let pieces = square_pieces(alg, f, nu, psi, l, ks)?;
    Ok(square_of(f.grid(), &pieces))
}

/// Nodewise `sqrt(sum_k piece_k^2)`.
pub fn square_of(grid: &Grid, pieces: &[GridFunction]) -> GridFunction {
    let mut acc = vec![0.0; grid.len()];
    for p in pieces {
        for (a, v) in acc.iter_mut().zip(p.values()) {
            *a += v * v;
        }
    }
    acc.iter_mut().for_each(|a| *a = a.sqrt());
    GridFunction::new(grid.clone(), acc).expect("finite")
}

/// `T_{l,r} f = sum_k r_k T_l^k f`.
pub fn randomized_sum(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    nu: &DiscreteMeasure,
    psi: &DiscreteMeasure,
    l: i32,
    ks: &[i32],
    signs: &SignSequence,
) -> Result<GridFunction> {
    check_signs(ks, signs)?;
    let pieces = square_pieces(alg, f, nu, psi, l, ks)?;
    signed_sum(f.grid(), ks, &pieces, signs)
}

fn check_signs(ks: &[i32], signs: &SignSequence) -> Result<()> {
    match ks.iter().find(|k| !signs.signs.contains_key(k)) {
        Some(&missing) => Err(Error::SignsIncomplete { missing }),
        None => Ok(()),
    }
}

/// `sum_k r_k piece_k` for precomputed pieces.
pub fn signed_sum(
    grid: &Grid,
    ks: &[i32],
    pieces: &[GridFunction],
    signs: &SignSequence,
) -> Result<GridFunction> {
    check_signs(ks, signs)?;
    let mut acc = vec![0.0; grid.len()];
    for (k, p) in ks.iter().zip(pieces) {
        let s = f64::from(signs.signs[k]);
        for (a, v) in acc.iter_mut().zip(p.values()) {
            *a += s * v;
        }
    }
    GridFunction::new(grid.clone(), acc)
}
