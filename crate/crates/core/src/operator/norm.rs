//! L2 operator norms of convolution operators by power iteration.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::measure::{reflect_measure, DiscreteMeasure};
use crate::rng;

use super::{average_window, IndexBox};

const RESTARTS: usize = 3;

/// Factors are lumped to boxes of `spacing / LUMP` before iterating.
const LUMP: f64 = 16.0;

/// Estimate of `||f -> f * kernel||_{L2 -> L2}` on `grid`.
pub fn op_norm_l2(
    alg: &GradedLieAlgebra,
    kernel: &DiscreteMeasure,
    grid: &Grid,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<NormEstimate> {
    op_norm_l2_chain(alg, core::slice::from_ref(kernel), grid, iters, tol, seed)
}

/// Result of a power iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub norm: f64,
    pub iterations: usize,
    /// Final norm of each restart.
    pub restarts: Vec<f64>,
}

/// Norm of `f -> (..((f * k_1) * k_2) ..) * k_m` restricted to `grid`,
/// without forming the product cloud. Intermediates live on a padded grid so
/// that only the input and the final output are cut to the box. The adjoint
/// applies the reflected factors in reverse order. Factors are first lumped
/// to boxes of a sixteenth of a cell (see [`DiscreteMeasure::lumped`]).
pub fn op_norm_l2_chain(
    alg: &GradedLieAlgebra,
    factors: &[DiscreteMeasure],
    grid: &Grid,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<NormEstimate> {
    if iters == 0 {
        return Err(Error::InvalidArgument("iters must be at least 1".into()));
    }
    if factors.is_empty() || factors.iter().any(|k| k.total_variation() == 0.0) {
        return Ok(NormEstimate {
            norm: 0.0,
            iterations: 0,
            restarts: alloc::vec![0.0; RESTARTS],
        });
    }
    // sub-cell clusters act almost identically under interpolation
    let cell: Vec<f64> = grid.spacings().iter().map(|h| h / LUMP).collect();
    let factors = factors
        .iter()
        .map(|k| k.lumped(&cell))
        .collect::<Result<Vec<_>>>()?;
    let adjoint: Vec<DiscreteMeasure> = factors.iter().rev().map(reflect_measure).collect();
    let pad = Padding::new(alg, grid, &factors, &adjoint)?;
    let apply = |vs: Vec<GridFunction>, ks: &[DiscreteMeasure], windows: &[IndexBox]| {
        let mut vs: Vec<GridFunction> = vs.iter().map(|v| pad.embed(v)).collect();
        for (k, w) in ks.iter().zip(windows) {
            let refs: Vec<&GridFunction> = vs.iter().collect();
            vs = average_window(alg, &refs, k, Some(w))?;
        }
        Ok::<_, Error>(vs.iter().map(|v| pad.restrict(v, grid)).collect::<Vec<_>>())
    };
    let mut vs: Vec<GridFunction> = (0..RESTARTS)
        .map(|r| {
            let mut g = rng::stream(seed, 100 + r as u64);
            let vals = (0..grid.len()).map(|_| rng::normal(&mut g)).collect();
            normalised(GridFunction::new(grid.clone(), vals).expect("finite noise"))
        })
        .collect();
    let mut prev = [f64::NAN; RESTARTS];
    let mut last = [0.0; RESTARTS];
    for it in 1..=iters {
        let ws = apply(vs, &factors, &pad.forward)?;
        for (l, w) in last.iter_mut().zip(&ws) {
            *l = w.dot(w);
        }
        let top = last.iter().cloned().fold(0.0, f64::max);
        let top_prev = prev.iter().cloned().fold(f64::NAN, f64::max);
        if (top - top_prev).abs() <= tol * top || top == 0.0 {
            let restarts: Vec<f64> = last.iter().map(|l| l.sqrt()).collect();
            return Ok(NormEstimate {
                norm: top.sqrt(),
                iterations: it,
                restarts,
            });
        }
        prev = last;
        vs = apply(ws, &adjoint, &pad.backward)?
            .into_iter()
            .map(normalised)
            .collect();
    }
    let top = last.iter().cloned().fold(0.0, f64::max);
    let top_prev = prev.iter().cloned().fold(f64::NAN, f64::max);
    Err(Error::ConvergenceFailure {
        what: "power iteration",
        last: top,
        previous: top_prev,
    })
}

/// Enlarged grid holding the untruncated intermediates of a chain, with the
/// node window each step must fill so that the final output on the original
/// grid is exact.
struct Padding {
    grid: Grid,
    offset: Vec<usize>,
    forward: Vec<IndexBox>,
    backward: Vec<IndexBox>,
}

impl Padding {
    fn new(
        alg: &GradedLieAlgebra,
        grid: &Grid,
        forward: &[DiscreteMeasure],
        backward: &[DiscreteMeasure],
    ) -> Result<Self> {
        let n = grid.dim();
        let h = grid.spacings();
        let base: Vec<f64> = (0..n).map(|a| grid.lo()[a].abs().max(grid.hi()[a].abs())).collect();
        // bounds[i] covers every node read by the steps after i
        let reach = |ks: &[DiscreteMeasure]| -> Vec<Vec<f64>> {
            let mut out = vec![base.clone()];
            for k in ks[1..].iter().rev() {
                let yb = abs_bounds(k);
                let prev = out.last().expect("nonempty");
                let next: Vec<f64> = alg
                    .law_abs_bound(prev, &yb)
                    .iter()
                    .zip(h)
                    .map(|(b, h)| b + h)
                    .collect();
                out.push(next);
            }
            out.reverse();
            out
        };
        let fwd = reach(forward);
        let bwd = reach(backward);
        let mut offset = vec![0usize; n];
        let mut lo = grid.lo().to_vec();
        let mut hi = grid.hi().to_vec();
        let mut res = grid.resolution().to_vec();
        for a in 0..n {
            let b = fwd.iter().chain(&bwd).map(|v| v[a]).fold(0.0, f64::max);
            let below = ((grid.lo()[a] + b) / h[a]).ceil().max(0.0) as usize;
            let above = ((b - grid.hi()[a]) / h[a]).ceil().max(0.0) as usize;
            offset[a] = below;
            lo[a] -= below as f64 * h[a];
            hi[a] += above as f64 * h[a];
            res[a] += below + above;
        }
        let padded = Grid::new(lo, hi, res)?;
        let boxes = |bounds: &[Vec<f64>]| -> Vec<IndexBox> {
            bounds
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    if i + 1 == bounds.len() {
                        return IndexBox {
                            lo: offset.clone(),
                            hi: (0..n).map(|a| offset[a] + grid.resolution()[a] - 1).collect(),
                        };
                    }
                    let idx = |x: f64, a: usize| ((x - padded.lo()[a]) / h[a]).clamp(0.0, (padded.resolution()[a] - 1) as f64);
                    IndexBox {
                        lo: (0..n).map(|a| idx(-b[a], a).floor() as usize).collect(),
                        hi: (0..n).map(|a| idx(b[a], a).ceil() as usize).collect(),
                    }
                })
                .collect()
        };
        Ok(Self {
            forward: boxes(&fwd),
            backward: boxes(&bwd),
            grid: padded,
            offset,
        })
    }

    fn embed(&self, v: &GridFunction) -> GridFunction {
        if v.grid() == &self.grid {
            return v.clone();
        }
        let mut out = vec![0.0; self.grid.len()];
        self.copy_rows(v.grid(), |dst, src| out[dst].copy_from_slice(&v.values()[src]));
        GridFunction::new(self.grid.clone(), out).expect("finite values")
    }

    fn restrict(&self, v: &GridFunction, grid: &Grid) -> GridFunction {
        if grid == &self.grid {
            return v.clone();
        }
        let mut out = vec![0.0; grid.len()];
        self.copy_rows(grid, |dst, src| out[src].copy_from_slice(&v.values()[dst]));
        GridFunction::new(grid.clone(), out).expect("finite values")
    }

    /// Calls `f(padded_range, inner_range)` for each row of `inner`.
    fn copy_rows(&self, inner: &Grid, mut f: impl FnMut(core::ops::Range<usize>, core::ops::Range<usize>)) {
        let n = inner.dim();
        let r = inner.resolution()[n - 1];
        let mut idx = vec![0usize; n];
        for row in 0..inner.len() / r {
            let mut rem = row * r;
            let mut dst = self.offset[n - 1];
            for a in 0..n - 1 {
                idx[a] = rem / inner.strides()[a];
                rem %= inner.strides()[a];
                dst += (idx[a] + self.offset[a]) * self.grid.strides()[a];
            }
            f(dst..dst + r, row * r..(row + 1) * r);
        }
    }
}

/// Largest `|p_a|` over the points of `k`.
fn abs_bounds(k: &DiscreteMeasure) -> Vec<f64> {
    let d = k.dim();
    let mut b = vec![0.0; d];
    for p in k.points().chunks(d) {
        for (ba, pa) in b.iter_mut().zip(p) {
            *ba = f64::max(*ba, pa.abs());
        }
    }
    b
}

fn normalised(f: GridFunction) -> GridFunction {
    let n = f.dot(&f).sqrt();
    if n > 0.0 {
        f.scaled(1.0 / n)
    } else {
        f
    }
}
