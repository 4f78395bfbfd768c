//! Regular box grids in exponential coordinates and functions sampled on them.
//!
//! Nodes are stored row-major with the last axis contiguous. Lebesgue measure
//! in exponential coordinates is Haar measure, so quadrature is a plain sum
//! times the cell volume.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Result};
use crate::measure::DiscreteMeasure;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    res: Vec<usize>,
    step: Vec<f64>,
    strides: Vec<usize>,
}

impl Grid {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, res: Vec<usize>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.len() != res.len() {
            return invalid("grid bounds and resolution must have one entry per axis");
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return invalid("grid needs lo < hi on every axis");
        }
        if res.iter().any(|&r| r < 2) {
            return invalid("grid resolution must be at least 2 per axis");
        }
        let step = lo
            .iter()
            .zip(&hi)
            .zip(&res)
            .map(|((a, b), &r)| (b - a) / (r - 1) as f64)
            .collect();
        let mut strides = vec![1; res.len()];
        for a in (0..res.len() - 1).rev() {
            strides[a] = strides[a + 1] * res[a + 1];
        }
        Ok(Self {
            lo,
            hi,
            res,
            step,
            strides,
        })
    }

    /// The cube `[-half, half]^dim` with `res` nodes per axis.
    pub fn cube(dim: usize, half: f64, res: usize) -> Result<Self> {
        Self::new(vec![-half; dim], vec![half; dim], vec![res; dim])
    }

    /// Symmetric box `prod [-half_a, half_a]`.
    pub fn symmetric(half: &[f64], res: &[usize]) -> Result<Self> {
        Self::new(
            half.iter().map(|h| -h).collect(),
            half.to_vec(),
            res.to_vec(),
        )
    }

    pub fn dim(&self) -> usize {
        self.res.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn resolution(&self) -> &[usize] {
        &self.res
    }

    pub fn spacings(&self) -> &[f64] {
        &self.step
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.step.iter().product()
    }

    /// Coordinates of node `idx`.
    pub fn node(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.node_into(idx, &mut out);
        out
    }

    pub fn node_into(&self, mut idx: usize, out: &mut [f64]) {
        for a in 0..self.dim() {
            let i = idx / self.strides[a];
            idx %= self.strides[a];
            out[a] = self.lo[a] + i as f64 * self.step[a];
        }
    }

    /// Whether `p` lies in the closed box.
    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    /// Same box, resolution scaled to `res`.
    pub fn with_resolution(&self, res: Vec<usize>) -> Result<Self> {
        Self::new(self.lo.clone(), self.hi.clone(), res)
    }
}

/// A function sampled on the nodes of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    mean_zero: bool,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid("value count does not match the grid");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("grid values must be finite");
        }
        Ok(Self {
            grid,
            values,
            mean_zero: false,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
            mean_zero: false,
        }
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: Grid, f: F) -> Self {
        let mut p = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.node_into(i, &mut p);
                f(&p)
            })
            .collect();
        Self {
            grid,
            values,
            mean_zero: false,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    pub fn set_mean_zero(&mut self, flag: bool) {
        self.mean_zero = flag;
    }

    /// Multilinear interpolation of the grid values extended by zero nodes,
    /// so the result fades to zero across the cell outside each face.
    pub fn interpolate(&self, p: &[f64]) -> f64 {
        let d = self.grid.dim();
        let mut lower = [0i64; 16];
        let mut frac = [0.0f64; 16];
        for a in 0..d {
            let s = (p[a] - self.grid.lo[a]) / self.grid.step[a];
            let last = (self.grid.res[a] - 1) as f64;
            if !(s > -1.0 && s < last + 1.0) {
                return 0.0;
            }
            let i0 = s.floor();
            frac[a] = s - i0;
            lower[a] = i0 as i64;
        }
        let mut acc = 0.0;
        'corner: for mask in 0..(1usize << d) {
            let mut w = 1.0;
            let mut off = 0;
            for a in 0..d {
                let (i, wa) = if mask >> a & 1 == 1 {
                    (lower[a] + 1, frac[a])
                } else {
                    (lower[a], 1.0 - frac[a])
                };
                if wa == 0.0 || i < 0 || i >= self.grid.res[a] as i64 {
                    continue 'corner;
                }
                w *= wa;
                off += i as usize * self.grid.strides[a];
            }
            acc += w * self.values[off];
        }
        acc
    }

    /// Riemann sum of the values times the cell volume.
    pub fn quadrature(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn abs_quadrature(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            mean_zero: false,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            mean_zero: self.mean_zero,
        }
    }

    /// `self + c * other` on the same grid.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return invalid("grid functions live on different grids");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            mean_zero: false,
        })
    }

    /// Discrete inner product `sum f g * cell volume`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// Point cloud of the nonzero nodes, weights `value * cell_volume`.
    pub fn to_measure(&self, alg: &GradedLieAlgebra) -> Result<DiscreteMeasure> {
        self.to_measure_blocked(alg, &vec![1; self.grid.dim()])
    }

    /// Point cloud after lumping `blocks[a]` consecutive nodes per axis.
    ///
    /// The positive and negative parts of each block become one point each,
    /// placed at their weighted centroid and carrying their total weight, so
    /// mass and first moments are preserved block by block.
    pub fn to_measure_blocked(
        &self,
        alg: &GradedLieAlgebra,
        blocks: &[usize],
    ) -> Result<DiscreteMeasure> {
        let d = self.grid.dim();
        if blocks.len() != d || blocks.iter().any(|&b| b == 0) {
            return invalid("one positive block size per axis required");
        }
        let cv = self.grid.cell_volume();
        let nb: Vec<usize> = (0..d)
            .map(|a| self.grid.res[a].div_ceil(blocks[a]))
            .collect();
        let total: usize = nb.iter().product();
        // per block and sign: mass, then d first moments
        let stride = 2 * (d + 1);
        let mut acc = vec![0.0; total * stride];
        let mut p = vec![0.0; d];
        for (idx, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let mut rem = idx;
            let mut b = 0;
            for a in 0..d {
                let i = rem / self.grid.strides[a];
                rem %= self.grid.strides[a];
                b = b * nb[a] + i / blocks[a];
            }
            self.grid.node_into(idx, &mut p);
            let slot = b * stride + if v > 0.0 { 0 } else { d + 1 };
            let w = v * cv;
            acc[slot] += w;
            for a in 0..d {
                acc[slot + 1 + a] += w * p[a];
            }
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for part in acc.chunks(d + 1) {
            if part[0] == 0.0 {
                continue;
            }
            points.extend(part[1..].iter().map(|m| m / part[0]));
            weights.push(part[0]);
        }
        if weights.is_empty() {
            points.extend(core::iter::repeat(0.0).take(d));
            weights.push(0.0);
        }
        let mut m = DiscreteMeasure::new(alg, points, weights)?;
        if self.mean_zero {
            m = m.with_mean_zero_forced();
        }
        Ok(m)
    }
}
