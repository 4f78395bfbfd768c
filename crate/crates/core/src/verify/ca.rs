use alloc::vec::Vec;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Result};
use crate::grid::Grid;
use crate::measure::{ca_exponent_fit, conv_product, density_estimate, CaFit, DiscreteMeasure};
use crate::rng;

/// Bandwidth-refinement test for one convolution power.
#[derive(Clone, Debug, PartialEq)]
pub struct CaSweepRow {
    pub n: usize,
    pub points: usize,
    /// `||h_b - h_{b/2}||_1 / ||h_b||_1`
    pub l1_change: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaSweep {
    pub rows: Vec<CaSweepRow>,
    /// Smallest power whose density is stable under refinement.
    pub smallest: Option<usize>,
    /// Translation-modulus fit at `smallest`.
    pub fit: Option<CaFit>,
}

/// Sweeps the convolution power `N`, estimating the density of `sigma^(N)`
/// at `bandwidth` and `bandwidth / 2` cells. The first `N` whose relative
/// `L1` change is at most `stable_tol` is reported together with its
/// translation-modulus fit.
#[allow(clippy::too_many_arguments)]
pub fn ca_sweep(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    ns: &[usize],
    grid: &Grid,
    bandwidth: f64,
    stable_tol: f64,
    radii: &[f64],
    directions: usize,
    max_points: usize,
    seed: u64,
) -> Result<CaSweep> {
    if ns.is_empty() {
        return invalid("empty convolution-power sweep");
    }
    let mut rows = Vec::with_capacity(ns.len());
    let mut smallest = None;
    for &n in ns {
        let cell_seed = rng::derive(seed, n as u64);
        let power = conv_product(alg, sigma, n, max_points, cell_seed)?;
        let coarse = density_estimate(alg, &power, grid, bandwidth)?;
        let fine = density_estimate(alg, &power, grid, 0.5 * bandwidth)?;
        let diff = coarse.axpy(-1.0, &fine)?.abs_quadrature();
        let l1 = coarse.abs_quadrature();
        let l1_change = if l1 > 0.0 { diff / l1 } else { 0.0 };
        let stable = l1_change <= stable_tol;
        if stable && smallest.is_none() {
            smallest = Some(n);
        }
        rows.push(CaSweepRow {
            n,
            points: power.len(),
            l1_change,
            stable,
        });
    }
    let fit = match smallest {
        Some(n) => Some(ca_exponent_fit(
            alg,
            sigma,
            n,
            radii,
            grid,
            bandwidth,
            directions,
            max_points,
            rng::derive(seed, n as u64),
        )?),
        None => None,
    };
    Ok(CaSweep {
        rows,
        smallest,
        fit,
    })
}
