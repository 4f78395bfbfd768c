//! Euclidean Fourier transforms of clouds in abelian groups.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_complex::Complex64;
use num_traits::Float;

use super::{sample::sphere_points, DiscreteMeasure};
use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Error, Result};
use crate::fit::{DecayFit, FitFlag};

/// `sum_i w_i exp(-2 pi i <x_i, xi>)`.
pub fn fourier_transform(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    xi: &[f64],
) -> Result<Complex64> {
    if !alg.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if xi.len() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: xi.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, &w) in sigma.points().chunks(sigma.dim()).zip(sigma.weights()) {
        let phase = -TAU * p.iter().zip(xi).map(|(a, b)| a * b).sum::<f64>();
        acc += Complex64::new(w * phase.cos(), w * phase.sin());
    }
    Ok(acc)
}

/// Decay exponent `kappa` of `sup |sigma^(xi)|` over shells `R <= |xi| <= R + 1/r_supp`.
///
/// The transform of a surface measure oscillates radially, so the maximum is
/// taken over `directions` directions and 16 radii across each shell.
pub fn fourier_decay_fit(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    freq_radii: &[f64],
    directions: usize,
    seed: u64,
) -> Result<DecayFit> {
    if !alg.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if freq_radii.len() < 3 || freq_radii.iter().any(|&r| !(r > 0.0)) {
        return invalid("need at least three positive frequency radii");
    }
    let (lo, hi) = freq_radii
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    if hi / lo < 8.0 {
        return invalid("frequency radii must span at least three octaves");
    }
    let d = sigma.dim();
    let width = if sigma.support_radius() > 0.0 {
        1.0 / sigma.support_radius()
    } else {
        1.0
    };
    let dirs = sphere_points(d, directions.max(1), seed);
    let mut values = Vec::with_capacity(freq_radii.len());
    for &r in freq_radii {
        let mut best = 0.0f64;
        for s in 0..16 {
            let rho = r + width * s as f64 / 15.0;
            for w in dirs.chunks(d) {
                let xi: Vec<f64> = w.iter().map(|v| rho * v).collect();
                best = best.max(fourier_transform(alg, sigma, &xi)?.norm());
            }
        }
        values.push(best);
    }
    let xs: Vec<f64> = freq_radii.iter().map(|r| r.log2()).collect();
    let mut fit = DecayFit::decay(&xs, &values);
    let half = fit.samples.len() / 2;
    if half >= 2 {
        let lower = DecayFit::decay(
            &fit.samples[..half].iter().map(|s| s.0).collect::<Vec<_>>(),
            &fit.samples[..half]
                .iter()
                .map(|s| 2f64.powf(s.1))
                .collect::<Vec<_>>(),
        );
        let upper = DecayFit::decay(
            &fit.samples[half..].iter().map(|s| s.0).collect::<Vec<_>>(),
            &fit.samples[half..]
                .iter()
                .map(|s| 2f64.powf(s.1))
                .collect::<Vec<_>>(),
        );
        if upper.exponent > 2.0 * lower.exponent.max(0.0) + 1.0 {
            fit.push_flag(FitFlag::SuperPolynomial);
        }
    }
    if fit.has(FitFlag::ZeroData) && fit.samples.len() < freq_radii.len() {
        fit.push_flag(FitFlag::SuperPolynomial);
    }
    Ok(fit)
}
