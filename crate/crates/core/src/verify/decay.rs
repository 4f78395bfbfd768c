use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Error, Result};
use crate::fit::DecayFit;
use crate::grid::Grid;
use crate::measure::{dilate_measure, reflect_measure, DiscreteMeasure};
use crate::operator::op_norm_l2_chain;
use crate::rng;

/// Norms of `A[mu_{-g} * theta]` against the gap `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct L2Decay {
    pub gaps: Vec<i32>,
    pub norms: Vec<f64>,
    pub iterations: Vec<usize>,
    /// Decay in the gap; `exponent` estimates `rho`.
    pub fit: DecayFit,
}

/// Operator norm of `f -> (f * mu_{-g}) * theta` for each gap, then a decay fit.
#[allow(clippy::too_many_arguments)]
pub fn l2_decay_experiment(
    alg: &GradedLieAlgebra,
    mu: &DiscreteMeasure,
    theta: &DiscreteMeasure,
    gaps: &[i32],
    grid: &Grid,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<L2Decay> {
    if !mu.is_mean_zero() || !theta.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    let (lo, hi) = gaps
        .iter()
        .fold((i32::MAX, i32::MIN), |(a, b), &g| (a.min(g), b.max(g)));
    if gaps.is_empty() || hi - lo < 3 {
        return invalid("gaps must span at least three steps");
    }
    let mut norms = Vec::with_capacity(gaps.len());
    let mut iterations = Vec::with_capacity(gaps.len());
    for (cell, &g) in gaps.iter().enumerate() {
        let chain = [dilate_measure(alg, -g, mu), theta.clone()];
        let est = op_norm_l2_chain(
            alg,
            &chain,
            grid,
            iters,
            tol,
            rng::derive(seed, cell as u64),
        )?;
        norms.push(est.norm);
        iterations.push(est.iterations);
    }
    let xs: Vec<f64> = gaps.iter().map(|&g| f64::from(g)).collect();
    let fit = DecayFit::decay(&xs, &norms);
    Ok(L2Decay {
        gaps: gaps.to_vec(),
        norms,
        iterations,
        fit,
    })
}

/// One `(j, k, l)` cell of the almost-orthogonality table.
#[derive(Clone, Debug, PartialEq)]
pub struct AoRow {
    pub j: i32,
    pub k: i32,
    pub l: i32,
    /// `psi_{j+l} * nu_j`
    pub psi_nu: f64,
    /// `nu_j * nu~_k`
    pub nu_nu: f64,
    /// `nu~_j * psi~_{j+l}`
    pub nu_psi: f64,
    /// `psi~_{j+l} * psi_{k+l}`
    pub psi_psi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AoTable {
    pub rows: Vec<AoRow>,
    /// Decay of the worst `psi_nu` / `nu_psi` norm against `|l|`.
    pub fit_l: DecayFit,
    /// Decay of the worst `nu_nu` / `psi_psi` norm against `|j - k|`.
    pub fit_jk: DecayFit,
}

/// Operator norms of the four composite kernels over the given `(j, k, l)`
/// triples, with decay fits in `|l|` and `|j - k|`.
pub fn almost_orthogonality_experiment(
    alg: &GradedLieAlgebra,
    nu: &DiscreteMeasure,
    psi: &DiscreteMeasure,
    triples: &[(i32, i32, i32)],
    grid: &Grid,
    iters: usize,
    tol: f64,
    seed: u64,
) -> Result<AoTable> {
    if !nu.is_mean_zero() || !psi.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    if triples.is_empty() {
        return invalid("no (j, k, l) triples");
    }
    let nu_r = reflect_measure(nu);
    let psi_r = reflect_measure(psi);
    // The first and third kernels depend on (j, l), the second on (j, k) and
    // the fourth on (j + l, k + l); each distinct key is estimated once.
    let mut cache: BTreeMap<(u8, i32, i32), f64> = BTreeMap::new();
    let mut cell = 0u64;
    let mut norm =
        |kind: u8, a: i32, b: i32, chain: &dyn Fn() -> [DiscreteMeasure; 2]| -> Result<f64> {
            if let Some(&v) = cache.get(&(kind, a, b)) {
                return Ok(v);
            }
            cell += 1;
            let v =
                op_norm_l2_chain(alg, &chain(), grid, iters, tol, rng::derive(seed, cell))?.norm;
            cache.insert((kind, a, b), v);
            Ok(v)
        };
    let mut rows = Vec::with_capacity(triples.len());
    for &(j, k, l) in triples {
        let psi_nu = norm(0, j, l, &|| {
            [dilate_measure(alg, j + l, psi), dilate_measure(alg, j, nu)]
        })?;
        let nu_nu = norm(1, j, k, &|| {
            [dilate_measure(alg, j, nu), dilate_measure(alg, k, &nu_r)]
        })?;
        let nu_psi = norm(2, j, l, &|| {
            [
                dilate_measure(alg, j, &nu_r),
                dilate_measure(alg, j + l, &psi_r),
            ]
        })?;
        let psi_psi = norm(3, j + l, k + l, &|| {
            [
                dilate_measure(alg, j + l, &psi_r),
                dilate_measure(alg, k + l, psi),
            ]
        })?;
        rows.push(AoRow {
            j,
            k,
            l,
            psi_nu,
            nu_nu,
            nu_psi,
            psi_psi,
        });
    }
    let fit_l = worst_fit(
        rows.iter()
            .map(|r| (r.l.unsigned_abs(), r.psi_nu.max(r.nu_psi))),
    );
    let fit_jk = worst_fit(
        rows.iter()
            .map(|r| ((r.j - r.k).unsigned_abs(), r.nu_nu.max(r.psi_psi))),
    );
    Ok(AoTable {
        rows,
        fit_l,
        fit_jk,
    })
}

fn worst_fit(cells: impl Iterator<Item = (u32, f64)>) -> DecayFit {
    let mut worst: BTreeMap<u32, f64> = BTreeMap::new();
    for (x, v) in cells {
        let e = worst.entry(x).or_insert(0.0);
        *e = e.max(v);
    }
    let xs: Vec<f64> = worst.keys().map(|&x| f64::from(x)).collect();
    let vs: Vec<f64> = worst.values().copied().collect();
    DecayFit::decay(&xs, &vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;
    use crate::fit::FitFlag;
    use crate::group::GroupElement;

    #[test]
    fn zero_measure_gives_rejected_fit() {
        let a = algebras::abelian(1);
        let e = DiscreteMeasure::point_mass(&a, &GroupElement::identity(1)).unwrap();
        let z = e.combine(-1.0, &e).unwrap().mark_mean_zero().unwrap();
        let g = Grid::cube(1, 4.0, 65).unwrap();
        let out = l2_decay_experiment(&a, &z, &z, &[0, 1, 2, 3], &g, 10, 1e-6, 0).unwrap();
        assert!(out.norms.iter().all(|&v| v == 0.0));
        assert!(out.fit.has(FitFlag::ZeroData) && !out.fit.accepted(0.0));
    }

    #[test]
    fn requires_mean_zero() {
        let a = algebras::abelian(1);
        let e = DiscreteMeasure::point_mass(&a, &GroupElement::identity(1)).unwrap();
        let g = Grid::cube(1, 4.0, 65).unwrap();
        let err = l2_decay_experiment(&a, &e, &e, &[0, 1, 2, 3], &g, 10, 1e-6, 0).unwrap_err();
        assert_eq!(err, Error::NotMeanZero);
    }
}
