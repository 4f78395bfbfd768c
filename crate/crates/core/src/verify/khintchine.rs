use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::measure::DiscreteMeasure;
use crate::operator::{square_pieces, SignSequence};
use crate::rng;

/// Monte-Carlo second moment of the randomised sum at probe nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Khintchine {
    pub probes: Vec<usize>,
    /// `S_l f(x)^2` at each probe.
    pub square: Vec<f64>,
    /// Mean of `|T_{l,r} f(x)|^2` over the sign draws.
    pub second_moment: Vec<f64>,
    pub max_rel_err: f64,
}

/// Compares the empirical mean of `|T_{l,r} f|^2` over `draws` IID sign
/// sequences with `S_l f^2` at `probes` nodes, drawn among nodes where
/// `S_l f^2` is at least a tenth of its maximum.
#[allow(clippy::too_many_arguments)]
pub fn khintchine_check(
    alg: &GradedLieAlgebra,
    f: &GridFunction,
    nu: &DiscreteMeasure,
    psi: &DiscreteMeasure,
    l: i32,
    ks: &[i32],
    draws: usize,
    probes: usize,
    seed: u64,
) -> Result<Khintchine> {
    if draws == 0 || probes == 0 {
        return invalid("need at least one draw and one probe");
    }
    let pieces = square_pieces(alg, f, nu, psi, l, ks)?;
    let s2: Vec<f64> = (0..f.grid().len())
        .map(|i| pieces.iter().map(|p| p.values()[i] * p.values()[i]).sum())
        .collect();
    let top = s2.iter().cloned().fold(0.0, f64::max);
    let mut eligible: Vec<usize> = (0..s2.len())
        .filter(|&i| top > 0.0 && s2[i] >= 0.1 * top)
        .collect();
    let mut g = rng::stream(seed, 21);
    eligible.shuffle(&mut g);
    eligible.truncate(probes);
    eligible.sort_unstable();
    let mut moment = alloc::vec![0.0; eligible.len()];
    for d in 0..draws {
        let signs = SignSequence::random(ks, rng::derive(seed, d as u64));
        for (m, &i) in moment.iter_mut().zip(&eligible) {
            let t: f64 = ks
                .iter()
                .zip(&pieces)
                .map(|(k, p)| f64::from(signs.signs[k]) * p.values()[i])
                .sum();
            *m += t * t;
        }
    }
    moment.iter_mut().for_each(|m| *m /= draws as f64);
    let square: Vec<f64> = eligible.iter().map(|&i| s2[i]).collect();
    let max_rel_err = moment
        .iter()
        .zip(&square)
        .map(|(m, s)| (m - s).abs() / s)
        .fold(0.0, f64::max);
    Ok(Khintchine {
        probes: eligible,
        square,
        second_moment: moment,
        max_rel_err,
    })
}
