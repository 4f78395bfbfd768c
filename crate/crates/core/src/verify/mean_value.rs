use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::group::{default_derivative_step, hom_norm, scale_pow, GroupElement};
use crate::par;

/// Both sides of the mean-value inequality for one translation.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanValue {
    /// `int |g(z x) - g(x)| dx`
    pub lhs: f64,
    /// `sum_j |z|^lambda_j ||X_j^R g||_1`
    pub rhs: f64,
    pub ratio: f64,
    /// `||X_j^R g||_1` per direction.
    pub derivative_norms: Vec<f64>,
}

/// `L1` norms of the right-invariant derivatives of `g` (central differences
/// with step `h`; reads outside the box are zero).
pub fn right_derivative_norms(
    alg: &GradedLieAlgebra,
    g: &GridFunction,
    h: f64,
) -> Result<Vec<f64>> {
    check_inside(alg, g)?;
    let n = alg.dim();
    let grid = g.grid();
    let row = grid.resolution()[n - 1];
    let parts = par::map_indexed(grid.len() / row, |r| {
        let mut x = vec![0.0; n];
        let mut e = vec![0.0; n];
        let (mut p, mut m) = (vec![0.0; n], vec![0.0; n]);
        let mut acc = vec![0.0; n];
        for i in r * row..(r + 1) * row {
            grid.node_into(i, &mut x);
            for j in 0..n {
                e.iter_mut().for_each(|v| *v = 0.0);
                e[j] = h;
                alg.law_f64(&e, &x, &mut p);
                e[j] = -h;
                alg.law_f64(&e, &x, &mut m);
                acc[j] += ((g.interpolate(&p) - g.interpolate(&m)) / (2.0 * h)).abs();
            }
        }
        acc
    });
    let cv = grid.cell_volume();
    Ok((0..n)
        .map(|j| parts.iter().map(|p| p[j]).sum::<f64>() * cv)
        .collect())
}

/// Compares `int |g(z x) - g(x)|` with `sum_j |z|^lambda_j ||X_j^R g||_1`.
///
/// Fails with `OutOfDomain` if `g` touches the boundary of its box or if `z`
/// translates part of its support outside.
pub fn mean_value_check(
    alg: &GradedLieAlgebra,
    g: &GridFunction,
    z: &GroupElement,
) -> Result<MeanValue> {
    let norms = right_derivative_norms(alg, g, default_derivative_step(g))?;
    mean_value_from_norms(alg, g, z, norms)
}

/// [`mean_value_check`] with precomputed [`right_derivative_norms`], for
/// sweeps over many translations.
pub fn mean_value_from_norms(
    alg: &GradedLieAlgebra,
    g: &GridFunction,
    z: &GroupElement,
    derivative_norms: Vec<f64>,
) -> Result<MeanValue> {
    let n = alg.dim();
    if z.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: z.dim(),
        });
    }
    let grid = g.grid();
    let zc = z.coords();
    let neg: Vec<f64> = zc.iter().map(|v| -v).collect();
    let row = grid.resolution()[n - 1];
    let parts = par::map_indexed(grid.len() / row, |r| {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let mut back = vec![0.0; n];
        let (mut acc, mut escaped) = (0.0, false);
        for i in r * row..(r + 1) * row {
            grid.node_into(i, &mut x);
            let gx = g.values()[i];
            if gx != 0.0 {
                alg.law_f64(&neg, &x, &mut back);
                escaped |= !grid.contains(&back);
            }
            alg.law_f64(zc, &x, &mut w);
            acc += (g.interpolate(&w) - gx).abs();
        }
        (acc, escaped)
    });
    if parts.iter().any(|p| p.1) {
        return Err(Error::OutOfDomain);
    }
    let lhs = parts.iter().map(|p| p.0).sum::<f64>() * grid.cell_volume();
    let r = hom_norm(alg, z);
    let rhs: f64 = derivative_norms
        .iter()
        .zip(alg.exponents_f64())
        .map(|(d, &l)| scale_pow(r, l) * d)
        .sum();
    let ratio = if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(MeanValue {
        lhs,
        rhs,
        ratio,
        derivative_norms,
    })
}

fn check_inside(alg: &GradedLieAlgebra, g: &GridFunction) -> Result<()> {
    let grid = g.grid();
    if grid.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: grid.dim(),
        });
    }
    let res = grid.resolution();
    let strides = grid.strides();
    let touches = g.values().iter().enumerate().any(|(i, &v)| {
        v != 0.0
            && (0..res.len()).any(|a| {
                let p = (i / strides[a]) % res[a];
                p == 0 || p + 1 == res[a]
            })
    });
    if touches {
        return Err(Error::OutOfDomain);
    }
    Ok(())
}
