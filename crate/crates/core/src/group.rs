//! Group operations in exponential coordinates of the first kind.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::algebra::GradedLieAlgebra;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::rng;

/// A point of the group, `exp(sum_j coords_j X_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement(Vec<f64>);

impl GroupElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn identity(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl From<Vec<f64>> for GroupElement {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

fn check(alg: &GradedLieAlgebra, x: &GroupElement) -> Result<()> {
    if x.dim() != alg.dim() {
        return Err(Error::DimensionMismatch {
            expected: alg.dim(),
            found: x.dim(),
        });
    }
    Ok(())
}

pub fn multiply(
    alg: &GradedLieAlgebra,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<GroupElement> {
    check(alg, x)?;
    check(alg, y)?;
    let mut out = vec![0.0; alg.dim()];
    alg.law_f64(&x.0, &y.0, &mut out);
    Ok(GroupElement(out))
}

/// Raw-slice product for inner loops; no dimension checks.
#[inline]
pub fn multiply_into(alg: &GradedLieAlgebra, x: &[f64], y: &[f64], out: &mut [f64]) {
    alg.law_f64(x, y, out);
}

pub fn inverse(x: &GroupElement) -> GroupElement {
    GroupElement(x.0.iter().map(|v| -v).collect())
}

pub fn dilate(alg: &GradedLieAlgebra, t: f64, x: &GroupElement) -> Result<GroupElement> {
    check(alg, x)?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::NonpositiveScale);
    }
    let mut out = x.0.clone();
    dilate_in_place(alg, t, &mut out);
    Ok(GroupElement(out))
}

pub(crate) fn dilate_in_place(alg: &GradedLieAlgebra, t: f64, x: &mut [f64]) {
    for (v, &l) in x.iter_mut().zip(alg.exponents_f64()) {
        *v *= scale_pow(t, l);
    }
}

/// `t^l`, exact for integer exponents and power-of-two `t`.
pub(crate) fn scale_pow(t: f64, l: f64) -> f64 {
    if l == l.round() && l.abs() < 64.0 {
        t.powi(l as i32)
    } else {
        t.powf(l)
    }
}

/// Homogeneous norm `max_j |x_j|^(1 / lambda_j)`.
pub fn hom_norm(alg: &GradedLieAlgebra, x: &GroupElement) -> f64 {
    hom_norm_raw(alg.exponents_f64(), &x.0)
}

pub(crate) fn hom_norm_raw(exps: &[f64], x: &[f64]) -> f64 {
    x.iter().zip(exps).fold(0.0, |m, (&v, &l)| {
        let a = v.abs();
        let r = if l == 1.0 {
            a
        } else if l == 2.0 {
            a.sqrt()
        } else {
            a.powf(1.0 / l)
        };
        m.max(r)
    })
}

/// Monte-Carlo lower bound for the quasi-triangle constant.
///
/// Pairs are drawn uniformly from the homogeneous unit ball; pairs with
/// `|x| + |y| = 0` are redrawn. The supremum also ranges over the boundary
/// pairs `(x, e)`, so the estimate is never below 1.
pub fn quasi_triangle_const(alg: &GradedLieAlgebra, n_samples: usize, seed: u64) -> f64 {
    let n = alg.dim();
    let exps = alg.exponents_f64();
    let mut rng = rng::stream(seed, 0);
    let mut best: f64 = 1.0;
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut z = vec![0.0; n];
    for _ in 0..n_samples.max(1) {
        let denom = loop {
            for v in x.iter_mut().chain(y.iter_mut()) {
                *v = rng.gen_range(-1.0..=1.0);
            }
            let d = hom_norm_raw(exps, &x) + hom_norm_raw(exps, &y);
            if d > 0.0 {
                break d;
            }
        };
        alg.law_f64(&x, &y, &mut z);
        best = best.max(hom_norm_raw(exps, &z) / denom);
    }
    best
}

/// Group commutator `x y x^-1 y^-1`.
pub fn commutator(
    alg: &GradedLieAlgebra,
    x: &GroupElement,
    y: &GroupElement,
) -> Result<GroupElement> {
    let xy = multiply(alg, x, y)?;
    let xyx = multiply(alg, &xy, &inverse(x))?;
    multiply(alg, &xyx, &inverse(y))
}

/// `exp(t_n X_n) ... exp(t_1 X_1)`.
pub fn upsilon_compose(alg: &GradedLieAlgebra, t: &[f64]) -> Result<GroupElement> {
    let n = alg.dim();
    if t.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.len(),
        });
    }
    let mut acc = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut out = vec![0.0; n];
    for j in (0..n).rev() {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = t[j];
        alg.law_f64(&acc, &e, &mut out);
        core::mem::swap(&mut acc, &mut out);
    }
    Ok(GroupElement(acc))
}

/// Solves `z = exp(t_n X_n) ... exp(t_1 X_1)` for `t`, one layer at a time.
///
/// Components of weight `w` depend on same-weight `t_j` only through the
/// linear term, so one ascending pass over the layers is exact.
pub fn upsilon_decompose(alg: &GradedLieAlgebra, z: &GroupElement) -> Result<Vec<f64>> {
    check(alg, z)?;
    let n = alg.dim();
    let mut t = vec![0.0; n];
    for w in 1..=alg.max_weight() {
        let idx = alg.layer_indices(w);
        if idx.is_empty() {
            continue;
        }
        for &j in &idx {
            t[j] = 0.0;
        }
        let p = upsilon_compose(alg, &t)?;
        for &j in &idx {
            t[j] = z.0[j] - p.0[j];
        }
    }
    let back = upsilon_compose(alg, &t)?;
    let scale = z.0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let err = back
        .0
        .iter()
        .zip(&z.0)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if err > 1e-9 * scale {
        return Err(Error::ConvergenceFailure {
            what: "upsilon reconstruction",
            last: err,
            previous: 1e-9 * scale,
        });
    }
    Ok(t)
}

/// Default finite-difference step: largest cell spacing to the power 2/3.
pub fn default_derivative_step(g: &GridFunction) -> f64 {
    let h = g.grid().spacings().iter().cloned().fold(0.0, f64::max);
    h.powf(2.0 / 3.0)
}

/// Central difference for the right-invariant field `X_j^R` at `x`:
/// `[g(exp(h X_j) x) - g(exp(-h X_j) x)] / 2h`.
pub fn right_derivative(
    alg: &GradedLieAlgebra,
    g: &GridFunction,
    j: usize,
    x: &GroupElement,
    h: f64,
) -> Result<f64> {
    check(alg, x)?;
    if j >= alg.dim() {
        return Err(Error::InvalidArgument(
            "direction index out of range".into(),
        ));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let n = alg.dim();
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut m = vec![0.0; n];
    e[j] = h;
    alg.law_f64(&e, &x.0, &mut p);
    e[j] = -h;
    alg.law_f64(&e, &x.0, &mut m);
    if !g.grid().contains(&p) || !g.grid().contains(&m) {
        return Err(Error::OutOfDomain);
    }
    Ok((g.interpolate(&p) - g.interpolate(&m)) / (2.0 * h))
}
