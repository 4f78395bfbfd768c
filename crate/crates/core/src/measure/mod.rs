//! Finite signed point-cloud measures and the operations on them.

mod fourier;
mod gauge;
mod sample;
mod smooth;

pub use fourier::{fourier_decay_fit, fourier_transform};
pub use gauge::{ConvexGauge, EuclideanBall, KoranyiBall};
pub use sample::{
    convex_boundary_measure, curve_measure, horizontal_sphere, koranyi_sphere, sphere_points,
    tilted_sphere,
};
pub use smooth::{ca_exponent_fit, ca_modulus, density_estimate, CaFit};

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::GradedLieAlgebra;
use crate::error::{invalid, Error, Result};
use crate::group::{self, hom_norm_raw, GroupElement};
use crate::{par, rng};

/// Relative mass tolerance for the mean-zero flag.
pub const MEAN_ZERO_RTOL: f64 = 1e-10;

/// Weighted point cloud `sum_i w_i delta_{p_i}`; points stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
    support_radius: f64,
    mean_zero: bool,
}

impl DiscreteMeasure {
    /// Builds a measure and computes its support radius in the homogeneous norm.
    pub fn new(alg: &GradedLieAlgebra, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::with_exponents(alg.exponents_f64(), points, weights)
    }

    pub(crate) fn with_exponents(
        exps: &[f64],
        points: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let dim = exps.len();
        if weights.is_empty() {
            return invalid("a measure needs at least one point");
        }
        if points.len() != dim * weights.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * weights.len(),
                found: points.len(),
            });
        }
        if points.iter().chain(&weights).any(|v| !v.is_finite()) {
            return invalid("measure entries must be finite");
        }
        let support_radius = points
            .chunks(dim)
            .map(|p| hom_norm_raw(exps, p))
            .fold(0.0, f64::max);
        Ok(Self {
            dim,
            points,
            weights,
            support_radius,
            mean_zero: false,
        })
    }

    /// Unit point mass at `x`.
    pub fn point_mass(alg: &GradedLieAlgebra, x: &GroupElement) -> Result<Self> {
        Self::new(alg, x.coords().to_vec(), vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn total_variation(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// Sets the mean-zero flag after checking `|mass| <= 1e-10 * TV`.
    pub fn mark_mean_zero(mut self) -> Result<Self> {
        if self.total_mass().abs() > MEAN_ZERO_RTOL * self.total_variation() {
            return Err(Error::NotMeanZero);
        }
        self.mean_zero = true;
        Ok(self)
    }

    /// Sets the flag for clouds whose continuum counterpart is mean-zero and
    /// whose residual mass comes from discretisation.
    pub(crate) fn with_mean_zero_forced(mut self) -> Self {
        self.mean_zero = true;
        self
    }

    /// Enlarges the recorded support radius (it is only an upper bound).
    pub fn with_support_radius(mut self, r: f64) -> Self {
        self.support_radius = self.support_radius.max(r);
        self
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let mut m = self.clone();
        m.weights.iter_mut().for_each(|w| *w *= c);
        m
    }

    /// `self + c * other` as a union of clouds.
    pub fn combine(&self, c: f64, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().map(|w| c * w));
        Ok(Self {
            dim: self.dim,
            points,
            weights,
            support_radius: self.support_radius.max(other.support_radius),
            mean_zero: false,
        })
    }

    /// `self - mass(self) / mass(bump) * bump`, flagged mean-zero.
    pub fn minus_matching(&self, bump: &Self) -> Result<Self> {
        let mb = bump.total_mass();
        if mb == 0.0 {
            return invalid("bump has zero mass");
        }
        self.combine(-self.total_mass() / mb, bump)?
            .mark_mean_zero()
    }

    /// Merges points sharing a box of side `cell[a]` (per sign) into their
    /// weighted centroid. Mass and first moments are unchanged.
    pub fn lumped(&self, cell: &[f64]) -> Result<Self> {
        if cell.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: cell.len(),
            });
        }
        if cell.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return invalid("cell sides must be positive");
        }
        let d = self.dim;
        let mut acc: BTreeMap<(Vec<i64>, bool), Vec<f64>> = BTreeMap::new();
        for (p, &w) in self.points.chunks(d).zip(&self.weights) {
            if w == 0.0 {
                continue;
            }
            let key: Vec<i64> = p.iter().zip(cell).map(|(x, c)| (x / c).floor() as i64).collect();
            let slot = acc.entry((key, w > 0.0)).or_insert_with(|| vec![0.0; d + 1]);
            slot[0] += w;
            for a in 0..d {
                slot[1 + a] += w * p[a];
            }
        }
        if acc.is_empty() {
            return Ok(self.clone());
        }
        let mut points = Vec::with_capacity(acc.len() * d);
        let mut weights = Vec::with_capacity(acc.len());
        for slot in acc.values() {
            points.extend(slot[1..].iter().map(|m| m / slot[0]));
            weights.push(slot[0]);
        }
        Ok(Self {
            dim: d,
            points,
            weights,
            support_radius: self.support_radius,
            mean_zero: self.mean_zero,
        })
    }

    fn refresh_flags(mut self) -> Self {
        self.mean_zero = self.total_mass().abs() <= MEAN_ZERO_RTOL * self.total_variation();
        self
    }
}

/// Image under `delta_{2^k}`; weights untouched.
pub fn dilate_measure(alg: &GradedLieAlgebra, k: i32, sigma: &DiscreteMeasure) -> DiscreteMeasure {
    let t = 2f64.powi(k);
    let mut m = sigma.clone();
    for p in m.points.chunks_mut(m.dim) {
        group::dilate_in_place(alg, t, p);
    }
    m.support_radius = sigma.support_radius * t;
    m
}

/// Image under inversion `x -> x^-1`.
pub fn reflect_measure(sigma: &DiscreteMeasure) -> DiscreteMeasure {
    let mut m = sigma.clone();
    m.points.iter_mut().for_each(|v| *v = -*v);
    m
}

/// `sigma * tau`: the cloud `{(x_i y_j, w_i v_j)}`, resampled to at most
/// `max_points` points when larger.
///
/// Resampling draws pairs by stratified sampling on `|w_i| |v_j|` (the
/// product law factorises) and then rescales the positive and negative parts
/// separately so that total mass and total variation both equal the exact
/// products.
pub fn convolve_measures(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    tau: &DiscreteMeasure,
    max_points: usize,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let n = alg.dim();
    if sigma.dim != n || tau.dim != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: sigma.dim.max(tau.dim),
        });
    }
    if max_points == 0 {
        return invalid("max_points must be positive");
    }
    let full = sigma.len().saturating_mul(tau.len());
    let (points, weights) = if full <= max_points {
        let rows = par::map_indexed(sigma.len(), |i| {
            let x = sigma.point(i);
            let mut pts = vec![0.0; tau.len() * n];
            let mut ws = Vec::with_capacity(tau.len());
            for j in 0..tau.len() {
                alg.law_f64(x, tau.point(j), &mut pts[j * n..(j + 1) * n]);
                ws.push(sigma.weights[i] * tau.weights[j]);
            }
            (pts, ws)
        });
        let mut points = Vec::with_capacity(full * n);
        let mut weights = Vec::with_capacity(full);
        for (p, w) in rows {
            points.extend(p);
            weights.extend(w);
        }
        (points, weights)
    } else {
        let mut rng = rng::stream(seed, 0);
        let is = stratified_indices(&sigma.weights, max_points, &mut rng);
        let mut js = stratified_indices(&tau.weights, max_points, &mut rng);
        js.shuffle(&mut rng);
        let mut points = vec![0.0; max_points * n];
        let mut weights = Vec::with_capacity(max_points);
        for (s, (&i, &j)) in is.iter().zip(&js).enumerate() {
            alg.law_f64(
                sigma.point(i),
                tau.point(j),
                &mut points[s * n..(s + 1) * n],
            );
            weights.push((sigma.weights[i] * tau.weights[j]).signum());
        }
        let target_mass = sigma.total_mass() * tau.total_mass();
        let target_tv = sigma.total_variation() * tau.total_variation();
        rebalance(&mut weights, target_mass, target_tv);
        (points, weights)
    };
    let m = DiscreteMeasure::new(alg, points, weights)?;
    Ok(m.refresh_flags())
}

/// `m` indices drawn by stratified sampling from the law `|w| / sum |w|`.
fn stratified_indices<R: Rng>(w: &[f64], m: usize, rng: &mut R) -> Vec<usize> {
    let total: f64 = w.iter().map(|v| v.abs()).sum();
    let mut out = Vec::with_capacity(m);
    if total == 0.0 {
        for s in 0..m {
            out.push(s % w.len());
        }
        return out;
    }
    let mut acc = 0.0;
    let mut i = 0;
    for s in 0..m {
        let u = (s as f64 + rng.gen::<f64>()) / m as f64 * total;
        while i + 1 < w.len() && acc + w[i].abs() <= u {
            acc += w[i].abs();
            i += 1;
        }
        out.push(i);
    }
    out
}

/// Rescales signed unit weights so the positive part sums to `(tv + mass)/2`
/// and the negative part to `(tv - mass)/2`.
fn rebalance(weights: &mut [f64], mass: f64, tv: f64) {
    let pos = weights.iter().filter(|w| **w > 0.0).count() as f64;
    let neg = weights.iter().filter(|w| **w < 0.0).count() as f64;
    let want_pos = 0.5 * (tv + mass);
    let want_neg = 0.5 * (tv - mass);
    if pos > 0.0 && neg > 0.0 {
        for w in weights.iter_mut() {
            *w = if *w > 0.0 {
                want_pos / pos
            } else if *w < 0.0 {
                -want_neg / neg
            } else {
                0.0
            };
        }
    } else {
        // one-signed sample: only the mass can be matched
        let cnt = pos + neg;
        for w in weights.iter_mut() {
            *w = if *w != 0.0 { mass / cnt } else { 0.0 };
        }
    }
}

/// The alternating power `sigma^(N)`: `sigma^(0) = sigma`, then right
/// convolution by the reflection for odd steps and by `sigma` for even ones.
pub fn conv_product(
    alg: &GradedLieAlgebra,
    sigma: &DiscreteMeasure,
    n: usize,
    max_points: usize,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let refl = reflect_measure(sigma);
    let mut acc = sigma.clone();
    for step in 1..=n {
        let factor = if step % 2 == 1 { &refl } else { sigma };
        acc = convolve_measures(
            alg,
            &acc,
            factor,
            max_points,
            rng::derive(seed, step as u64),
        )?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras;

    #[test]
    fn lumping_keeps_mass_and_first_moments() {
        let sigma = koranyi_sphere(1, 300, 4).unwrap();
        let nu = sigma.combine(-1.0, &sigma.scaled(0.5)).unwrap();
        let l = nu.lumped(&[0.25, 0.25, 0.25]).unwrap();
        assert!(l.len() < nu.len());
        assert!((l.total_mass() - nu.total_mass()).abs() < 1e-12);
        for a in 0..3 {
            let m = |m: &DiscreteMeasure| -> f64 {
                m.points().chunks(3).zip(m.weights()).map(|(p, w)| w * p[a]).sum()
            };
            assert!((m(&l) - m(&nu)).abs() < 1e-12);
        }
    }

    fn cloud(alg: &GradedLieAlgebra, pts: &[&[f64]], w: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(
            alg,
            pts.iter().flat_map(|p| p.iter().copied()).collect(),
            w.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn dilation_and_reflection() {
        let h = algebras::heisenberg(1);
        let s = cloud(&h, &[&[0.5, 0.0, 0.25], &[0.0, -1.0, 0.0]], &[0.5, 0.5]);
        assert_eq!(dilate_measure(&h, 0, &s), s);
        let d = dilate_measure(&h, 1, &s);
        assert_eq!(d.point(0), &[1.0, 0.0, 1.0]);
        assert_eq!(d.support_radius(), 2.0 * s.support_radius());
        assert_eq!(reflect_measure(&reflect_measure(&s)), s);
        assert_eq!(
            dilate_measure(&h, 2, &dilate_measure(&h, -1, &s)).points(),
            d.points()
        );
    }

    #[test]
    fn convolution_mass_and_identity() {
        let h = algebras::heisenberg(1);
        let s = cloud(&h, &[&[0.5, 0.1, 0.25], &[0.0, -1.0, 0.3]], &[0.7, -0.2]);
        let t = cloud(
            &h,
            &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.2, 0.2, 0.2]],
            &[0.3, 0.3, 0.4],
        );
        let c = convolve_measures(&h, &s, &t, 100, 1).unwrap();
        assert!((c.total_mass() - s.total_mass() * t.total_mass()).abs() < 1e-12);
        let e = DiscreteMeasure::point_mass(&h, &GroupElement::identity(3)).unwrap();
        assert_eq!(
            convolve_measures(&h, &s, &e, 100, 1).unwrap().points(),
            s.points()
        );
    }

    #[test]
    fn resampling_keeps_mass_and_variation() {
        let h = algebras::heisenberg(1);
        let s = cloud(
            &h,
            &[&[0.5, 0.1, 0.25], &[0.0, -1.0, 0.3], &[0.1, 0.1, 0.1]],
            &[0.7, -0.2, 0.5],
        );
        let c = convolve_measures(&h, &s, &s, 5, 3).unwrap();
        assert_eq!(c.len(), 5);
        assert!((c.total_mass() - 1.0).abs() < 1e-12);
        assert!((c.total_variation() - 1.96).abs() < 1e-12);
    }

    #[test]
    fn conv_product_factor_order() {
        let h = algebras::heisenberg(1);
        let s = cloud(&h, &[&[1.0, 0.0, 0.0]], &[1.0]);
        let t = cloud(&h, &[&[0.0, 1.0, 0.0]], &[1.0]);
        let st = s.combine(1.0, &t).unwrap();
        // sigma^(1) = sigma * reflected sigma: the point (1,0,0)(0,-1,0) = (1,-1,-1/2) is present.
        let p1 = conv_product(&h, &st, 1, 100, 0).unwrap();
        assert_eq!(p1.len(), 4);
        assert!(p1.points().chunks(3).any(|p| p == [1.0, -1.0, -0.5]));
        assert_eq!(conv_product(&h, &st, 0, 100, 0).unwrap(), st);
        assert!((conv_product(&h, &st, 2, 100, 0).unwrap().total_mass() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn mean_zero_flag_checked() {
        let h = algebras::heisenberg(1);
        let s = cloud(&h, &[&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]], &[1.0, -1.0]);
        assert!(s.clone().mark_mean_zero().unwrap().is_mean_zero());
        let t = cloud(&h, &[&[1.0, 0.0, 0.0]], &[1.0]);
        assert_eq!(t.mark_mean_zero().unwrap_err(), Error::NotMeanZero);
    }
}
