//! Point-cloud samplers for spheres, curves and convex boundaries.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_traits::Float;
use rand::Rng;

use super::{ConvexGauge, DiscreteMeasure};
use crate::algebra::{check_stratified, GradedLieAlgebra};
use crate::error::{invalid, Error, Result};
use crate::rng;

const GOLDEN_FRAC: f64 = 0.618_033_988_749_894_9;

/// `n` quasi-uniform points on the unit sphere `S^{d-1}`, row-major.
///
/// Circles use equispaced angles with a seeded offset, 2-spheres a Fibonacci
/// lattice under a seeded rotation; higher spheres use seeded Gaussian
/// directions.
pub fn sphere_points(d: usize, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, 1);
    let mut out = Vec::with_capacity(n * d);
    match d {
        1 => {
            for i in 0..n {
                out.push(if i % 2 == 0 { 1.0 } else { -1.0 });
            }
        }
        2 => {
            let off: f64 = rng.gen();
            for i in 0..n {
                let th = TAU * (i as f64 + off) / n as f64;
                out.push(th.cos());
                out.push(th.sin());
            }
        }
        3 => {
            let rot = random_rotation3(&mut rng);
            let off: f64 = rng.gen();
            for i in 0..n {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
                let r = (1.0 - z * z).max(0.0).sqrt();
                let ph = TAU * ((i as f64 * GOLDEN_FRAC + off) % 1.0);
                let p = [r * ph.cos(), r * ph.sin(), z];
                for row in &rot {
                    out.push(row[0] * p[0] + row[1] * p[1] + row[2] * p[2]);
                }
            }
        }
        _ => {
            for _ in 0..n {
                let v: Vec<f64> = (0..d).map(|_| rng::normal(&mut rng)).collect();
                let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                out.extend(v.iter().map(|a| a / r));
            }
        }
    }
    out
}

fn random_rotation3<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let mut q: [f64; 4] = [0.0; 4];
    for v in q.iter_mut() {
        *v = rng::normal(rng);
    }
    let r = q.iter().map(|a| a * a).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|a| a / r);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - z * w),
            2.0 * (x * z + y * w),
        ],
        [
            2.0 * (x * y + z * w),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - x * w),
        ],
        [
            2.0 * (x * z - y * w),
            2.0 * (y * z + x * w),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

fn heisenberg_exponents(m: usize) -> Vec<f64> {
    let mut e = vec![1.0; 2 * m];
    e.push(2.0);
    e
}

/// Inverse of a tabulated cumulative distribution on `[a, b]`.
struct InverseCdf {
    nodes: Vec<f64>,
    cdf: Vec<f64>,
}

impl InverseCdf {
    fn new<F: Fn(f64) -> f64>(a: f64, b: f64, m: usize, density: F) -> Self {
        let nodes: Vec<f64> = (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect();
        let vals: Vec<f64> = nodes.iter().map(|&t| density(t)).collect();
        let mut cdf = vec![0.0; m + 1];
        for i in 1..=m {
            cdf[i] = cdf[i - 1] + 0.5 * (vals[i] + vals[i - 1]) * (nodes[i] - nodes[i - 1]);
        }
        let total = cdf[m];
        cdf.iter_mut().for_each(|c| *c /= total);
        Self { nodes, cdf }
    }

    fn at(&self, q: f64) -> f64 {
        let i = self
            .cdf
            .partition_point(|&c| c < q)
            .clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let f = if c1 > c0 { (q - c0) / (c1 - c0) } else { 0.0 };
        self.nodes[i - 1] + f * (self.nodes[i] - self.nodes[i - 1])
    }
}

/// Normalised surface measure on the Korányi sphere `|x|^4 + u^2 = 1` in `H^m`.
///
/// Points are `(sqrt(cos th) w, sin th)` with `w` on `S^{2m-1}`. In the angle
/// `th` the surface element is `cos^{m-1}(th) sqrt(sin^2(th)/4 + cos^3(th))`,
/// which is sampled by inverting its tabulated distribution at stratified
/// quantiles, so all weights are `1/n`.
pub fn koranyi_sphere(m: usize, n_points: usize, seed: u64) -> Result<DiscreteMeasure> {
    if m == 0 || n_points == 0 {
        return invalid("need m >= 1 and at least one point");
    }
    let density = |th: f64| {
        let c = th.cos().max(0.0);
        c.powi(m as i32 - 1) * (0.25 * th.sin().powi(2) + c * c * c).sqrt()
    };
    let inv = InverseCdf::new(-FRAC_PI_2, FRAC_PI_2, 8192, density);
    let mut rng = rng::stream(seed, 2);
    let jitter: f64 = rng.gen();
    let off: f64 = rng.gen();
    let dirs = if m == 1 {
        Vec::new()
    } else {
        sphere_points(2 * m, n_points, rng::derive(seed, 3))
    };
    let d = 2 * m + 1;
    let mut points = Vec::with_capacity(n_points * d);
    for i in 0..n_points {
        let th = inv.at((i as f64 + jitter) / n_points as f64);
        let r = th.cos().max(0.0).sqrt();
        if m == 1 {
            let ph = TAU * ((i as f64 * GOLDEN_FRAC + off) % 1.0);
            points.push(r * ph.cos());
            points.push(r * ph.sin());
        } else {
            points.extend(dirs[i * 2 * m..(i + 1) * 2 * m].iter().map(|w| r * w));
        }
        points.push(th.sin());
    }
    DiscreteMeasure::with_exponents(
        &heisenberg_exponents(m),
        points,
        vec![1.0 / n_points as f64; n_points],
    )
}

/// Normalised measure on the unit sphere of the first layer, embedded by `exp`.
pub fn horizontal_sphere(
    alg: &GradedLieAlgebra,
    n_points: usize,
    seed: u64,
) -> Result<DiscreteMeasure> {
    if let Some(layer) = check_stratified(alg).deficient_layer {
        return Err(Error::NotStratified { layer });
    }
    let v1 = alg.layer_indices(1);
    if v1.len() < 2 {
        return Err(Error::DegenerateLayer { dim: v1.len() });
    }
    if n_points == 0 {
        return invalid("need at least one point");
    }
    let s = sphere_points(v1.len(), n_points, seed);
    let n = alg.dim();
    let mut points = vec![0.0; n_points * n];
    for i in 0..n_points {
        for (a, &j) in v1.iter().enumerate() {
            points[i * n + j] = s[i * v1.len() + a];
        }
    }
    DiscreteMeasure::new(alg, points, vec![1.0 / n_points as f64; n_points])
}

/// Sample of `{(y, <v, y>) : y in S^{2m-1}}` in `H^m`.
pub fn tilted_sphere(m: usize, v: &[f64], n_points: usize, seed: u64) -> Result<DiscreteMeasure> {
    if m == 0 || n_points == 0 {
        return invalid("need m >= 1 and at least one point");
    }
    if v.len() != 2 * m {
        return Err(Error::DimensionMismatch {
            expected: 2 * m,
            found: v.len(),
        });
    }
    let s = sphere_points(2 * m, n_points, seed);
    let mut points = Vec::with_capacity(n_points * (2 * m + 1));
    for y in s.chunks(2 * m) {
        points.extend_from_slice(y);
        points.push(y.iter().zip(v).map(|(a, b)| a * b).sum());
    }
    DiscreteMeasure::with_exponents(
        &heisenberg_exponents(m),
        points,
        vec![1.0 / n_points as f64; n_points],
    )
}

/// Smooth bump `exp(-1 / (t (1 - t)))` on `(0, 1)`.
fn bump01(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (-1.0 / (t * (1.0 - t))).exp()
    }
}

/// Midpoint-rule measure with density `exp(-1/(t(1-t)))` in the parameter `t`
/// along `exp(gamma(t))`, normalised to total mass 1.
pub fn curve_measure<F>(
    alg: &GradedLieAlgebra,
    gamma: F,
    n_points: usize,
) -> Result<DiscreteMeasure>
where
    F: Fn(f64) -> Vec<f64>,
{
    if n_points < 2 {
        return invalid("need at least two points");
    }
    let n = alg.dim();
    let mut points = Vec::with_capacity(n_points * n);
    let mut weights = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let t = (i as f64 + 0.5) / n_points as f64;
        let p = gamma(t);
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
        points.extend(p);
        weights.push(bump01(t));
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    DiscreteMeasure::new(alg, points, weights)
}

/// Normalised surface measure on `exp` of the boundary of a convex body.
///
/// Rays from the origin along quasi-uniform directions `W` meet the boundary
/// at `t(W) W`; each point carries the area factor
/// `t^{n-1} |grad rho| / (grad rho . W)` of the radial projection.
pub fn convex_boundary_measure(
    alg: &GradedLieAlgebra,
    gauge: &dyn ConvexGauge,
    n_points: usize,
    seed: u64,
) -> Result<DiscreteMeasure> {
    let n = alg.dim();
    if gauge.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gauge.dim(),
        });
    }
    if n_points == 0 {
        return invalid("need at least one point");
    }
    let dirs = sphere_points(n, n_points, seed);
    let origin = vec![0.0; n];
    let mut points = Vec::with_capacity(n_points * n);
    let mut weights = Vec::with_capacity(n_points);
    for w in dirs.chunks(n) {
        let t = gauge.chord(&origin, w)?;
        let p: Vec<f64> = w.iter().map(|v| t * v).collect();
        let g = gauge.gradient(&p);
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let gw: f64 = g.iter().zip(w).map(|(a, b)| a * b).sum();
        if !(gw > 0.0) {
            return Err(Error::GaugeFailure);
        }
        weights.push(t.powi(n as i32 - 1) * gn / gw);
        points.extend(p);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    DiscreteMeasure::new(alg, points, weights)
}

/// Largest deviation of `|x|^4 + u^2` from 1 over a sample.
#[cfg(test)]
fn koranyi_residual(m: &DiscreteMeasure) -> f64 {
    m.points()
        .chunks(m.dim())
        .map(|p| {
            let r2: f64 = p[..p.len() - 1].iter().map(|v| v * v).sum();
            (r2 * r2 + p[p.len() - 1].powi(2) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::generator_test;
    use crate::algebras;
    use crate::group::GroupElement;
    use crate::measure::{EuclideanBall, KoranyiBall};

    #[test]
    fn koranyi_points_on_sphere() {
        for m in [1, 2] {
            let s = koranyi_sphere(m, 2000, 5).unwrap();
            assert!(koranyi_residual(&s) < 1e-12);
            assert!((s.total_mass() - 1.0).abs() < 1e-12);
            assert!(s.support_radius() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn koranyi_centre_moment_vanishes() {
        let s = koranyi_sphere(1, 10_000, 9).unwrap();
        let mean_u: f64 = s
            .points()
            .chunks(3)
            .zip(s.weights())
            .map(|(p, w)| w * p[2])
            .sum();
        // Standard error of the mean of u for 1e4 iid points is about 0.006.
        assert!(mean_u.abs() < 0.02, "{mean_u}");
    }

    #[test]
    fn convex_gauge_matches_direct_koranyi_sampler() {
        let h = algebras::heisenberg(1);
        let a = koranyi_sphere(1, 10_000, 1).unwrap();
        let b = convex_boundary_measure(&h, &KoranyiBall { m: 1 }, 10_000, 2).unwrap();
        let moments = |s: &DiscreteMeasure| {
            let mut u2 = 0.0;
            let mut r2 = 0.0;
            for (p, w) in s.points().chunks(3).zip(s.weights()) {
                u2 += w * p[2] * p[2];
                r2 += w * (p[0] * p[0] + p[1] * p[1]);
            }
            (u2, r2)
        };
        let (ua, ra) = moments(&a);
        let (ub, rb) = moments(&b);
        assert!(
            (ua - ub).abs() < 0.01 && (ra - rb).abs() < 0.01,
            "{ua} {ub} {ra} {rb}"
        );
        let k = KoranyiBall { m: 1 };
        assert!(b
            .points()
            .chunks(3)
            .all(|p| (k.value(p) - 1.0).abs() < 1e-9));
    }

    #[test]
    fn euclidean_ball_gives_equal_weights() {
        let a = algebras::abelian(3);
        let s = convex_boundary_measure(
            &a,
            &EuclideanBall {
                dim: 3,
                radius: 1.0,
            },
            500,
            0,
        )
        .unwrap();
        let w0 = s.weights()[0];
        assert!(s.weights().iter().all(|w| (w - w0).abs() < 1e-9));
    }

    #[test]
    fn horizontal_and_tilted_spheres() {
        let h = algebras::heisenberg(1);
        let s = horizontal_sphere(&h, 64, 0).unwrap();
        assert!(s
            .points()
            .chunks(3)
            .all(|p| p[2] == 0.0 && ((p[0] * p[0] + p[1] * p[1]) - 1.0).abs() < 1e-12));
        let t = tilted_sphere(1, &[1.0, 0.0], 64, 0).unwrap();
        assert!(t.points().chunks(3).all(|p| p[2] == p[0]));
        let pts: Vec<GroupElement> = t
            .points()
            .chunks(3)
            .map(|p| GroupElement::new(p.to_vec()))
            .collect();
        assert!(generator_test(&h, &pts).unwrap().generates);
        assert_eq!(
            horizontal_sphere(&algebras::abelian_two_layer(), 8, 0).unwrap_err(),
            Error::NotStratified { layer: 2 }
        );
        assert_eq!(
            horizontal_sphere(&algebras::abelian(1), 8, 0).unwrap_err(),
            Error::DegenerateLayer { dim: 1 }
        );
    }

    #[test]
    fn curve_examples() {
        let a = algebras::abelian(2);
        let c = curve_measure(&a, |t| vec![t, t * t], 50).unwrap();
        assert!(c.points().chunks(2).all(|p| p[1] == p[0] * p[0]));
        let pm = curve_measure(&a, |_| vec![0.5, 0.5], 10).unwrap();
        assert!((pm.total_variation() - 1.0).abs() < 1e-12);
    }
}
