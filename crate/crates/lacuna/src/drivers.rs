//! One driver per subcommand. Each turns a config into results, a CSV table,
//! an optional plot and extra files; none of them touches the filesystem
//! except to read inputs named in the config.

use std::path::Path;

use lacuna_core::algebra::{ad_kernel_dim, check_stratified, generator_test};
use lacuna_core::fit::DecayFit;
use lacuna_core::group::{
    default_derivative_step, dilate, hom_norm, inverse, multiply, quasi_triangle_const,
};
use lacuna_core::measure::{
    conv_product, dilate_measure, fourier_decay_fit, horizontal_sphere, koranyi_sphere,
    sphere_points, tilted_sphere, curve_measure, EuclideanBall, KoranyiBall, ConvexGauge,
};
use lacuna_core::operator::{average, build_psi, lacunary_maximal, lp_norm, op_norm_l2};
use lacuna_core::verify::{
    almost_orthogonality_experiment, ca_sweep, convex_double_point, hormander_integral,
    hormander_kernel, hormander_sum, l2_decay_experiment, mean_value_from_norms,
    right_derivative_norms,
};
use lacuna_core::{
    algebras, rng, AlgebraVector, DiscreteMeasure, GradedLieAlgebra, Grid, GridFunction,
    GroupElement,
};
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::io;
use crate::plot::Plot;
use crate::report::{Artifact, Table};

/// What a driver produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Value,
    pub table: Option<Table>,
    pub plot: Option<Plot>,
    pub extra: Vec<Artifact>,
    /// Experiment-level findings that make the run exit with status 2.
    pub flags: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    let alg = io::load_algebra(&cfg.algebra)?;
    let ctx = Ctx { cfg, alg: &alg };
    match cfg.experiment.as_str() {
        "check" => ctx.check(),
        "gentest" => ctx.gentest(),
        "adkernel" => ctx.adkernel(),
        "stratified" => ctx.stratified(),
        "build" => ctx.build(),
        "convpow" => ctx.convpow(),
        "ca" => ctx.ca(),
        "fourier" => ctx.fourier(),
        "average" => ctx.average(),
        "maximal" => ctx.maximal(),
        "psi" => ctx.psi(),
        "norm" => ctx.norm(),
        "l2decay" => ctx.l2decay(),
        "ao" => ctx.ao(),
        "hormander" => ctx.hormander(),
        "meanvalue" => ctx.meanvalue(),
        "convexchord" => ctx.convexchord(),
        other => Err(CliError::UnknownExperiment(other.into())),
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    alg: &'a GradedLieAlgebra,
}

fn num(v: f64) -> String {
    v.to_string()
}

fn fit_json(f: &DecayFit) -> Value {
    json!({
        "exponent": f.exponent,
        "intercept": f.intercept,
        "r_squared": f.r_squared,
        "samples": f.samples,
        "flags": f.flags.iter().map(|g| g.name()).collect::<Vec<_>>(),
    })
}

fn fit_flags(what: &str, f: &DecayFit, out: &mut Vec<String>) {
    out.extend(f.flags.iter().map(|g| format!("{what}: {}", g.name())));
}

/// `sign` is -1 for decay fits and +1 for growth fits.
fn fit_plot(title: &str, x_label: &str, f: &DecayFit, sign: f64) -> Plot {
    Plot {
        title: title.into(),
        x_label: x_label.into(),
        y_label: "log2 value".into(),
        points: f.samples.clone(),
        line: f.exponent.is_finite().then_some((f.intercept, sign * f.exponent)),
    }
}

/// `exp(-1 / (1 - r2))` for `r2 < 1`.
pub fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// Bump with homogeneous radius `r`: `bump(sum_j (x_j / r^lambda_j)^2)`.
fn homogeneous_bump(alg: &GradedLieAlgebra, r: f64, x: &[f64]) -> f64 {
    bump(
        x.iter()
            .zip(alg.exponents_f64())
            .map(|(v, l)| (v / r.powf(*l)).powi(2))
            .sum(),
    )
}

fn heisenberg_degree(alg: &GradedLieAlgebra) -> Option<usize> {
    let n = alg.dim();
    (n >= 3 && n % 2 == 1)
        .then_some((n - 1) / 2)
        .filter(|&m| alg.to_spec() == algebras::heisenberg_spec(m))
}

fn identity_seed(tag: u64, seed: u64) -> u64 {
    rng::derive(seed, tag)
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.alg.dim()
    }

    fn grid(&self) -> Result<Grid> {
        let g = &self.cfg.grid;
        let n = self.n();
        let pick = |len: usize, a: usize| if len == 1 { 0 } else { a };
        if (g.half.len() != 1 && g.half.len() != n)
            || (g.resolution.len() != 1 && g.resolution.len() != n)
        {
            return Err(CliError::Invalid(format!(
                "grid needs 1 or {n} half-widths and resolutions"
            )));
        }
        let half: Vec<f64> = (0..n).map(|a| g.half[pick(g.half.len(), a)]).collect();
        let res: Vec<usize> = (0..n)
            .map(|a| g.resolution[pick(g.resolution.len(), a)])
            .collect();
        Ok(Grid::symmetric(&half, &res)?)
    }

    fn measure(&self) -> Result<DiscreteMeasure> {
        let spec = &self.cfg.measure;
        let alg = self.alg;
        let n = self.n();
        let heis = || {
            heisenberg_degree(alg).ok_or_else(|| {
                CliError::Invalid(format!("measure `{}` needs a Heisenberg algebra", spec.kind))
            })
        };
        let m = match spec.kind.as_str() {
            "koranyi" => koranyi_sphere(heis()?, spec.points, spec.seed)?,
            "horizontal" => horizontal_sphere(alg, spec.points, spec.seed)?,
            "tilted" => {
                let m = heis()?;
                let v = spec.tilt.clone().unwrap_or_else(|| {
                    let mut v = vec![0.0; 2 * m];
                    v[0] = 1.0;
                    v
                });
                tilted_sphere(m, &v, spec.points, spec.seed)?
            }
            "sphere" => DiscreteMeasure::new(
                alg,
                sphere_points(n, spec.points, spec.seed),
                vec![1.0 / spec.points as f64; spec.points],
            )?,
            "moment" => {
                let v1 = alg.layer_indices(1);
                curve_measure(
                    alg,
                    |t| {
                        let mut p = vec![0.0; n];
                        for (a, &j) in v1.iter().enumerate() {
                            p[j] = t.powi(a as i32 + 1);
                        }
                        p
                    },
                    spec.points.max(2),
                )?
            }
            "point" => DiscreteMeasure::point_mass(alg, &GroupElement::identity(n))?,
            "bump" => self.bump_cloud(0.4)?,
            "file" => {
                let path = spec.path.as_deref().expect("validated");
                io::load_measure(alg, Path::new(path))?
            }
            other => return Err(CliError::Invalid(format!("unknown measure kind `{other}`"))),
        };
        if spec.mean_zero && !m.is_mean_zero() {
            Ok(m.minus_matching(&self.bump_cloud(0.4)?)?)
        } else {
            Ok(m)
        }
    }

    /// Normalised smooth bump of homogeneous radius `r`, as a 9-node-per-axis cloud.
    fn bump_cloud(&self, r: f64) -> Result<DiscreteMeasure> {
        let half: Vec<f64> = self
            .alg
            .exponents_f64()
            .iter()
            .map(|l| 1.25 * r.powf(*l))
            .collect();
        let g = Grid::symmetric(&half, &vec![9; self.n()])?;
        let alg = self.alg;
        let f = GridFunction::from_fn(g, |x| homogeneous_bump(alg, r, x));
        let f = f.scaled(1.0 / f.quadrature());
        Ok(f.to_measure(alg)?)
    }

    /// Mean-zero version of the configured measure.
    fn mean_zero_measure(&self) -> Result<DiscreteMeasure> {
        let m = self.measure()?;
        if m.is_mean_zero() {
            Ok(m)
        } else {
            Ok(m.minus_matching(&self.bump_cloud(0.4)?)?)
        }
    }

    /// Littlewood–Paley kernel from a bump of homogeneous radius 0.3 on a box
    /// of half-width `1.2 * 0.6^lambda` with `32 lambda + 1` nodes per axis.
    fn psi(&self) -> Result<Outcome> {
        let psi = self.psi_function()?;
        let mut t = Table::new(&["x", "psi"]);
        line_through_centre(&psi, |x, i| t.push(vec![num(x), num(psi.values()[i])]));
        Ok(Outcome {
            results: json!({
                "integral": psi.quadrature(),
                "l1_norm": psi.abs_quadrature(),
                "max_abs": psi.max_abs(),
                "resolution": psi.grid().resolution(),
                "t_nodes": self.t_nodes(),
            }),
            table: Some(t),
            ..Default::default()
        })
    }

    fn t_nodes(&self) -> usize {
        self.cfg.params.t_nodes.unwrap_or(16)
    }

    fn psi_function(&self) -> Result<GridFunction> {
        let alg = self.alg;
        let exps = alg.exponents_f64();
        let half: Vec<f64> = exps.iter().map(|l| 1.2 * 0.6f64.powf(*l)).collect();
        let res: Vec<usize> = exps.iter().map(|l| (32.0 * l).round() as usize + 1).collect();
        let g = Grid::symmetric(&half, &res)?;
        let phi = GridFunction::from_fn(g, |x| homogeneous_bump(alg, 0.3, x));
        let phi = phi.scaled(1.0 / phi.quadrature());
        Ok(build_psi(alg, &phi, self.t_nodes())?)
    }

    fn psi_cloud(&self) -> Result<DiscreteMeasure> {
        let psi = self.psi_function()?;
        Ok(psi.to_measure_blocked(self.alg, &vec![4; self.n()])?)
    }

    /// Test function: bump of half the box on every axis.
    fn test_function(&self, grid: &Grid) -> GridFunction {
        let half: Vec<f64> = grid.hi().to_vec();
        GridFunction::from_fn(grid.clone(), |x| {
            bump(x.iter().zip(&half).map(|(v, h)| (2.0 * v / h).powi(2)).sum())
        })
    }

    fn random_vectors(&self, count: usize, tag: u64) -> Vec<Vec<f64>> {
        let mut g = rng::stream(self.cfg.seed, tag);
        (0..count)
            .map(|_| (0..self.n()).map(|_| rng::uniform(&mut g, -1.0, 1.0)).collect())
            .collect()
    }

    fn check(&self) -> Result<Outcome> {
        let alg = self.alg;
        let samples = self.cfg.params.samples.unwrap_or(1000);
        let xs = self.random_vectors(3 * samples, 1);
        let e = GroupElement::identity(self.n());
        let rel = |a: &GroupElement, b: &GroupElement| {
            let scale = a.coords().iter().fold(1.0f64, |m, v| m.max(v.abs()));
            a.coords()
                .iter()
                .zip(b.coords())
                .fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))
                / scale
        };
        let (mut assoc, mut ident, mut inv) = (0.0f64, 0.0f64, 0.0f64);
        for c in xs.chunks(3) {
            let [x, y, z] = [0, 1, 2].map(|i| GroupElement::new(c[i].clone()));
            let l = multiply(alg, &multiply(alg, &x, &y)?, &z)?;
            let r = multiply(alg, &x, &multiply(alg, &y, &z)?)?;
            assoc = assoc.max(rel(&l, &r));
            ident = ident.max(rel(&multiply(alg, &x, &e)?, &x));
            inv = inv.max(rel(&multiply(alg, &x, &inverse(&x))?, &e));
        }
        let strat = check_stratified(alg);
        let mut flags = Vec::new();
        if assoc > 1e-10 || ident > 1e-10 || inv > 1e-10 {
            flags.push("group axioms exceed 1e-10".into());
        }
        Ok(Outcome {
            results: json!({
                "dim": alg.dim(),
                "exponents": alg.exponents_f64(),
                "layers": alg.layers(),
                "homogeneous_dimension": alg.q(),
                "step": alg.step(),
                "law_terms": alg.law_terms(),
                "stratified": strat.stratified,
                "samples": samples,
                "max_associativity_error": assoc,
                "max_identity_error": ident,
                "max_inverse_error": inv,
                "algebra": serde_json::from_str::<Value>(&io::algebra_json(&alg.to_spec())).expect("valid json"),
            }),
            flags,
            ..Default::default()
        })
    }

    fn gentest(&self) -> Result<Outcome> {
        let m = self.measure()?;
        let sample: Vec<GroupElement> = m
            .points()
            .chunks(self.n())
            .map(|p| GroupElement::new(p.to_vec()))
            .collect();
        let r = generator_test(self.alg, &sample)?;
        Ok(Outcome {
            results: json!({
                "generates": r.generates,
                "rank": r.rank,
                "layer_dim": r.layer_dim,
                "sample_size": r.sample_size,
            }),
            ..Default::default()
        })
    }

    fn adkernel(&self) -> Result<Outcome> {
        let samples = self.cfg.params.samples.unwrap_or(1000);
        let mut t = Table::new(&["sample", "kernel_dim"]);
        let (mut lo, mut violations) = (usize::MAX, 0usize);
        for (i, x) in self.random_vectors(samples, 2).into_iter().enumerate() {
            let d = ad_kernel_dim(self.alg, &AlgebraVector::new(x))?;
            lo = lo.min(d);
            violations += usize::from(d < 2);
            t.push(vec![i.to_string(), d.to_string()]);
        }
        let mut flags = Vec::new();
        if violations > 0 {
            flags.push(format!("{violations} samples with kernel dimension below 2"));
        }
        Ok(Outcome {
            results: json!({"samples": samples, "min_kernel_dim": lo, "violations": violations}),
            table: Some(t),
            flags,
            ..Default::default()
        })
    }

    fn stratified(&self) -> Result<Outcome> {
        let r = check_stratified(self.alg);
        let mut t = Table::new(&["weight", "bracket_rank", "layer_dim"]);
        for (w, rank, dim) in &r.ranks {
            t.push(vec![w.to_string(), rank.to_string(), dim.to_string()]);
        }
        Ok(Outcome {
            results: json!({"stratified": r.stratified, "deficient_layer": r.deficient_layer}),
            table: Some(t),
            ..Default::default()
        })
    }

    fn measure_summary(m: &DiscreteMeasure) -> Value {
        json!({
            "points": m.len(),
            "total_mass": m.total_mass(),
            "total_variation": m.total_variation(),
            "support_radius": m.support_radius(),
            "mean_zero": m.is_mean_zero(),
        })
    }

    fn build(&self) -> Result<Outcome> {
        let m = self.measure()?;
        Ok(Outcome {
            results: Self::measure_summary(&m),
            extra: vec![Artifact::new("measure.json", io::measure_json(&m))],
            ..Default::default()
        })
    }

    fn convpow(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let n = p.n.unwrap_or(1);
        let max_points = p.max_points.unwrap_or(100_000);
        let m = self.measure()?;
        let power = conv_product(self.alg, &m, n, max_points, identity_seed(4, self.cfg.seed))?;
        let mut r = Self::measure_summary(&power);
        r["n"] = json!(n);
        r["max_points"] = json!(max_points);
        Ok(Outcome {
            results: r,
            extra: vec![Artifact::new("measure.json", io::measure_json(&power))],
            ..Default::default()
        })
    }

    fn ca(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let ns = p.ns.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
        let bandwidth = p.bandwidth.unwrap_or(2.0);
        let stable_tol = p.stable_tol.unwrap_or(0.1);
        let radii = p.radii.clone().unwrap_or_else(|| vec![0.125, 0.25, 0.5, 1.0]);
        let directions = p.directions.unwrap_or(16);
        let max_points = p.max_points.unwrap_or(400_000);
        let sweep = ca_sweep(
            self.alg,
            &self.measure()?,
            &ns,
            &self.grid()?,
            bandwidth,
            stable_tol,
            &radii,
            directions,
            max_points,
            self.cfg.seed,
        )?;
        let mut t = Table::new(&["n", "points", "l1_change", "stable"]);
        for r in &sweep.rows {
            t.push(vec![r.n.to_string(), r.points.to_string(), num(r.l1_change), r.stable.to_string()]);
        }
        let mut flags = Vec::new();
        let (fit, plot) = match &sweep.fit {
            Some(f) => {
                fit_flags("modulus fit", &f.fit, &mut flags);
                (
                    json!({"fit": fit_json(&f.fit), "radii": f.radii, "moduli": f.moduli, "l1_norm": f.l1_norm}),
                    Some(fit_plot("translation modulus", "log2 radius", &f.fit, 1.0)),
                )
            }
            None => {
                flags.push("no stable convolution power".into());
                (Value::Null, None)
            }
        };
        Ok(Outcome {
            results: json!({
                "ns": ns, "bandwidth": bandwidth, "stable_tol": stable_tol,
                "directions": directions, "max_points": max_points,
                "smallest": sweep.smallest, "modulus": fit,
            }),
            table: Some(t),
            plot,
            flags,
            ..Default::default()
        })
    }

    fn fourier(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let radii = p.radii.clone().unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0, 32.0, 64.0]);
        let directions = p.directions.unwrap_or(8);
        let f = fourier_decay_fit(self.alg, &self.measure()?, &radii, directions, self.cfg.seed)?;
        let mut t = Table::new(&["log2_radius", "log2_max_abs"]);
        for (x, y) in &f.samples {
            t.push(vec![num(*x), num(*y)]);
        }
        let mut flags = Vec::new();
        fit_flags("fourier fit", &f, &mut flags);
        Ok(Outcome {
            results: json!({"radii": radii, "directions": directions, "fit": fit_json(&f)}),
            table: Some(t),
            plot: Some(fit_plot("Fourier decay", "log2 |xi|", &f, -1.0)),
            flags,
            ..Default::default()
        })
    }

    fn average(&self) -> Result<Outcome> {
        let k = self.cfg.params.k.unwrap_or(0);
        let grid = self.grid()?;
        let f = self.test_function(&grid);
        let sigma = dilate_measure(self.alg, k, &self.measure()?);
        let af = average(self.alg, &f, &sigma)?;
        let mut t = Table::new(&["x", "f", "average"]);
        line_through_centre(&f, |x, i| t.push(vec![num(x), num(f.values()[i]), num(af.values()[i])]));
        Ok(Outcome {
            results: json!({
                "k": k,
                "f": norms(&f)?,
                "average": norms(&af)?,
            }),
            table: Some(t),
            ..Default::default()
        })
    }

    fn maximal(&self) -> Result<Outcome> {
        let ks = self.cfg.params.ks.clone().unwrap_or_else(|| vec![-2, -1, 0, 1]);
        let (k_lo, k_hi) = window(&ks)?;
        let p = self.cfg.params.p.unwrap_or(2.0);
        let grid = self.grid()?;
        let f = self.test_function(&grid);
        let mf = lacunary_maximal(self.alg, &f, &self.measure()?, k_lo, k_hi)?;
        let mut t = Table::new(&["x", "f", "maximal"]);
        line_through_centre(&f, |x, i| t.push(vec![num(x), num(f.values()[i]), num(mf.values()[i])]));
        let (nf, nm) = (lp_norm(&f, p)?, lp_norm(&mf, p)?);
        Ok(Outcome {
            results: json!({
                "k_lo": k_lo, "k_hi": k_hi, "p": p,
                "lp_norm_f": nf, "lp_norm_maximal": nm, "ratio": nm / nf,
            }),
            table: Some(t),
            ..Default::default()
        })
    }

    fn norm(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let k = p.k.unwrap_or(0);
        let iters = p.iters.unwrap_or(200);
        let tol = p.tol.unwrap_or(1e-4);
        let sigma = dilate_measure(self.alg, k, &self.measure()?);
        let e = op_norm_l2(self.alg, &sigma, &self.grid()?, iters, tol, self.cfg.seed)?;
        Ok(Outcome {
            results: json!({
                "k": k, "iters": iters, "tol": tol,
                "norm": e.norm, "iterations": e.iterations, "restarts": e.restarts,
            }),
            ..Default::default()
        })
    }

    fn l2decay(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let gaps = p.gaps.clone().unwrap_or_else(|| (0..=8).collect());
        let iters = p.iters.unwrap_or(300);
        let tol = p.tol.unwrap_or(1e-3);
        let mu = self.psi_cloud()?;
        let theta = self.mean_zero_measure()?;
        let r = l2_decay_experiment(self.alg, &mu, &theta, &gaps, &self.grid()?, iters, tol, self.cfg.seed)?;
        let mut t = Table::new(&["gap", "norm", "iterations"]);
        for ((g, n), it) in r.gaps.iter().zip(&r.norms).zip(&r.iterations) {
            t.push(vec![g.to_string(), num(*n), it.to_string()]);
        }
        let mut flags = Vec::new();
        fit_flags("decay fit", &r.fit, &mut flags);
        Ok(Outcome {
            results: json!({"gaps": gaps, "iters": iters, "tol": tol, "norms": r.norms, "fit": fit_json(&r.fit)}),
            table: Some(t),
            plot: Some(fit_plot("operator norm against scale gap", "gap", &r.fit, -1.0)),
            flags,
            ..Default::default()
        })
    }

    fn ao(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let js = p.js.clone().unwrap_or_else(|| vec![0, 1]);
        let ks = p.ks.clone().unwrap_or_else(|| vec![-1, 0, 1]);
        let ls = p.ls.clone().unwrap_or_else(|| vec![-2, -1, 0]);
        let iters = p.iters.unwrap_or(300);
        let tol = p.tol.unwrap_or(1e-3);
        let mut triples = Vec::with_capacity(js.len() * ks.len() * ls.len());
        for &j in &js {
            for &k in &ks {
                triples.extend(ls.iter().map(|&l| (j, k, l)));
            }
        }
        let nu = self.mean_zero_measure()?;
        let psi = self.psi_cloud()?;
        let r = almost_orthogonality_experiment(self.alg, &nu, &psi, &triples, &self.grid()?, iters, tol, self.cfg.seed)?;
        let mut t = Table::new(&["j", "k", "l", "psi_nu", "nu_nu", "nu_psi", "psi_psi"]);
        for row in &r.rows {
            t.push(vec![
                row.j.to_string(), row.k.to_string(), row.l.to_string(),
                num(row.psi_nu), num(row.nu_nu), num(row.nu_psi), num(row.psi_psi),
            ]);
        }
        let mut flags = Vec::new();
        fit_flags("fit in |l|", &r.fit_l, &mut flags);
        fit_flags("fit in |j-k|", &r.fit_jk, &mut flags);
        Ok(Outcome {
            results: json!({
                "js": js, "ks": ks, "ls": ls, "iters": iters, "tol": tol,
                "fit_l": fit_json(&r.fit_l), "fit_jk": fit_json(&r.fit_jk),
            }),
            table: Some(t),
            plot: Some(fit_plot("almost orthogonality in |l|", "|l|", &r.fit_l, -1.0)),
            flags,
            ..Default::default()
        })
    }

    fn hormander(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let alg = self.alg;
        let l = p.l.unwrap_or(0);
        let ks = p.ks.clone().unwrap_or_else(|| (-6..=30).collect());
        let (k_lo, k_hi) = window(&ks)?;
        let radii = p.radii.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
        let dir = GroupElement::new(p.point.clone().unwrap_or_else(|| unit(self.n())));
        let dn = hom_norm(alg, &dir);
        if !(dn > 0.0) {
            return Err(CliError::Invalid("ray direction must not be the identity".into()));
        }
        let c0 = 2.0 * quasi_triangle_const(alg, 2000, self.cfg.seed);
        let kern = hormander_kernel(alg, &self.psi_function()?, &self.mean_zero_measure()?, l, &self.grid()?)?;
        let mut t = Table::new(&["radius", "sum"]);
        let mut sums = Vec::new();
        for &r in &radii {
            let y = dilate(alg, r / dn, &dir)?;
            let s = hormander_sum(alg, &kern, &y, k_lo, k_hi, c0)?;
            t.push(vec![num(r), num(s.sum)]);
            sums.push(s.sum);
        }
        let mut vanishing = 0.0f64;
        for k in -1..=1 {
            let y = dilate(alg, kern.vanishing_radius(k) / dn, &dir)?;
            vanishing = vanishing.max(hormander_integral(alg, &kern, k, &y, c0)?);
        }
        let mut flags = Vec::new();
        if vanishing > 1e-6 {
            flags.push(format!("integral beyond the vanishing radius is {vanishing:e}"));
        }
        Ok(Outcome {
            results: json!({
                "l": l, "k_lo": k_lo, "k_hi": k_hi, "c0": c0,
                "kernel_support_radius": kern.support_radius, "kernel_l1_norm": kern.l1_norm,
                "radii": radii, "sums": sums, "max_sum": sums.iter().cloned().fold(0.0, f64::max),
                "vanishing_max": vanishing,
            }),
            table: Some(t),
            flags,
            ..Default::default()
        })
    }

    fn meanvalue(&self) -> Result<Outcome> {
        let p = &self.cfg.params;
        let ks = p.ks.clone().unwrap_or_else(|| vec![1, 2, 3, 4]);
        let base = GroupElement::new(p.point.clone().unwrap_or_else(|| unit(self.n())));
        let grid = self.grid()?;
        let g = self.test_function(&grid);
        let norms = right_derivative_norms(self.alg, &g, default_derivative_step(&g))?;
        let mut t = Table::new(&["s", "norm_z", "lhs", "rhs", "ratio"]);
        let mut ratios = Vec::new();
        for &s in &ks {
            let z = dilate(self.alg, 2f64.powi(-s), &base)?;
            let r = mean_value_from_norms(self.alg, &g, &z, norms.clone())?;
            t.push(vec![s.to_string(), num(hom_norm(self.alg, &z)), num(r.lhs), num(r.rhs), num(r.ratio)]);
            ratios.push(r.ratio);
        }
        Ok(Outcome {
            results: json!({"ks": ks, "derivative_norms": norms, "ratios": ratios}),
            table: Some(t),
            ..Default::default()
        })
    }

    fn convexchord(&self) -> Result<Outcome> {
        let n = self.n();
        let p = &self.cfg.params;
        let x = GroupElement::new(p.point.clone().unwrap_or_else(|| {
            let mut v = vec![0.0; n];
            v[0] = 0.5;
            v
        }));
        let tol = p.tol.unwrap_or(1e-10);
        let koranyi;
        let euclid;
        let gauge: &dyn ConvexGauge = match heisenberg_degree(self.alg) {
            Some(m) => {
                koranyi = KoranyiBall { m };
                &koranyi
            }
            None => {
                euclid = EuclideanBall { dim: n, radius: 1.0 };
                &euclid
            }
        };
        let d = convex_double_point(self.alg, gauge, &x, tol)?;
        let mut flags = Vec::new();
        if d.boundary_residuals.0.max(d.boundary_residuals.1) > 1e-6 {
            flags.push("chord end points are off the boundary".into());
        }
        Ok(Outcome {
            results: json!({
                "x": x.coords(), "w": d.w.coords(), "direction": d.direction, "t": d.t,
                "residual": d.residual, "bracket": [d.bracket.0, d.bracket.1],
                "boundary_residuals": [d.boundary_residuals.0, d.boundary_residuals.1],
            }),
            flags,
            ..Default::default()
        })
    }
}

fn unit(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v
}

fn window(ks: &[i32]) -> Result<(i32, i32)> {
    match (ks.iter().min(), ks.iter().max()) {
        (Some(&a), Some(&b)) => Ok((a, b)),
        _ => Err(CliError::Invalid("empty scale window".into())),
    }
}

fn norms(f: &GridFunction) -> Result<Value> {
    Ok(json!({"l1": lp_norm(f, 1.0)?, "l2": lp_norm(f, 2.0)?, "linf": lp_norm(f, f64::INFINITY)?}))
}

/// Calls `visit(x, index)` along the first axis through the centre node.
fn line_through_centre(f: &GridFunction, mut visit: impl FnMut(f64, usize)) {
    let g = f.grid();
    let centre: usize = (1..g.dim())
        .map(|a| (g.resolution()[a] / 2) * g.strides()[a])
        .sum();
    for i in 0..g.resolution()[0] {
        let x = g.lo()[0] + i as f64 * g.spacings()[0];
        visit(x, centre + i * g.strides()[0]);
    }
}
