//! Experiment configuration: a JSON file with flag overrides.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Registered drivers, grouped as `(group, name)`.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("algebra", "check"),
    ("algebra", "gentest"),
    ("algebra", "adkernel"),
    ("algebra", "stratified"),
    ("measure", "build"),
    ("measure", "convpow"),
    ("measure", "ca"),
    ("measure", "fourier"),
    ("op", "average"),
    ("op", "maximal"),
    ("op", "psi"),
    ("op", "norm"),
    ("verify", "l2decay"),
    ("verify", "ao"),
    ("verify", "hormander"),
    ("verify", "meanvalue"),
    ("verify", "convexchord"),
];

pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    /// Algebra file, or a built-in name such as `heisenberg1`.
    #[serde(default = "default_algebra")]
    pub algebra: String,
    #[serde(default)]
    pub measure: MeasureSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default = "default_out")]
    pub out: String,
}

/// A measure: a named family with its sampling parameters, or a file.
///
/// Kinds: `koranyi`, `horizontal`, `tilted` (uses `tilt`), `sphere` (unit
/// Euclidean sphere in all coordinates), `moment` (moment curve in the first
/// layer), `point`, `bump`, `file` (uses `path`). With `mean_zero` a smooth
/// bump of equal mass is subtracted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSpec {
    pub kind: String,
    pub points: usize,
    pub seed: u64,
    pub path: Option<String>,
    pub tilt: Option<Vec<f64>>,
    pub mean_zero: bool,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        Self {
            kind: "koranyi".into(),
            points: 400,
            seed: 3,
            path: None,
            tilt: None,
            mean_zero: false,
        }
    }
}

/// Box `[-half_a, half_a]` per axis with `resolution_a` nodes. A single
/// entry applies to every axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub half: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half: vec![2.5],
            resolution: vec![DEFAULT_RESOLUTION],
        }
    }
}

/// Driver parameters. Unset values take per-driver defaults, which are
/// reported in each summary.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub js: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ls: Option<Vec<i32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// A group element: `z` for mean-value, `y` for Hörmander sums, the base
    /// point for chords.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

fn default_algebra() -> String {
    "heisenberg1".into()
}

fn default_threads() -> usize {
    1
}

fn default_out() -> String {
    "lacuna-out".into()
}

impl ExperimentConfig {
    /// A config for `experiment` with every default filled.
    pub fn new(experiment: &str) -> Result<Self> {
        let c = Self {
            experiment: experiment.into(),
            algebra: default_algebra(),
            measure: MeasureSpec::default(),
            grid: GridSpec::default(),
            params: Params::default(),
            seed: 0,
            threads: default_threads(),
            out: default_out(),
        };
        c.validate()?;
        Ok(c)
    }

    /// Parses and validates config text.
    pub fn parse(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(CliError::from_json)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Pretty JSON that [`ExperimentConfig::parse`] reads back unchanged.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn group(&self) -> &'static str {
        EXPERIMENTS
            .iter()
            .find(|(_, n)| *n == self.experiment)
            .map(|(g, _)| *g)
            .expect("validated experiment")
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.iter().any(|(_, n)| *n == self.experiment) {
            return Err(CliError::UnknownExperiment(self.experiment.clone()));
        }
        if self.threads == 0 {
            return Err(CliError::Invalid("threads must be at least 1".into()));
        }
        let g = &self.grid;
        if g.half.is_empty() || g.resolution.is_empty() {
            return Err(CliError::Invalid("grid needs half-widths and resolutions".into()));
        }
        if g.half.iter().any(|h| !(*h > 0.0)) || g.resolution.iter().any(|&r| r < 2) {
            return Err(CliError::Invalid(
                "grid half-widths must be positive and resolutions at least 2".into(),
            ));
        }
        if self.measure.points == 0 {
            return Err(CliError::Invalid("measure needs at least one point".into()));
        }
        if self.measure.kind == "file" && self.measure.path.is_none() {
            return Err(CliError::MissingField("measure.path".into()));
        }
        Ok(())
    }
}

/// Parses `a..b` (inclusive), a comma list, or a single integer.
pub fn parse_int_list<T: TryFrom<i64>>(s: &str) -> std::result::Result<Vec<T>, String> {
    let s = s.trim();
    let int = |t: &str| -> std::result::Result<i64, String> {
        t.trim().parse().map_err(|_| format!("bad integer `{t}` in `{s}`"))
    };
    let values: Vec<i64> = match split_range(s) {
        Some((a, b)) => {
            let (a, b) = (int(a)?, int(b)?);
            if a > b {
                return Err(format!("empty range `{s}`"));
            }
            (a..=b).collect()
        }
        None => s.split(',').map(int).collect::<std::result::Result<_, _>>()?,
    };
    values
        .into_iter()
        .map(|v| T::try_from(v).map_err(|_| format!("`{v}` out of range in `{s}`")))
        .collect()
}

fn split_range(s: &str) -> Option<(&str, &str)> {
    let i = s.find("..")?;
    Some((&s[..i], &s[i + 2..]))
}

/// Parses a comma list of floats.
pub fn parse_float_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad number `{t}`"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = ExperimentConfig::parse(r#"{"experiment": "l2decay", "algebra": "heisenberg1"}"#)
            .unwrap();
        assert_eq!(c.grid.resolution, vec![64]);
        assert_eq!(c.threads, 1);
        assert_eq!(ExperimentConfig::parse(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = ExperimentConfig::parse(r#"{"experiment": "l2decay", "fourier_mode": 1}"#)
            .unwrap_err();
        match e {
            CliError::Parse { message, line, .. } => {
                assert!(message.contains("fourier_mode"), "{message}");
                assert_eq!(line, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_and_unknown_experiment() {
        assert!(matches!(
            ExperimentConfig::parse("{}"),
            Err(CliError::MissingField(f)) if f == "experiment"
        ));
        assert!(matches!(
            ExperimentConfig::parse(r#"{"experiment": "nope"}"#),
            Err(CliError::UnknownExperiment(_))
        ));
    }

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_int_list::<i32>("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_int_list::<i32>("-2..0").unwrap(), vec![-2, -1, 0]);
        assert_eq!(parse_int_list::<i32>("4, -1").unwrap(), vec![4, -1]);
        assert!(parse_int_list::<i32>("3..1").is_err());
        assert_eq!(parse_float_list("0.5,1e-1").unwrap(), vec![0.5, 0.1]);
        assert!(parse_float_list("nan").is_err());
    }
}
