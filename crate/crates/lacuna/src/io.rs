//! On-disk formats for algebras and measures.
//!
//! Algebras are JSON objects with `dim`, `exponents` (rationals as `"p/q"`
//! strings), `layers` (weight of each basis index) and `brackets` (entries
//! `[i, j, k, "p/q"]` with 1-based indices). Measures are JSON objects with
//! `dim`, `points` (one array per point), `weights` and `mean_zero`.

use std::fs;
use std::path::Path;

use lacuna_core::{algebras, AlgebraSpec, DiscreteMeasure, GradedLieAlgebra, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    dim: usize,
    exponents: Vec<String>,
    layers: Vec<u32>,
    brackets: Vec<(usize, usize, usize, String)>,
}

fn rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| CliError::Invalid(format!("`{s}` is not a rational of the form p/q")))
}

fn rational_string(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses an algebra file into an unvalidated spec.
pub fn parse_algebra(text: &str) -> Result<AlgebraSpec> {
    let file: AlgebraFile = serde_json::from_str(text).map_err(CliError::from_json)?;
    Ok(AlgebraSpec {
        dim: file.dim,
        exponents: file
            .exponents
            .iter()
            .map(|s| rational(s))
            .collect::<Result<_>>()?,
        layers: file.layers,
        brackets: file
            .brackets
            .iter()
            .map(|(i, j, k, c)| Ok((*i, *j, *k, rational(c)?)))
            .collect::<Result<_>>()?,
    })
}

/// Pretty JSON for an algebra spec; round-trips through [`parse_algebra`].
pub fn algebra_json(spec: &AlgebraSpec) -> String {
    let file = AlgebraFile {
        dim: spec.dim,
        exponents: spec.exponents.iter().map(rational_string).collect(),
        layers: spec.layers.clone(),
        brackets: spec
            .brackets
            .iter()
            .map(|(i, j, k, c)| (*i, *j, *k, rational_string(c)))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serialises") + "\n"
}

/// Loads an algebra from a file path, or by built-in name when no such file
/// exists (`heisenberg1`, `free-2-3`, `engel4`, `abelian2`, ...). A trailing
/// `.json` is ignored when falling back to built-in names.
pub fn load_algebra(name_or_path: &str) -> Result<GradedLieAlgebra> {
    let path = Path::new(name_or_path);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        return Ok(GradedLieAlgebra::from_spec(&parse_algebra(&text)?)?);
    }
    let stem = path
        .file_name()
        .and_then(|s| s.to_str())
        .map(|s| s.trim_end_matches(".json"))
        .unwrap_or(name_or_path);
    algebras::by_name(stem).ok_or_else(|| CliError::UnknownAlgebra(name_or_path.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    #[serde(default)]
    mean_zero: bool,
}

/// JSON for a point cloud.
pub fn measure_json(sigma: &DiscreteMeasure) -> String {
    let file = MeasureFile {
        dim: sigma.dim(),
        points: sigma.points().chunks(sigma.dim()).map(<[f64]>::to_vec).collect(),
        weights: sigma.weights().to_vec(),
        mean_zero: sigma.is_mean_zero(),
    };
    serde_json::to_string(&file).expect("finite data serialises") + "\n"
}

/// Parses a measure file against `alg`; a `mean_zero` flag is re-validated.
pub fn parse_measure(alg: &GradedLieAlgebra, text: &str) -> Result<DiscreteMeasure> {
    let file: MeasureFile = serde_json::from_str(text).map_err(CliError::from_json)?;
    if file.points.iter().any(|p| p.len() != file.dim) {
        return Err(CliError::Invalid(format!(
            "every point must have {} coordinates",
            file.dim
        )));
    }
    let m = DiscreteMeasure::new(alg, file.points.concat(), file.weights)?;
    Ok(if file.mean_zero { m.mark_mean_zero()? } else { m })
}

/// Reads a measure file.
pub fn load_measure(alg: &GradedLieAlgebra, path: &Path) -> Result<DiscreteMeasure> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_measure(alg, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_algebras_round_trip() {
        for name in ["heisenberg1", "heisenberg2", "free-2-3", "engel4", "abelian3"] {
            let a = algebras::by_name(name).unwrap();
            let text = algebra_json(&a.to_spec());
            let b = GradedLieAlgebra::from_spec(&parse_algebra(&text).unwrap()).unwrap();
            assert_eq!(a.to_spec(), b.to_spec(), "{name}");
        }
    }

    #[test]
    fn bad_rational_and_unknown_key() {
        let bad = r#"{"dim":1,"exponents":["x"],"layers":[1],"brackets":[]}"#;
        assert!(matches!(parse_algebra(bad), Err(CliError::Invalid(_))));
        let extra = r#"{"dim":1,"exponents":["1"],"layers":[1],"brackets":[],"name":"a"}"#;
        assert!(matches!(parse_algebra(extra), Err(CliError::Parse { .. })));
    }

    #[test]
    fn measure_round_trip() {
        let a = algebras::abelian(2);
        let m = DiscreteMeasure::new(&a, vec![0.5, 0.0, -0.5, 0.0], vec![1.0, -1.0])
            .unwrap()
            .mark_mean_zero()
            .unwrap();
        let back = parse_measure(&a, &measure_json(&m)).unwrap();
        assert_eq!(back.points(), m.points());
        assert_eq!(back.weights(), m.weights());
        assert!(back.is_mean_zero());
    }
}
