//! Result files and their manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const SUMMARY: &str = "summary.json";

/// One output file, held in memory until the report is written.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self {
            name: name.into(),
            bytes: bytes.into(),
        }
    }
}

/// A CSV table with a header row.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }
}

/// Manifest entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Writes `summary` and `artifacts` into `out_dir` followed by a manifest of
/// content hashes. Refuses a directory that already holds a manifest unless
/// `force` is set.
pub fn write_report(
    out_dir: &Path,
    summary: &Artifact,
    artifacts: &[Artifact],
    force: bool,
) -> Result<Vec<ManifestEntry>> {
    let manifest_path = out_dir.join(MANIFEST);
    if manifest_path.exists() && !force {
        return Err(CliError::Clobber(out_dir.to_path_buf()));
    }
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut entries = Vec::with_capacity(artifacts.len() + 1);
    for a in std::iter::once(summary).chain(artifacts) {
        if a.name == MANIFEST || a.name.contains(['/', '\\']) {
            return Err(CliError::Invalid(format!("bad artifact name `{}`", a.name)));
        }
        let path: PathBuf = out_dir.join(&a.name);
        fs::write(&path, &a.bytes).map_err(|e| CliError::io(&path, e))?;
        entries.push(ManifestEntry {
            name: a.name.clone(),
            sha256: sha256_hex(&a.bytes),
            bytes: a.bytes.len(),
        });
    }
    let text = serde_json::to_string_pretty(&serde_json::json!({ "files": entries }))
        .expect("manifest serialises")
        + "\n";
    fs::write(&manifest_path, text).map_err(|e| CliError::io(&manifest_path, e))?;
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_only_manifest_and_no_clobber() {
        let dir = tempfile::tempdir().unwrap();
        let s = Artifact::new(SUMMARY, "{}\n");
        let m = write_report(dir.path(), &s, &[], false).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].sha256, sha256_hex(b"{}\n"));
        assert!(matches!(
            write_report(dir.path(), &s, &[], false),
            Err(CliError::Clobber(_))
        ));
        assert!(write_report(dir.path(), &s, &[], true).is_ok());
    }

    #[test]
    fn hashes_match_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "2.5".into()]);
        let arts = [Artifact::new("results.csv", t.to_csv())];
        let m = write_report(dir.path(), &Artifact::new(SUMMARY, "{}"), &arts, false).unwrap();
        for e in m {
            let bytes = fs::read(dir.path().join(&e.name)).unwrap();
            assert_eq!(sha256_hex(&bytes), e.sha256);
        }
        assert_eq!(
            fs::read_to_string(dir.path().join("results.csv")).unwrap(),
            "a,b\n1,2.5\n"
        );
    }
}
