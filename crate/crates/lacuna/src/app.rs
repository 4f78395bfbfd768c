//! Runs a configured experiment end to end and persists its artifacts.

use std::fs;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::drivers;
use crate::error::{CliError, Result};
use crate::report::{write_report, Artifact, ManifestEntry, SUMMARY};

/// Exit status contract.
pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_FLAGGED: i32 = 2;

/// Artifacts of a successful run.
#[derive(Debug)]
pub struct RunOutput {
    pub manifest: Vec<ManifestEntry>,
    pub flagged: bool,
}

/// Builds the summary and all artifacts without writing anything.
pub fn artifacts(cfg: &ExperimentConfig) -> Result<(Artifact, Vec<Artifact>, bool)> {
    let out = drivers::run(cfg)?;
    let flagged = !out.flags.is_empty();
    let config: Value = serde_json::from_str(&cfg.to_json()).expect("config is valid json");
    let summary = json!({
        "experiment": cfg.experiment,
        "group": cfg.group(),
        "library_version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "seeds": {"global": cfg.seed, "measure": cfg.measure.seed},
        "status": if flagged { "flagged" } else { "ok" },
        "flags": out.flags,
        "results": out.results,
    });
    let summary = Artifact::new(
        SUMMARY,
        serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n",
    );
    let mut files = Vec::new();
    if let Some(t) = out.table {
        files.push(Artifact::new("results.csv", t.to_csv()));
    }
    if let Some(p) = out.plot {
        files.push(Artifact::new("plot.svg", p.to_svg()));
    }
    files.extend(out.extra);
    Ok((summary, files, flagged))
}

/// Runs `cfg` and writes its report into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig, force: bool) -> Result<RunOutput> {
    let out_dir = Path::new(&cfg.out);
    if out_dir.join(crate::report::MANIFEST).exists() && !force {
        return Err(CliError::Clobber(out_dir.to_path_buf()));
    }
    let (summary, files, flagged) = artifacts(cfg)?;
    let manifest = write_report(out_dir, &summary, &files, force)?;
    let stale = out_dir.join("error.json");
    if stale.exists() {
        fs::remove_file(&stale).map_err(|e| CliError::io(&stale, e))?;
    }
    Ok(RunOutput { manifest, flagged })
}

/// JSON record describing a failed run.
pub fn error_record(cfg: Option<&ExperimentConfig>, e: &CliError) -> String {
    let rec = json!({
        "status": "error",
        "kind": e.kind(),
        "message": e.to_string(),
        "experiment": cfg.map(|c| c.experiment.clone()),
    });
    serde_json::to_string_pretty(&rec).expect("record serialises") + "\n"
}

/// Maps a run result to an exit code, reporting errors on stderr and, when
/// the output directory is usable, in `error.json`.
pub fn finish(cfg: Option<&ExperimentConfig>, result: Result<RunOutput>) -> i32 {
    match result {
        Ok(r) if r.flagged => EXIT_FLAGGED,
        Ok(_) => EXIT_OK,
        Err(e) => {
            let rec = error_record(cfg, &e);
            eprint!("{rec}");
            if let (Some(c), false) = (cfg, matches!(e, CliError::Clobber(_))) {
                let dir = Path::new(&c.out);
                if fs::create_dir_all(dir).is_ok() {
                    let _ = fs::write(dir.join("error.json"), &rec);
                }
            }
            EXIT_ERROR
        }
    }
}
