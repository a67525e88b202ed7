use std::fs;
use std::path::Path;

use super::experiment::{Experiment, ExperimentSummary, TrialRecord};
use crate::error::Result;

pub const SUMMARY_FILE: &str = "summary.json";
pub const TRIALS_FILE: &str = "trials.tsv";
pub const BOUNDS_FILE: &str = "bounds.json";

/// Writes `summary.json`, `trials.tsv` and `bounds.json` into `dir`.
pub fn persist(exp: &Experiment, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(
        dir.join(SUMMARY_FILE),
        serde_json::to_string_pretty(&exp.summary)? + "\n",
    )?;
    let bounds = serde_json::json!({
        "bounds": exp.summary.bounds,
        "coverage": exp.summary.coverage,
        "exhaustive": exp.summary.exhaustive,
    });
    fs::write(
        dir.join(BOUNDS_FILE),
        serde_json::to_string_pretty(&bounds)? + "\n",
    )?;
    let mut w = csv::WriterBuilder::new()
        .delimiter(b'\t')
        .from_path(dir.join(TRIALS_FILE))?;
    for r in &exp.trials {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<ExperimentSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn read_trials(path: &Path) -> Result<Vec<TrialRecord>> {
    let mut r = csv::ReaderBuilder::new().delimiter(b'\t').from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
