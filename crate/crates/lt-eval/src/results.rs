//! Tracker output directories: `<results>/<tracker>/<sequence>.txt` holds the
//! trajectory and `<results>/<tracker>/<sequence>.time` the timing log.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lt_eval_core::analyses::TrackerResults;
use lt_eval_core::{SequenceRecord, TimingLog, Trajectory};
use rayon::prelude::*;

use crate::error::{Error, IoContext, Result};
use crate::manifest::{read_text, write_text};

/// Tracker names (sub-directories of `results`), sorted.
pub fn discover_trackers(results: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(results).at(results)? {
        let entry = entry.at(results)?;
        if entry.path().is_dir() {
            names.push(entry.file_name().to_string_lossy().into_owned());
        }
    }
    names.sort();
    if names.is_empty() {
        return Err(Error::NoTrackers(results.to_path_buf()));
    }
    Ok(names)
}

pub fn trajectory_path(results: &Path, tracker: &str, sequence: &str) -> PathBuf {
    results.join(tracker).join(format!("{sequence}.txt"))
}

pub fn timing_path(results: &Path, tracker: &str, sequence: &str) -> PathBuf {
    results.join(tracker).join(format!("{sequence}.time"))
}

fn load_one(results: &Path, tracker: &str, seq: &SequenceRecord) -> Result<Trajectory> {
    let path = trajectory_path(results, tracker, &seq.name);
    let text = read_text(&path)?;
    Trajectory::parse(&text, seq.len()).map_err(|source| Error::Format { path, source })
}

fn report_problems(problems: Vec<(String, Vec<String>)>) -> Result<()> {
    if problems.is_empty() {
        return Ok(());
    }
    let text = problems
        .into_iter()
        .map(|(tracker, errs)| format!("  {tracker}:\n    {}", errs.join("\n    ")))
        .collect::<Vec<_>>()
        .join("\n");
    Err(Error::IncompleteResults(text))
}

/// Loads every tracker's trajectories for all dataset sequences. Missing or
/// malformed files are collected and reported together, per tracker.
pub fn load_results(results: &Path, dataset: &[SequenceRecord]) -> Result<TrackerResults> {
    let trackers = discover_trackers(results)?;
    load_trackers(results, &trackers, dataset)
}

pub fn load_trackers(
    results: &Path,
    trackers: &[String],
    dataset: &[SequenceRecord],
) -> Result<TrackerResults> {
    let loaded: Vec<(String, Vec<Result<Trajectory>>)> = trackers
        .par_iter()
        .map(|t| {
            let trajs = dataset.par_iter().map(|s| load_one(results, t, s)).collect();
            (t.clone(), trajs)
        })
        .collect();
    let mut out = TrackerResults::new();
    let mut problems = Vec::new();
    for (tracker, trajs) in loaded {
        let mut ok = BTreeMap::new();
        let mut errs = Vec::new();
        for (seq, r) in dataset.iter().zip(trajs) {
            match r {
                Ok(t) => {
                    ok.insert(seq.name.clone(), t);
                }
                Err(e) => errs.push(e.to_string()),
            }
        }
        if errs.is_empty() {
            out.insert(tracker, ok);
        } else {
            problems.push((tracker, errs));
        }
    }
    report_problems(problems)?;
    Ok(out)
}

pub type TimingResults = BTreeMap<String, BTreeMap<String, TimingLog>>;

/// Loads timing logs of every tracker. A tracker without any `.time` file is
/// skipped; a tracker with only some of them is an error.
pub fn load_timings(results: &Path, dataset: &[SequenceRecord]) -> Result<TimingResults> {
    let mut out = TimingResults::new();
    let mut problems = Vec::new();
    for tracker in discover_trackers(results)? {
        let present = dataset
            .iter()
            .any(|s| timing_path(results, &tracker, &s.name).is_file());
        if !present {
            log::warn!("tracker {tracker} has no timing logs, skipped");
            continue;
        }
        let mut logs = BTreeMap::new();
        let mut errs = Vec::new();
        for seq in dataset {
            let path = timing_path(results, &tracker, &seq.name);
            let parsed = read_text(&path).and_then(|text| {
                TimingLog::parse(&text).map_err(|source| Error::Format {
                    path: path.clone(),
                    source,
                })
            });
            match parsed {
                Ok(log) if log.frame_ms.len() + 1 != seq.len() => errs.push(format!(
                    "{}: expected {} frame times, found {}",
                    path.display(),
                    seq.len() - 1,
                    log.frame_ms.len()
                )),
                Ok(log) => {
                    logs.insert(seq.name.clone(), log);
                }
                Err(e) => errs.push(e.to_string()),
            }
        }
        if errs.is_empty() {
            out.insert(tracker, logs);
        } else {
            problems.push((tracker, errs));
        }
    }
    report_problems(problems)?;
    if out.is_empty() {
        return Err(Error::Config(format!(
            "no timing logs found in {}",
            results.display()
        )));
    }
    Ok(out)
}

pub fn write_trajectory(results: &Path, tracker: &str, sequence: &str, traj: &Trajectory) -> Result<()> {
    write_text(&trajectory_path(results, tracker, sequence), &traj.to_text())
}

pub fn write_timing(results: &Path, tracker: &str, sequence: &str, log: &TimingLog) -> Result<()> {
    write_text(&timing_path(results, tracker, sequence), &log.to_text())
}
