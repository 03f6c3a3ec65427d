//! The analyses behind each subcommand. Every command reads its inputs,
//! computes, and writes JSON (canonical), CSV and SVG files into the output
//! directory, returning the paths written.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};

use lt_eval_core::analyses::{
    self, dataset_redetection_influence, dataset_search_range, DisappearanceGroup,
    RedetectionInfluence, Summary, TrackerResults, TrackerSpeed,
};
use lt_eval_core::generators::{
    generate_loop_sequence, score_redetection, RedetectionOutcome, RedetectionSpec, PAD_FACTOR,
};
use lt_eval_core::model::{dataset_statistics, DatasetStatistics};
use lt_eval_core::protocol::{collect_trajectories, evaluation_from_curves, rank_trackers};
use lt_eval_core::simulate::{self, Calibration, SimulatorParams};
use lt_eval_core::synthetic::{synthetic_dataset, SyntheticSpec};
use lt_eval_core::{
    auc, auc_mod, sequence_pr_curve, ScoreRange, SequenceRecord, ThresholdGrid, TrackerEvaluation,
    Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IoContext, Result};
use crate::images::generate_redetection;
use crate::manifest::{load_dataset, write_dataset, write_json, write_text};
use crate::report::{write_csv, Cell};
use crate::results::{load_results, load_timings, load_trackers, write_timing, write_trajectory};
use crate::svg::{BarChart, LineChart, Series};

/// Settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub results: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub grid_size: usize,
    pub strides: Vec<usize>,
    pub seed: u64,
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(output_dir: impl Into<PathBuf>) -> Self {
        Self {
            manifest: None,
            results: None,
            output_dir: output_dir.into(),
            grid_size: ThresholdGrid::DEFAULT_SIZE,
            strides: analyses::DEFAULT_STRIDES.to_vec(),
            seed: 0,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }

    pub fn grid(&self) -> Result<ThresholdGrid> {
        ThresholdGrid::uniform(self.grid_size).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn manifest(&self) -> Result<&Path> {
        let path = self
            .manifest
            .as_deref()
            .ok_or_else(|| Error::Config("--manifest is required".into()))?;
        if !path.is_file() {
            return Err(Error::Config(format!("manifest {} not found", path.display())));
        }
        Ok(path)
    }

    pub fn results(&self) -> Result<&Path> {
        let path = self
            .results
            .as_deref()
            .ok_or_else(|| Error::Config("--results is required".into()))?;
        if !path.is_dir() {
            return Err(Error::Config(format!(
                "results directory {} not found",
                path.display()
            )));
        }
        Ok(path)
    }

    fn out(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

/// Exclusive claim on an output directory for the duration of a run.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).at(dir)?;
        let path = dir.join(".lt-eval.lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(Self { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Locked(dir.to_path_buf()))
            }
            Err(e) => Err(Error::Io { path, source: e }),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn write_svg(path: &Path, svg: &str) -> Result<()> {
    write_text(path, svg)
}

/// Evaluates every tracker, sequences in parallel, and ranks the result.
pub fn evaluate_trackers(
    results: &TrackerResults,
    dataset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<Vec<TrackerEvaluation>> {
    let evals = results
        .par_iter()
        .map(|(name, trajs)| {
            let trajs = collect_trajectories(trajs, dataset)?;
            let range = ScoreRange::of(trajs.iter().copied());
            let curves = dataset
                .par_iter()
                .zip(trajs.par_iter())
                .map(|(seq, traj)| {
                    sequence_pr_curve(traj, &seq.groundtruth, grid, range)
                        .map(|c| (seq.name.clone(), c))
                })
                .collect::<lt_eval_core::Result<Vec<_>>>()?;
            Ok(evaluation_from_curves(name.clone(), range, curves)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rank_trackers(evals))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    /// Per-sequence average overlap, averaged over sequences.
    pub auc: f64,
    pub auc_mod: f64,
}

pub fn baselines(trajs: &BTreeMap<String, Trajectory>, dataset: &[SequenceRecord]) -> Result<Baselines> {
    let trajs = collect_trajectories(trajs, dataset)?;
    let (mut a, mut m) = (0.0, 0.0);
    for (seq, traj) in dataset.iter().zip(trajs) {
        a += auc(traj, &seq.groundtruth)?;
        m += auc_mod(traj, &seq.groundtruth)?;
    }
    let n = dataset.len() as f64;
    Ok(Baselines {
        auc: a / n,
        auc_mod: m / n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub grid_size: usize,
    pub sequences: Vec<String>,
    /// Ranked best first.
    pub trackers: Vec<TrackerEvaluation>,
    pub baselines: BTreeMap<String, Baselines>,
}

pub fn cmd_evaluate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let trackers = evaluate_trackers(&results, &dataset, &grid)?;
    let baselines = results
        .iter()
        .map(|(n, t)| Ok((n.clone(), baselines(t, &dataset)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let report = EvaluationReport {
        grid_size: grid.len(),
        sequences: dataset.iter().map(|s| s.name.clone()).collect(),
        trackers,
        baselines,
    };

    let json = cfg.out("report.json");
    write_json(&json, &report)?;
    let rows: Vec<Vec<Cell>> = report
        .trackers
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let b = report.baselines[&e.tracker_name];
            vec![
                (i + 1).into(),
                e.tracker_name.as_str().into(),
                e.f_score.into(),
                e.precision_at_optimum.into(),
                e.recall_at_optimum.into(),
                e.optimal_tau.into(),
                b.auc.into(),
                b.auc_mod.into(),
            ]
        })
        .collect();
    let csv = cfg.out("ranking.csv");
    write_csv(
        &csv,
        &["rank", "tracker", "f_score", "precision", "recall", "optimal_tau", "auc", "auc_mod"],
        &rows,
    )?;

    let label = |e: &TrackerEvaluation| format!("{} [{:.3}]", e.tracker_name, e.f_score);
    let pr = LineChart {
        title: "Tracking precision/recall".into(),
        x_label: "Recall".into(),
        y_label: "Precision".into(),
        x_range: (0.0, 1.0),
        y_range: (0.0, 1.0),
        x_ticks: None,
        series: report
            .trackers
            .iter()
            .map(|e| Series {
                name: label(e),
                points: e.dataset_curve.points.iter().map(|p| (p.recall, p.precision)).collect(),
            })
            .collect(),
    };
    let f = LineChart {
        title: "Tracking F-measure".into(),
        x_label: "Normalized certainty threshold".into(),
        y_label: "F-measure".into(),
        x_range: (0.0, 100.0),
        y_range: (0.0, 1.0),
        x_ticks: None,
        series: report
            .trackers
            .iter()
            .map(|e| Series {
                name: label(e),
                points: e.dataset_curve.points.iter().map(|p| (p.tau_theta * 100.0, p.f)).collect(),
            })
            .collect(),
    };
    let (pr_svg, f_svg) = (cfg.out("pr_curves.svg"), cfg.out("f_curves.svg"));
    write_svg(&pr_svg, &pr.render())?;
    write_svg(&f_svg, &f.render())?;
    Ok(vec![json, csv, pr_svg, f_svg])
}

/// A sparsity chart: measure name and how to read it from a summary.
type Panel = (&'static str, fn(&Summary) -> f64);

fn single(name: &str, trajs: &BTreeMap<String, Trajectory>) -> TrackerResults {
    let mut one = TrackerResults::new();
    one.insert(name.to_string(), trajs.clone());
    one
}

pub fn cmd_sparsity(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let parts = results
        .par_iter()
        .map(|(name, trajs)| {
            Ok(analyses::sparsity_analysis(&single(name, trajs), &dataset, &cfg.strides, &grid)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = analyses::SparsityReport {
        strides: BTreeMap::new(),
        skipped: BTreeMap::new(),
    };
    for part in parts {
        for (stride, per) in part.strides {
            report.strides.entry(stride).or_default().extend(per);
        }
        report.skipped.extend(part.skipped);
    }
    for (stride, names) in &report.skipped {
        log::warn!("stride {stride}: no visible sampled frame in {}", names.join(", "));
    }

    let json = cfg.out("sparsity.json");
    write_json(&json, &report)?;
    let mut rows = Vec::new();
    for (stride, per) in &report.strides {
        for (tracker, s) in per {
            rows.push(vec![
                (*stride).into(),
                tracker.as_str().into(),
                s.f_score.into(),
                s.precision.into(),
                s.recall.into(),
            ]);
        }
    }
    let csv = cfg.out("sparsity.csv");
    write_csv(&csv, &["stride", "tracker", "f_score", "precision", "recall"], &rows)?;

    let strides: Vec<usize> = report.strides.keys().copied().collect();
    let ticks: Vec<(f64, String)> = strides
        .iter()
        .enumerate()
        .map(|(i, n)| (i as f64, n.to_string()))
        .collect();
    let mut written = vec![json, csv];
    let panels: [Panel; 3] = [
        ("f_score", |s| s.f_score),
        ("precision", |s| s.precision),
        ("recall", |s| s.recall),
    ];
    for (measure, get) in panels {
        let chart = LineChart {
            title: format!("Annotation sparsity: {measure}"),
            x_label: "Annotate every N-th frame".into(),
            y_label: measure.into(),
            x_range: (0.0, (strides.len().max(2) - 1) as f64),
            y_range: (0.0, 1.0),
            x_ticks: Some(ticks.clone()),
            series: results
                .keys()
                .map(|t| Series {
                    name: t.clone(),
                    points: strides
                        .iter()
                        .enumerate()
                        .map(|(i, n)| (i as f64, get(&report.strides[n][t])))
                        .collect(),
                })
                .collect(),
        };
        let path = cfg.out(&format!("sparsity_{measure}.svg"));
        write_svg(&path, &chart.render())?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeReport {
    /// Attribute code → scores.
    pub attributes: BTreeMap<String, analyses::SubsetScores>,
    pub missing: Vec<String>,
}

pub fn cmd_attributes(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let breakdown = analyses::attribute_breakdown(&results, &dataset, &grid)?;
    for a in &breakdown.missing {
        log::warn!("no sequence carries attribute {}, omitted", a.code());
    }
    let report = AttributeReport {
        attributes: breakdown
            .attributes
            .into_iter()
            .map(|(a, s)| (a.code().to_string(), s))
            .collect(),
        missing: breakdown.missing.iter().map(|a| a.code().to_string()).collect(),
    };
    let json = cfg.out("attributes.json");
    write_json(&json, &report)?;
    let mut rows = Vec::new();
    for (code, s) in &report.attributes {
        for (tracker, f) in &s.f_scores {
            rows.push(vec![code.as_str().into(), tracker.as_str().into(), (*f).into()]);
        }
        rows.push(vec![code.as_str().into(), "(mean)".into(), s.mean_f.into()]);
    }
    let csv = cfg.out("attributes.csv");
    write_csv(&csv, &["attribute", "tracker", "f_score"], &rows)?;
    let chart = BarChart {
        title: "F-score per visual attribute".into(),
        y_label: "F-score".into(),
        categories: report
            .attributes
            .iter()
            .map(|(c, s)| format!("{c} ({:.2})", s.mean_f))
            .collect(),
        series: results
            .keys()
            .map(|t| {
                (
                    t.clone(),
                    report.attributes.values().map(|s| s.f_scores[t]).collect(),
                )
            })
            .collect(),
    };
    let svg = cfg.out("attributes.svg");
    write_svg(&svg, &chart.render())?;
    Ok(vec![json, csv, svg])
}

fn group_label(g: DisappearanceGroup) -> &'static str {
    match g {
        DisappearanceGroup::Frequent => "group1 (>10)",
        DisappearanceGroup::Occasional => "group2 (1-10)",
        DisappearanceGroup::Never => "group3 (0)",
    }
}

pub fn cmd_groups(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.grid()?;
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let report = analyses::group_scores(&results, &dataset, &grid)?;
    let json = cfg.out("groups.json");
    write_json(&json, &report)?;

    let mut rows = Vec::new();
    for (g, s) in &report.groups {
        for (tracker, f) in &s.f_scores {
            rows.push(vec![g.number().to_string().into(), tracker.as_str().into(), (*f).into()]);
        }
    }
    let csv = cfg.out("groups.csv");
    write_csv(&csv, &["group", "tracker", "f_score"], &rows)?;

    let mut seq_rows = Vec::new();
    for (seq, (name, group)) in dataset.iter().zip(&report.labels) {
        for (tracker, per) in &report.per_sequence_f {
            seq_rows.push(vec![
                name.as_str().into(),
                group.number().to_string().into(),
                seq.groundtruth.disappearances().len().into(),
                tracker.as_str().into(),
                per[name].into(),
            ]);
        }
    }
    let seq_csv = cfg.out("groups_sequences.csv");
    write_csv(
        &seq_csv,
        &["sequence", "group", "disappearances", "tracker", "f_score"],
        &seq_rows,
    )?;
    let chart = BarChart {
        title: "F-score by disappearance frequency".into(),
        y_label: "F-score".into(),
        categories: report.groups.keys().map(|g| group_label(*g).to_string()).collect(),
        series: results
            .keys()
            .map(|t| (t.clone(), report.groups.values().map(|s| s.f_scores[t]).collect()))
            .collect(),
    };
    let svg = cfg.out("groups.svg");
    write_svg(&svg, &chart.render())?;
    Ok(vec![json, csv, seq_csv, svg])
}

pub fn cmd_speed(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let timings = load_timings(cfg.results()?, &dataset)?;
    let report: BTreeMap<String, TrackerSpeed> = analyses::speed_statistics(&timings)?;
    let json = cfg.out("speed.json");
    write_json(&json, &report)?;
    let rows: Vec<Vec<Cell>> = report
        .iter()
        .map(|(t, s)| {
            vec![
                t.as_str().into(),
                s.init_ms.into(),
                s.max_frame_ms.into(),
                s.avg_frame_ms.into(),
                s.avg_fps.into(),
            ]
        })
        .collect();
    let csv = cfg.out("speed.csv");
    write_csv(
        &csv,
        &["tracker", "init_ms", "max_frame_ms", "avg_frame_ms", "avg_fps"],
        &rows,
    )?;
    let chart = BarChart {
        title: "Tracking speed (ms per frame)".into(),
        y_label: "milliseconds".into(),
        categories: report
            .iter()
            .map(|(t, s)| format!("{t} ({:.1} fps)", s.avg_fps))
            .collect(),
        series: vec![
            ("initialization".into(), report.values().map(|s| s.init_ms).collect()),
            ("average".into(), report.values().map(|s| s.avg_frame_ms).collect()),
            ("maximum".into(), report.values().map(|s| s.max_frame_ms).collect()),
        ],
    };
    let svg = cfg.out("speed.svg");
    write_svg(&svg, &chart.render())?;
    Ok(vec![json, csv, svg])
}

/// Construction record written next to a generated re-detection dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedetectionManifest {
    pub warmup_frames: usize,
    pub post_frames: usize,
    pub pad_factor: u32,
    pub sequences: Vec<RedetectionSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedetectionSource {
    pub name: String,
    pub source: String,
    pub canvas_width: u32,
    pub canvas_height: u32,
    pub original: [f64; 4],
    pub displaced: [f64; 4],
}

pub const REDETECTION_MANIFEST: &str = "redetection.json";

fn coords(b: &lt_eval_core::BBox) -> [f64; 4] {
    [b.x(), b.y(), b.width(), b.height()]
}

/// Builds the staged re-detection dataset from the first frame of every
/// manifest sequence.
pub fn cmd_redetect_generate(cfg: &RunConfig, spec: RedetectionSpec) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let missing: Vec<&str> = dataset
        .iter()
        .filter(|s| s.frame_paths.is_none())
        .map(|s| s.name.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "sequences without frame images: {}",
            missing.join(", ")
        )));
    }
    let generated = dataset
        .par_iter()
        .map(|seq| generate_redetection(seq, spec, &cfg.output_dir))
        .collect::<Result<Vec<_>>>()?;
    let construction = RedetectionManifest {
        warmup_frames: spec.warmup_frames,
        post_frames: spec.post_frames,
        pad_factor: PAD_FACTOR,
        sequences: dataset
            .iter()
            .zip(&generated)
            .map(|(src, (rec, plan))| RedetectionSource {
                name: rec.name.clone(),
                source: src.name.clone(),
                canvas_width: plan.canvas_width,
                canvas_height: plan.canvas_height,
                original: coords(&plan.original),
                displaced: coords(&plan.displaced),
            })
            .collect(),
    };
    let records: Vec<SequenceRecord> = generated.into_iter().map(|(r, _)| r).collect();
    let manifest = write_dataset(&cfg.output_dir, &records)?;
    let construction_path = cfg.out(REDETECTION_MANIFEST);
    write_json(&construction_path, &construction)?;
    Ok(vec![manifest, construction_path])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RedetectionScore {
    pub success_count: usize,
    pub sequences: usize,
    /// Mean frames to re-detection over successful sequences.
    pub mean_frames: Option<f64>,
    pub outcomes: BTreeMap<String, RedetectionOutcome>,
}

/// Scores trackers on a generated re-detection dataset.
pub fn cmd_redetect_score(cfg: &RunConfig, construction: &RedetectionManifest) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let spec = RedetectionSpec::new(construction.warmup_frames, construction.post_frames)?;
    let mut report = BTreeMap::new();
    for (tracker, trajs) in &results {
        let trajs = collect_trajectories(trajs, &dataset)?;
        let mut outcomes = BTreeMap::new();
        for (seq, traj) in dataset.iter().zip(trajs) {
            outcomes.insert(seq.name.clone(), score_redetection(traj, &seq.groundtruth, &spec)?);
        }
        let frames: Vec<usize> = outcomes.values().filter_map(|o| o.frames_to_redetect).collect();
        report.insert(
            tracker.clone(),
            RedetectionScore {
                success_count: frames.len(),
                sequences: dataset.len(),
                mean_frames: (!frames.is_empty())
                    .then(|| frames.iter().sum::<usize>() as f64 / frames.len() as f64),
                outcomes,
            },
        );
    }
    let json = cfg.out("redetect.json");
    write_json(&json, &report)?;
    let rows: Vec<Vec<Cell>> = report
        .iter()
        .map(|(t, r)| {
            vec![
                t.as_str().into(),
                r.success_count.into(),
                r.sequences.into(),
                r.mean_frames.into(),
            ]
        })
        .collect();
    let csv = cfg.out("redetect.csv");
    write_csv(&csv, &["tracker", "success_count", "sequences", "mean_frames"], &rows)?;
    let chart = BarChart {
        title: "Re-detection experiment".into(),
        y_label: "count / frames".into(),
        categories: report.keys().cloned().collect(),
        series: vec![
            (
                "successful sequences".into(),
                report.values().map(|r| r.success_count as f64).collect(),
            ),
            (
                "mean frames to re-detect".into(),
                report.values().map(|r| r.mean_frames.unwrap_or(f64::NAN)).collect(),
            ),
        ],
    };
    let svg = cfg.out("redetect.svg");
    write_svg(&svg, &chart.render())?;
    Ok(vec![json, csv, svg])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceRow {
    #[serde(flatten)]
    pub influence: RedetectionInfluence,
    /// Pixels; absent when the tracker never re-detects.
    pub search_range: Option<f64>,
}

/// Recall lost when ignoring everything after the first failure, and the
/// re-detection search range, per tracker.
pub fn cmd_redetect_influence(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let results = load_results(cfg.results()?, &dataset)?;
    let report = results
        .par_iter()
        .map(|(t, trajs)| {
            Ok((
                t.clone(),
                InfluenceRow {
                    influence: dataset_redetection_influence(trajs, &dataset)?,
                    search_range: dataset_search_range(trajs, &dataset)?,
                },
            ))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    let json = cfg.out("redetection_influence.json");
    write_json(&json, &report)?;
    let rows: Vec<Vec<Cell>> = report
        .iter()
        .map(|(t, r)| {
            vec![
                t.as_str().into(),
                r.influence.re_const.into(),
                r.influence.re0.into(),
                r.influence.delta.into(),
                r.search_range.into(),
            ]
        })
        .collect();
    let csv = cfg.out("redetection_influence.csv");
    write_csv(&csv, &["tracker", "re", "re0", "delta", "search_range"], &rows)?;
    let range = BarChart {
        title: "Re-detection search range".into(),
        y_label: "pixels".into(),
        categories: report.keys().cloned().collect(),
        series: vec![(
            "search range".into(),
            report.values().map(|r| r.search_range.unwrap_or(f64::NAN)).collect(),
        )],
    };
    let delta = BarChart {
        title: "Recall gained by re-detection (Re - Re0)".into(),
        y_label: "recall difference".into(),
        categories: report.keys().cloned().collect(),
        series: vec![("delta".into(), report.values().map(|r| r.influence.delta).collect())],
    };
    let (range_svg, delta_svg) = (cfg.out("search_range.svg"), cfg.out("redetection_delta.svg"));
    write_svg(&range_svg, &range.render())?;
    write_svg(&delta_svg, &delta.render())?;
    Ok(vec![json, csv, range_svg, delta_svg])
}

pub fn cmd_redetect(
    cfg: &RunConfig,
    generate: bool,
    spec: RedetectionSpec,
) -> Result<Vec<PathBuf>> {
    if generate {
        return cmd_redetect_generate(cfg, spec);
    }
    let manifest = cfg.manifest()?;
    let construction_path = manifest
        .parent()
        .unwrap_or(Path::new("."))
        .join(REDETECTION_MANIFEST);
    if construction_path.is_file() {
        let text = crate::manifest::read_text(&construction_path)?;
        let construction: RedetectionManifest =
            serde_json::from_str(&text).map_err(|source| Error::Json {
                path: construction_path,
                source,
            })?;
        cmd_redetect_score(cfg, &construction)
    } else {
        cmd_redetect_influence(cfg)
    }
}

/// Recall with every reported box accepted, averaged over sequences.
fn constant_recall(trajs: &BTreeMap<String, Trajectory>, dataset: &[SequenceRecord]) -> Result<f64> {
    let r = dataset_redetection_influence(trajs, dataset)?;
    Ok(r.re_const)
}

pub fn cmd_loops(cfg: &RunConfig, loops: usize) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let mut sources: Vec<&SequenceRecord> = dataset
        .iter()
        .filter(|s| s.groundtruth.disappearances().is_empty())
        .collect();
    if sources.is_empty() {
        log::warn!("every sequence has disappearances; looping all of them");
        sources = dataset.iter().collect();
    }
    let looped = sources
        .iter()
        .map(|s| Ok(generate_loop_sequence(s, loops)?))
        .collect::<Result<Vec<_>>>()?;
    let manifest = write_dataset(&cfg.output_dir, &looped)?;
    let mut written = vec![manifest];

    let Some(results) = cfg.results.as_deref() else {
        return Ok(written);
    };
    let results_dir = cfg.results()?;
    let originals: Vec<SequenceRecord> = sources.iter().map(|s| (*s).clone()).collect();
    let (trackers, without): (Vec<String>, Vec<String>) = crate::results::discover_trackers(results)?
        .into_iter()
        .partition(|t| {
            looped
                .iter()
                .all(|s| crate::results::trajectory_path(results_dir, t, &s.name).is_file())
        });
    if !without.is_empty() {
        log::warn!("no looped-sequence outputs for {}, not compared", without.join(", "));
    }
    if trackers.is_empty() {
        return Ok(written);
    }
    let on_original = load_trackers(results_dir, &trackers, &originals)?;
    let on_looped = load_trackers(results_dir, &trackers, &looped)?;
    let mut rows = Vec::new();
    let mut report = BTreeMap::new();
    for t in &trackers {
        let a = constant_recall(&on_original[t], &originals)?;
        let b = constant_recall(&on_looped[t], &looped)?;
        rows.push(vec![t.as_str().into(), a.into(), b.into(), (a - b).into()]);
        report.insert(t.clone(), [a, b]);
    }
    let json = cfg.out("loops.json");
    write_json(&json, &report)?;
    let csv = cfg.out("loops.csv");
    write_csv(&csv, &["tracker", "recall_original", "recall_looped", "difference"], &rows)?;
    let chart = BarChart {
        title: "Recall on original and looped sequences".into(),
        y_label: "tracking recall".into(),
        categories: trackers.clone(),
        series: vec![
            ("original".into(), report.values().map(|v| v[0]).collect()),
            ("looped".into(), report.values().map(|v| v[1]).collect()),
        ],
    };
    let svg = cfg.out("loops.svg");
    write_svg(&svg, &chart.render())?;
    written.extend([json, csv, svg]);
    Ok(written)
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let dataset = load_dataset(cfg.manifest()?)?;
    let stats: DatasetStatistics = dataset_statistics(&dataset)?;
    let json = cfg.out("stats.json");
    write_json(&json, &stats)?;
    let name = cfg
        .manifest
        .as_deref()
        .and_then(|p| p.parent())
        .and_then(|p| p.file_name())
        .map_or_else(|| "dataset".to_string(), |n| n.to_string_lossy().into_owned());
    let csv = cfg.out("stats.csv");
    write_csv(
        &csv,
        &["Dataset", "# sequences", "Frames", "DSP", "ADL", "ADN"],
        &[vec![
            name.into(),
            stats.sequence_count.into(),
            stats.frames.into(),
            stats.dsp.into(),
            stats.adl.into(),
            stats.adn.into(),
        ]],
    )?;
    let rows: Vec<Vec<Cell>> = stats
        .sequences
        .iter()
        .map(|s| {
            vec![
                s.name.as_str().into(),
                s.frames.into(),
                s.dsp.into(),
                s.adl.into(),
                s.absent_fraction.into(),
                DisappearanceGroup::of_count(s.dsp).number().to_string().into(),
            ]
        })
        .collect();
    let seq_csv = cfg.out("sequence_stats.csv");
    write_csv(
        &seq_csv,
        &["sequence", "frames", "dsp", "adl", "absent_fraction", "group"],
        &rows,
    )?;
    Ok(vec![json, csv, seq_csv])
}

/// Synthetic dataset parameters of the `simulate` command.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub sequences: usize,
    pub length: (usize, usize),
    pub disappearances: (usize, usize),
}

impl Default for SimulateOptions {
    fn default() -> Self {
        let spec = SyntheticSpec::default();
        Self {
            sequences: spec.sequences,
            length: spec.length,
            disappearances: spec.disappearances,
        }
    }
}

/// Simulated trackers emitted next to the theoretical ones:
/// (name, center noise, failure probability, recovery delay, calibration,
/// mean frame time).
const SIMULATED: [(&str, f64, f64, usize, Calibration, f64); 3] = [
    ("sim_strong", 2.0, 0.002, 20, Calibration::Noisy(0.1), 40.0),
    ("sim_medium", 5.0, 0.005, 60, Calibration::Noisy(0.2), 15.0),
    ("sim_weak", 10.0, 0.01, 150, Calibration::Constant, 5.0),
];

/// Writes a seeded synthetic dataset plus theoretical and simulated tracker
/// outputs (trajectories and timing logs) under the output directory.
pub fn cmd_simulate(cfg: &RunConfig, opts: &SimulateOptions) -> Result<Vec<PathBuf>> {
    let spec = SyntheticSpec {
        sequences: opts.sequences,
        length: opts.length,
        disappearances: opts.disappearances,
        seed: cfg.seed,
        ..SyntheticSpec::default()
    };
    let dataset = synthetic_dataset(&spec)?;
    let manifest = write_dataset(&cfg.output_dir, &dataset)?;
    let results = cfg.out("results");
    dataset
        .par_iter()
        .enumerate()
        .map(|(i, seq)| {
            let gt = &seq.groundtruth;
            let (w, h) = seq.image_size.unwrap_or(spec.image_size);
            let mut outputs = vec![
                ("T_gt_gt".to_string(), simulate::t_gt_gt(gt), 1.0),
                ("T_gt_co".to_string(), simulate::t_gt_co(gt), 1.0),
                ("T_im_co".to_string(), simulate::t_im_co(gt.len(), w, h)?, 0.5),
                ("T_lost".to_string(), simulate::t_lost(gt.len()), 0.5),
            ];
            for (k, (name, drift, fail, delay, calibration, _)) in SIMULATED.iter().enumerate() {
                let params = SimulatorParams {
                    drift_rate: *drift,
                    fail_prob: *fail,
                    redetect_delay: Some(*delay),
                    calibration: *calibration,
                    rng_seed: cfg.seed ^ ((i as u64) << 8 | k as u64),
                };
                outputs.push((name.to_string(), simulate::simulate_tracker(gt, &params)?, SIMULATED[k].5));
            }
            for (k, (name, traj, mean_ms)) in outputs.iter().enumerate() {
                write_trajectory(&results, name, &seq.name, traj)?;
                let timing = simulate::simulate_timing(
                    gt.len(),
                    *mean_ms,
                    cfg.seed.wrapping_add((i as u64) << 16 | k as u64),
                )?;
                write_timing(&results, name, &seq.name, &timing)?;
            }
            Ok(())
        })
        .collect::<Result<Vec<()>>>()?;
    Ok(vec![manifest, results])
}
