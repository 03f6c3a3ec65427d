//! Analyses built on top of the evaluation protocol.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{center, iou};
use crate::measures::ThresholdGrid;
use crate::model::{Attribute, GroundTruth, SequenceRecord, TimingLog, Trajectory};
use crate::protocol::{collect_trajectories, evaluate_tracker, TrackerEvaluation};

/// Trajectories of several trackers: tracker name → sequence name → output.
pub type TrackerResults = BTreeMap<String, BTreeMap<String, Trajectory>>;

/// Frame strides used by the annotation sparsity analysis (every frame up to
/// every 8 s at 25 fps).
pub const DEFAULT_STRIDES: [usize; 6] = [1, 12, 25, 50, 100, 200];

/// Headline numbers of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub f_score: f64,
    pub precision: f64,
    pub recall: f64,
}

impl From<&TrackerEvaluation> for Summary {
    fn from(e: &TrackerEvaluation) -> Self {
        Self {
            f_score: e.f_score,
            precision: e.precision_at_optimum,
            recall: e.recall_at_optimum,
        }
    }
}

/// Evaluates every tracker on `dataset`.
pub fn evaluate_all(
    results: &TrackerResults,
    dataset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<BTreeMap<String, TrackerEvaluation>> {
    results
        .iter()
        .map(|(name, trajs)| Ok((name.clone(), evaluate_tracker(name, trajs, dataset, grid)?)))
        .collect()
}

/// Frame indices kept when annotating every `stride`-th frame.
pub fn sampled_frames(len: usize, stride: usize) -> Vec<usize> {
    (0..len).step_by(stride.max(1)).collect()
}

/// The sequence restricted to every `stride`-th frame, `None` if no visible
/// frame survives the sampling.
pub fn subsample_sequence(seq: &SequenceRecord, stride: usize) -> Option<SequenceRecord> {
    if stride <= 1 {
        return Some(seq.clone());
    }
    let frames = sampled_frames(seq.len(), stride);
    let regions = frames.iter().map(|&t| seq.groundtruth.regions()[t]).collect();
    let groundtruth = GroundTruth::new(regions).ok()?;
    Some(SequenceRecord {
        name: seq.name.clone(),
        groundtruth,
        attributes: seq.attributes,
        frame_paths: seq
            .frame_paths
            .as_ref()
            .map(|p| frames.iter().map(|&t| p[t].clone()).collect()),
        fps: seq.fps,
        image_size: seq.image_size,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparsityReport {
    /// stride → tracker → summary.
    pub strides: BTreeMap<usize, BTreeMap<String, Summary>>,
    /// stride → sequences dropped because no visible frame was sampled.
    pub skipped: BTreeMap<usize, Vec<String>>,
}

/// Re-runs the protocol keeping only frames `t` with `t % stride == 0`.
pub fn sparsity_analysis(
    results: &TrackerResults,
    dataset: &[SequenceRecord],
    strides: &[usize],
    grid: &ThresholdGrid,
) -> Result<SparsityReport> {
    if strides.contains(&0) {
        return Err(Error::InvalidParameter("strides must be at least 1"));
    }
    let mut report = SparsityReport {
        strides: BTreeMap::new(),
        skipped: BTreeMap::new(),
    };
    for &stride in strides {
        let mut sparse = Vec::new();
        let mut skipped = Vec::new();
        for seq in dataset {
            match subsample_sequence(seq, stride) {
                Some(s) => sparse.push(s),
                None => skipped.push(seq.name.clone()),
            }
        }
        let mut per_tracker = BTreeMap::new();
        for (name, trajs) in results {
            let full = collect_trajectories(trajs, dataset)?;
            let sparse_trajs: BTreeMap<String, Trajectory> = dataset
                .iter()
                .zip(full)
                .filter(|(seq, _)| !skipped.contains(&seq.name))
                .map(|(seq, t)| {
                    let kept = if stride == 1 {
                        t.clone()
                    } else {
                        t.select(&sampled_frames(seq.len(), stride))
                    };
                    (seq.name.clone(), kept)
                })
                .collect();
            let ev = evaluate_tracker(name, &sparse_trajs, &sparse, grid)?;
            per_tracker.insert(name.clone(), Summary::from(&ev));
        }
        report.strides.insert(stride, per_tracker);
        if !skipped.is_empty() {
            report.skipped.insert(stride, skipped);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubsetScores {
    pub sequences: Vec<String>,
    /// tracker → F-score on the subset.
    pub f_scores: BTreeMap<String, f64>,
    /// Mean F-score over trackers.
    pub mean_f: f64,
}

fn subset_scores(
    results: &TrackerResults,
    subset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<SubsetScores> {
    let evals = evaluate_all(results, subset, grid)?;
    let f_scores: BTreeMap<String, f64> =
        evals.iter().map(|(n, e)| (n.clone(), e.f_score)).collect();
    let mean_f = if f_scores.is_empty() {
        0.0
    } else {
        f_scores.values().sum::<f64>() / f_scores.len() as f64
    };
    Ok(SubsetScores {
        sequences: subset.iter().map(|s| s.name.clone()).collect(),
        f_scores,
        mean_f,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeBreakdown {
    pub attributes: BTreeMap<Attribute, SubsetScores>,
    /// Attributes no sequence carries.
    pub missing: Vec<Attribute>,
}

/// F-scores of every tracker on the sequences carrying each attribute.
pub fn attribute_breakdown(
    results: &TrackerResults,
    dataset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<AttributeBreakdown> {
    let mut out = AttributeBreakdown {
        attributes: BTreeMap::new(),
        missing: Vec::new(),
    };
    for attr in Attribute::ALL {
        let subset: Vec<SequenceRecord> = dataset
            .iter()
            .filter(|s| s.attributes.contains(attr))
            .cloned()
            .collect();
        if subset.is_empty() {
            out.missing.push(attr);
            continue;
        }
        out.attributes
            .insert(attr, subset_scores(results, &subset, grid)?);
    }
    Ok(out)
}

/// Sequence grouping by the number of disappearances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DisappearanceGroup {
    /// More than ten disappearances.
    Frequent,
    /// One to ten disappearances.
    Occasional,
    /// Target never disappears.
    Never,
}

impl DisappearanceGroup {
    pub const ALL: [DisappearanceGroup; 3] = [
        DisappearanceGroup::Frequent,
        DisappearanceGroup::Occasional,
        DisappearanceGroup::Never,
    ];

    pub fn of_count(disappearances: usize) -> Self {
        match disappearances {
            0 => DisappearanceGroup::Never,
            1..=10 => DisappearanceGroup::Occasional,
            _ => DisappearanceGroup::Frequent,
        }
    }

    /// 1-based group number.
    pub fn number(self) -> u8 {
        match self {
            DisappearanceGroup::Frequent => 1,
            DisappearanceGroup::Occasional => 2,
            DisappearanceGroup::Never => 3,
        }
    }
}

/// Group label of every sequence, in dataset order.
pub fn disappearance_groups(dataset: &[SequenceRecord]) -> Vec<(String, DisappearanceGroup)> {
    dataset
        .iter()
        .map(|s| {
            (
                s.name.clone(),
                DisappearanceGroup::of_count(s.groundtruth.disappearances().len()),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroupReport {
    pub labels: Vec<(String, DisappearanceGroup)>,
    /// Protocol scores per non-empty group.
    pub groups: BTreeMap<DisappearanceGroup, SubsetScores>,
    /// tracker → sequence → per-sequence maximum F.
    pub per_sequence_f: BTreeMap<String, BTreeMap<String, f64>>,
}

pub fn group_scores(
    results: &TrackerResults,
    dataset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<GroupReport> {
    let labels = disappearance_groups(dataset);
    let mut groups = BTreeMap::new();
    for group in DisappearanceGroup::ALL {
        let subset: Vec<SequenceRecord> = dataset
            .iter()
            .zip(&labels)
            .filter(|(_, (_, g))| *g == group)
            .map(|(s, _)| s.clone())
            .collect();
        if !subset.is_empty() {
            groups.insert(group, subset_scores(results, &subset, grid)?);
        }
    }
    let per_sequence_f = evaluate_all(results, dataset, grid)?
        .into_iter()
        .map(|(name, ev)| {
            let seqs = ev
                .per_sequence_curves
                .iter()
                .map(|(s, c)| (s.clone(), c.max_f()))
                .collect();
            (name, seqs)
        })
        .collect();
    Ok(GroupReport {
        labels,
        groups,
        per_sequence_f,
    })
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Median of the slowest `ceil(n / 10)` frame times.
pub fn slowest_decile_median(frame_ms: &[f64]) -> Result<f64> {
    if frame_ms.is_empty() {
        return Err(Error::EmptyInput("timing log has no frames"));
    }
    let k = frame_ms.len().div_ceil(10);
    let mut sorted = frame_ms.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.truncate(k);
    sorted.reverse();
    Ok(median_sorted(&sorted))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackerSpeed {
    /// Initialization time averaged over sequences.
    pub init_ms: f64,
    /// Slowest-decile median averaged over sequences.
    pub max_frame_ms: f64,
    /// Mean over all frames of all sequences.
    pub avg_frame_ms: f64,
    pub avg_fps: f64,
}

pub fn tracker_speed(logs: &BTreeMap<String, TimingLog>) -> Result<TrackerSpeed> {
    if logs.is_empty() {
        return Err(Error::EmptyInput("no timing logs"));
    }
    let n = logs.len() as f64;
    let (mut init, mut max, mut total, mut frames) = (0.0, 0.0, 0.0, 0usize);
    for log in logs.values() {
        init += log.init_ms;
        max += slowest_decile_median(&log.frame_ms)?;
        total += log.frame_ms.iter().sum::<f64>();
        frames += log.frame_ms.len();
    }
    let avg_frame_ms = total / frames as f64;
    Ok(TrackerSpeed {
        init_ms: init / n,
        max_frame_ms: max / n,
        avg_frame_ms,
        avg_fps: 1000.0 / avg_frame_ms,
    })
}

/// Speed summary per tracker from `tracker → sequence → log`.
pub fn speed_statistics(
    timings: &BTreeMap<String, BTreeMap<String, TimingLog>>,
) -> Result<BTreeMap<String, TrackerSpeed>> {
    timings
        .iter()
        .map(|(name, logs)| Ok((name.clone(), tracker_speed(logs)?)))
        .collect()
}

/// Overlaps with every reported box accepted regardless of its score.
fn forced_overlaps(traj: &Trajectory, gt: &GroundTruth) -> Result<Vec<f64>> {
    if traj.len() != gt.len() {
        return Err(Error::LengthMismatch {
            expected: gt.len(),
            found: traj.len(),
        });
    }
    Ok(traj
        .entries()
        .iter()
        .zip(gt.regions())
        .map(|(p, g)| iou(p.region(), g))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RedetectionInfluence {
    /// Recall with every prediction accepted.
    pub re_const: f64,
    /// Same recall with all overlaps from the first failure on set to zero.
    pub re0: f64,
    pub delta: f64,
}

/// Recall gained through re-detection after the first failure, where a
/// failure is a visible-target frame with zero overlap.
pub fn redetection_influence(traj: &Trajectory, gt: &GroundTruth) -> Result<RedetectionInfluence> {
    let overlaps = forced_overlaps(traj, gt)?;
    let n_g = gt.visible_count();
    if n_g == 0 {
        return Err(Error::NoVisibleFrame);
    }
    let first_failure = (0..gt.len())
        .find(|&t| gt.is_visible(t) && overlaps[t] == 0.0)
        .unwrap_or(gt.len());
    let total: f64 = overlaps.iter().sum();
    let before: f64 = overlaps[..first_failure].iter().sum();
    let re_const = total / n_g as f64;
    let re0 = before / n_g as f64;
    Ok(RedetectionInfluence {
        re_const,
        re0,
        delta: re_const - re0,
    })
}

/// Mean of [`redetection_influence`] over the sequences of a dataset.
pub fn dataset_redetection_influence(
    trajectories: &BTreeMap<String, Trajectory>,
    dataset: &[SequenceRecord],
) -> Result<RedetectionInfluence> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let trajs = collect_trajectories(trajectories, dataset)?;
    let (mut re_const, mut re0) = (0.0, 0.0);
    for (seq, traj) in dataset.iter().zip(trajs) {
        let r = redetection_influence(traj, &seq.groundtruth)?;
        re_const += r.re_const;
        re0 += r.re0;
    }
    let n = dataset.len() as f64;
    let (re_const, re0) = (re_const / n, re0 / n);
    Ok(RedetectionInfluence {
        re_const,
        re0,
        delta: re_const - re0,
    })
}

/// Center displacement of the predictions at every re-detection point, i.e.
/// frame pairs with overlap zero followed by a positive overlap. Pairs where
/// the earlier frame has no predicted box are skipped.
pub fn redetection_distances(traj: &Trajectory, gt: &GroundTruth) -> Result<Vec<f64>> {
    let overlaps = forced_overlaps(traj, gt)?;
    let entries = traj.entries();
    let mut out = Vec::new();
    for i in 1..overlaps.len() {
        if overlaps[i - 1] == 0.0 && overlaps[i] > 0.0 {
            if let (Some(a), Some(b)) = (center(entries[i - 1].region()), center(entries[i].region())) {
                out.push(libm::hypot(b.0 - a.0, b.1 - a.1));
            }
        }
    }
    Ok(out)
}

/// Mean of the largest `ceil(10%)` distances.
pub fn search_range_of(distances: &[f64]) -> Option<f64> {
    if distances.is_empty() {
        return None;
    }
    let k = distances.len().div_ceil(10);
    let mut sorted = distances.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Some(sorted[..k].iter().sum::<f64>() / k as f64)
}

pub fn search_range(traj: &Trajectory, gt: &GroundTruth) -> Result<Option<f64>> {
    Ok(search_range_of(&redetection_distances(traj, gt)?))
}

/// Search range with re-detection distances pooled over all sequences.
pub fn dataset_search_range(
    trajectories: &BTreeMap<String, Trajectory>,
    dataset: &[SequenceRecord],
) -> Result<Option<f64>> {
    let trajs = collect_trajectories(trajectories, dataset)?;
    let mut pooled = Vec::new();
    for (seq, traj) in dataset.iter().zip(trajs) {
        pooled.extend(redetection_distances(traj, &seq.groundtruth)?);
    }
    Ok(search_range_of(&pooled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, Region};
    use crate::model::Prediction;
    use alloc::string::ToString;
    use alloc::vec;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BBox {
        BBox::new(x, y, w, h).unwrap()
    }

    #[test]
    fn group_boundaries() {
        assert_eq!(DisappearanceGroup::of_count(11), DisappearanceGroup::Frequent);
        assert_eq!(DisappearanceGroup::of_count(10), DisappearanceGroup::Occasional);
        assert_eq!(DisappearanceGroup::of_count(1), DisappearanceGroup::Occasional);
        assert_eq!(DisappearanceGroup::of_count(0), DisappearanceGroup::Never);
    }

    #[test]
    fn slowest_decile_of_one_to_hundred() {
        let ms: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(slowest_decile_median(&ms).unwrap(), 95.5);
        assert!(slowest_decile_median(&[]).is_err());
        // ceil(0.1 * 5) = 1
        assert_eq!(slowest_decile_median(&[3.0, 9.0, 1.0, 2.0, 4.0]).unwrap(), 9.0);
    }

    #[test]
    fn constant_speed() {
        let mut logs = BTreeMap::new();
        logs.insert("a".to_string(), TimingLog::new(50.0, vec![10.0; 40]).unwrap());
        logs.insert("b".to_string(), TimingLog::new(70.0, vec![10.0; 7]).unwrap());
        let s = tracker_speed(&logs).unwrap();
        assert_eq!(s.max_frame_ms, 10.0);
        assert_eq!(s.avg_frame_ms, 10.0);
        assert_eq!(s.avg_fps, 100.0);
        assert_eq!(s.init_ms, 60.0);
    }

    /// Ground truth of `n` visible frames and a trajectory whose per-frame
    /// overlap is exactly `overlaps[t]` (0 or 1).
    fn binary_overlaps(overlaps: &[u8]) -> (Trajectory, GroundTruth) {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let away = bb(100.0, 100.0, 10.0, 10.0);
        let gt = GroundTruth::new(vec![Region::Box(g); overlaps.len()]).unwrap();
        let traj = Trajectory::new(
            overlaps
                .iter()
                .map(|&o| Prediction::present(if o == 1 { g } else { away }, 0.5).unwrap())
                .collect(),
        );
        (traj, gt)
    }

    #[test]
    fn influence_hand_case() {
        let (traj, gt) = binary_overlaps(&[1, 0, 1, 1]);
        let r = redetection_influence(&traj, &gt).unwrap();
        assert_eq!(r.re_const, 0.75);
        assert_eq!(r.re0, 0.25);
        assert_eq!(r.delta, 0.5);
        let (traj, gt) = binary_overlaps(&[1, 1, 1]);
        assert_eq!(redetection_influence(&traj, &gt).unwrap().delta, 0.0);
    }

    #[test]
    fn absent_frames_are_not_failures() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Empty, Region::Box(g)]).unwrap();
        let traj = Trajectory::new(vec![
            Prediction::present(g, 1.0).unwrap(),
            Prediction::absent(),
            Prediction::present(g, 1.0).unwrap(),
        ]);
        let r = redetection_influence(&traj, &gt).unwrap();
        assert_eq!((r.re_const, r.re0), (1.0, 1.0));
    }

    #[test]
    fn search_range_cases() {
        let (traj, gt) = binary_overlaps(&[1, 1, 1]);
        assert_eq!(search_range(&traj, &gt).unwrap(), None);

        let g = bb(-5.0, -5.0, 10.0, 10.0);
        let gt = GroundTruth::new(vec![Region::Box(bb(25.0, 35.0, 10.0, 10.0)); 2]).unwrap();
        let traj = Trajectory::new(vec![
            Prediction::present(g, 0.5).unwrap(), // center (0, 0), no overlap
            Prediction::present(bb(25.0, 35.0, 10.0, 10.0), 0.5).unwrap(), // center (30, 40)
        ]);
        assert_eq!(search_range(&traj, &gt).unwrap(), Some(50.0));

        let d: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(search_range_of(&d), Some(10.0));
        let d: Vec<f64> = (1..=11).map(f64::from).collect();
        assert_eq!(search_range_of(&d), Some(10.5));
    }

    #[test]
    fn search_range_skips_empty_predecessor() {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let gt = GroundTruth::new(vec![Region::Box(g); 2]).unwrap();
        let traj = Trajectory::new(vec![Prediction::absent(), Prediction::present(g, 1.0).unwrap()]);
        assert_eq!(redetection_distances(&traj, &gt).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn sampled_frame_indices() {
        assert_eq!(sampled_frames(7, 3), vec![0, 3, 6]);
        assert_eq!(sampled_frames(3, 200), vec![0]);
    }
}
