//! Dataset-level evaluation: per-sequence curves on a shared grid, averaged
//! per sequence, with the F-measure computed from the averaged curve.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::measures::{sequence_pr_curve, PRCurve, PRPoint, ScoreRange, ThresholdGrid};
use crate::model::{SequenceRecord, Trajectory};

/// Result of evaluating one tracker on a dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrackerEvaluation {
    pub tracker_name: String,
    pub score_range: ScoreRange,
    pub dataset_curve: PRCurve,
    pub per_sequence_curves: BTreeMap<String, PRCurve>,
    /// Maximum of the F-measure over the dataset curve.
    pub f_score: f64,
    /// Normalized threshold attaining `f_score`, lowest on ties.
    pub optimal_tau: f64,
    pub precision_at_optimum: f64,
    pub recall_at_optimum: f64,
}

/// Looks up the trajectory of every dataset sequence, in dataset order.
pub fn collect_trajectories<'a>(
    trajectories: &'a BTreeMap<String, Trajectory>,
    dataset: &[SequenceRecord],
) -> Result<Vec<&'a Trajectory>> {
    dataset
        .iter()
        .map(|seq| {
            let traj = trajectories
                .get(&seq.name)
                .ok_or_else(|| Error::MissingSequence(seq.name.clone()))?;
            if traj.len() != seq.len() {
                return Err(Error::LengthMismatch {
                    expected: seq.len(),
                    found: traj.len(),
                });
            }
            Ok(traj)
        })
        .collect()
}

/// Point-wise mean of precision and recall over sequence curves; F is
/// recomputed from the means.
pub fn average_curves<'a>(curves: impl IntoIterator<Item = &'a PRCurve>) -> Result<PRCurve> {
    let mut sums: Vec<(f64, f64, f64)> = Vec::new();
    let mut count = 0usize;
    for curve in curves {
        if count == 0 {
            sums = curve
                .points
                .iter()
                .map(|p| (p.tau_theta, 0.0, 0.0))
                .collect();
        } else if curve.points.len() != sums.len() {
            return Err(Error::LengthMismatch {
                expected: sums.len(),
                found: curve.points.len(),
            });
        }
        for (s, p) in sums.iter_mut().zip(&curve.points) {
            s.1 += p.precision;
            s.2 += p.recall;
        }
        count += 1;
    }
    if count == 0 {
        return Err(Error::EmptyInput("no sequence curves to average"));
    }
    let n = count as f64;
    Ok(PRCurve {
        points: sums
            .into_iter()
            .map(|(tau, p, r)| PRPoint::new(tau, p / n, r / n))
            .collect(),
    })
}

/// Builds the evaluation from already computed per-sequence curves, given
/// in dataset order.
pub fn evaluation_from_curves(
    tracker_name: impl Into<String>,
    score_range: ScoreRange,
    curves: Vec<(String, PRCurve)>,
) -> Result<TrackerEvaluation> {
    let dataset_curve = average_curves(curves.iter().map(|(_, c)| c))?;
    let best = dataset_curve
        .best_index()
        .ok_or(Error::EmptyInput("empty threshold grid"))?;
    let at = dataset_curve.points[best];
    Ok(TrackerEvaluation {
        tracker_name: tracker_name.into(),
        score_range,
        per_sequence_curves: curves.into_iter().collect(),
        f_score: at.f,
        optimal_tau: at.tau_theta,
        precision_at_optimum: at.precision,
        recall_at_optimum: at.recall,
        dataset_curve,
    })
}

/// Evaluates one tracker on every sequence of `dataset`.
///
/// Raw scores are normalized with the tracker's score range over the whole
/// dataset before thresholding.
pub fn evaluate_tracker(
    tracker_name: &str,
    trajectories: &BTreeMap<String, Trajectory>,
    dataset: &[SequenceRecord],
    grid: &ThresholdGrid,
) -> Result<TrackerEvaluation> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let trajs = collect_trajectories(trajectories, dataset)?;
    let range = ScoreRange::of(trajs.iter().copied());
    let curves = dataset
        .iter()
        .zip(&trajs)
        .map(|(seq, traj)| {
            sequence_pr_curve(traj, &seq.groundtruth, grid, range).map(|c| (seq.name.clone(), c))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluation_from_curves(tracker_name, range, curves)
}

/// Orders evaluations by F-score, then recall and precision at the optimum
/// (all descending), then tracker name (ascending).
pub fn compare_evaluations(a: &TrackerEvaluation, b: &TrackerEvaluation) -> Ordering {
    b.f_score
        .total_cmp(&a.f_score)
        .then_with(|| b.recall_at_optimum.total_cmp(&a.recall_at_optimum))
        .then_with(|| b.precision_at_optimum.total_cmp(&a.precision_at_optimum))
        .then_with(|| a.tracker_name.cmp(&b.tracker_name))
}

pub fn rank_trackers(mut evals: Vec<TrackerEvaluation>) -> Vec<TrackerEvaluation> {
    evals.sort_by(compare_evaluations);
    evals
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BBox, Region};
    use crate::model::{GroundTruth, Prediction};
    use alloc::string::ToString;
    use alloc::vec;

    fn eval(name: &str, f: f64, p: f64, r: f64) -> TrackerEvaluation {
        TrackerEvaluation {
            tracker_name: name.to_string(),
            score_range: ScoreRange { min: 0.0, max: 1.0 },
            dataset_curve: PRCurve { points: vec![] },
            per_sequence_curves: BTreeMap::new(),
            f_score: f,
            optimal_tau: 0.0,
            precision_at_optimum: p,
            recall_at_optimum: r,
        }
    }

    fn names(v: &[TrackerEvaluation]) -> Vec<&str> {
        v.iter().map(|e| e.tracker_name.as_str()).collect()
    }

    #[test]
    fn ranking_tie_breaks() {
        let ranked = rank_trackers(vec![
            eval("c", 0.38, 0.3, 0.40),
            eval("a", 0.41, 0.3, 0.5),
            eval("b", 0.38, 0.3, 0.45),
        ]);
        assert_eq!(names(&ranked), ["a", "b", "c"]);
        let ranked = rank_trackers(vec![eval("z", 0.5, 0.5, 0.5), eval("y", 0.5, 0.5, 0.5)]);
        assert_eq!(names(&ranked), ["y", "z"]);
        assert_eq!(names(&rank_trackers(vec![eval("x", 0.1, 0.1, 0.1)])), ["x"]);
    }

    #[test]
    fn averages_precision_recall_not_f() {
        let a = PRCurve {
            points: vec![PRPoint::new(0.0, 1.0, 1.0)],
        };
        let b = PRCurve {
            points: vec![PRPoint::new(0.0, 0.0, 0.0)],
        };
        let avg = average_curves([&a, &b]).unwrap();
        assert_eq!(avg.points[0].precision, 0.5);
        assert_eq!(avg.points[0].recall, 0.5);
        assert_eq!(avg.points[0].f, 0.5);
    }

    fn single_sequence() -> (Vec<SequenceRecord>, BTreeMap<String, Trajectory>) {
        let g = BBox::new(0.0, 0.0, 10.0, 10.0).unwrap();
        let half = BBox::new(0.0, 0.0, 10.0, 5.0).unwrap();
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Empty, Region::Box(g)]).unwrap();
        let traj = Trajectory::new(vec![
            Prediction::present(g, 0.9).unwrap(),
            Prediction::present(half, 0.2).unwrap(),
            Prediction::present(half, 0.5).unwrap(),
        ]);
        let mut trajs = BTreeMap::new();
        trajs.insert("s".to_string(), traj);
        (vec![SequenceRecord::new("s", gt)], trajs)
    }

    #[test]
    fn single_sequence_dataset_equals_sequence_curve() {
        let (dataset, trajs) = single_sequence();
        let ev = evaluate_tracker("t", &trajs, &dataset, &ThresholdGrid::default()).unwrap();
        assert_eq!(ev.dataset_curve, ev.per_sequence_curves["s"]);
        assert_eq!(ev.f_score, ev.dataset_curve.max_f());
        assert_eq!(ev.score_range, ScoreRange { min: 0.2, max: 0.9 });
    }

    #[test]
    fn missing_and_mismatched_sequences() {
        let (dataset, _) = single_sequence();
        let empty = BTreeMap::new();
        assert_eq!(
            evaluate_tracker("t", &empty, &dataset, &ThresholdGrid::default()).unwrap_err(),
            Error::MissingSequence("s".to_string())
        );
        let mut short = BTreeMap::new();
        short.insert("s".to_string(), Trajectory::new(vec![Prediction::absent()]));
        assert!(matches!(
            evaluate_tracker("t", &short, &dataset, &ThresholdGrid::default()),
            Err(Error::LengthMismatch { expected: 3, found: 1 })
        ));
    }
}
