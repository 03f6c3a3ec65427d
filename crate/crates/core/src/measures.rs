//! Tracking precision, recall and F-measure, and the average-overlap
//! baselines.
//!
//! Precision averages the overlap over frames where the tracker reports the
//! target with certainty at or above the threshold; recall averages it over
//! frames where the target is visible. Both are closed-form sums, the
//! integral of the detection-style counts over every overlap threshold.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{iou, Region};
use crate::model::{GroundTruth, Trajectory};

/// Frame counts behind one precision/recall evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalCounts {
    /// Frames with a visible target.
    pub n_g: usize,
    /// Frames with a prediction that survives the threshold.
    pub n_p: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub counts: EvalCounts,
}

impl PrecisionRecall {
    pub fn f(&self) -> f64 {
        f_measure(self.precision, self.recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PRPoint {
    /// Normalized certainty threshold in `[0, 1]`.
    pub tau_theta: f64,
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl PRPoint {
    pub fn new(tau_theta: f64, precision: f64, recall: f64) -> Self {
        Self {
            tau_theta,
            precision,
            recall,
            f: f_measure(precision, recall),
        }
    }
}

/// Precision/recall sampled on a normalized threshold grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PRCurve {
    pub points: Vec<PRPoint>,
}

impl PRCurve {
    /// Index of the maximum F, the lowest index on ties.
    pub fn best_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            match best {
                Some(b) if self.points[b].f >= p.f => {}
                _ => best = Some(i),
            }
        }
        best
    }

    pub fn max_f(&self) -> f64 {
        self.best_index().map_or(0.0, |i| self.points[i].f)
    }
}

/// Ascending normalized certainty thresholds shared by every curve of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdGrid(Vec<f64>);

impl ThresholdGrid {
    pub const DEFAULT_SIZE: usize = 101;

    /// `size` evenly spaced thresholds from 0 to 1 inclusive.
    pub fn uniform(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidParameter("threshold grid needs at least 2 points"));
        }
        let last = (size - 1) as f64;
        Ok(Self((0..size).map(|i| i as f64 / last).collect()))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for ThresholdGrid {
    fn default() -> Self {
        Self::uniform(Self::DEFAULT_SIZE).expect("default grid is valid")
    }
}

/// Raw score range of one tracker over a whole dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScoreRange {
    pub min: f64,
    pub max: f64,
}

impl ScoreRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(Error::InvalidParameter("score range requires finite min <= max"));
        }
        Ok(Self { min, max })
    }

    /// Range over the box scores of all `trajectories`; `[0, 0]` when the
    /// tracker never reports a box.
    pub fn of<'a>(trajectories: impl IntoIterator<Item = &'a Trajectory>) -> Self {
        let bounds = trajectories
            .into_iter()
            .filter_map(Trajectory::score_bounds)
            .reduce(|(lo, hi), (l, h)| (lo.min(l), hi.max(h)));
        match bounds {
            Some((min, max)) => Self { min, max },
            None => Self { min: 0.0, max: 0.0 },
        }
    }

    /// Raw threshold for a normalized grid value. The end points map exactly
    /// onto `min` and `max` so the extreme predictions always survive there.
    pub fn raw_threshold(&self, g: f64) -> f64 {
        if g <= 0.0 {
            self.min
        } else if g >= 1.0 {
            self.max
        } else {
            self.min + g * (self.max - self.min)
        }
    }
}

fn check_lengths(traj: &Trajectory, gt: &GroundTruth) -> Result<()> {
    if traj.len() != gt.len() {
        return Err(Error::LengthMismatch {
            expected: gt.len(),
            found: traj.len(),
        });
    }
    Ok(())
}

/// The prediction at frame `t` after thresholding at raw score `tau`.
pub fn thresholded_prediction(traj: &Trajectory, t: usize, tau: f64) -> Region {
    let p = &traj.entries()[t];
    match p.region() {
        Region::Box(_) if p.score() >= tau => *p.region(),
        _ => Region::Empty,
    }
}

/// Tracking precision and recall at raw threshold `tau`.
///
/// Precision is zero when no prediction survives.
pub fn tracking_precision_recall(
    traj: &Trajectory,
    gt: &GroundTruth,
    tau: f64,
) -> Result<PrecisionRecall> {
    check_lengths(traj, gt)?;
    let n_g = gt.visible_count();
    if n_g == 0 {
        return Err(Error::NoVisibleFrame);
    }
    let mut n_p = 0usize;
    let mut overlap = 0.0;
    for (t, g) in gt.regions().iter().enumerate() {
        let a = thresholded_prediction(traj, t, tau);
        if !a.is_empty() {
            n_p += 1;
            // absent ground truth contributes 0 to both sums
            overlap += iou(&a, g);
        }
    }
    let precision = if n_p == 0 { 0.0 } else { overlap / n_p as f64 };
    Ok(PrecisionRecall {
        precision,
        recall: overlap / n_g as f64,
        counts: EvalCounts { n_g, n_p },
    })
}

/// Detection-style precision and recall: the fraction of surviving
/// predictions (resp. visible frames) whose overlap reaches `tau_omega`.
pub fn pr_recall_thresholded(
    traj: &Trajectory,
    gt: &GroundTruth,
    tau_theta: f64,
    tau_omega: f64,
) -> Result<(f64, f64)> {
    check_lengths(traj, gt)?;
    if !(0.0..=1.0).contains(&tau_omega) {
        return Err(Error::InvalidParameter("overlap threshold must lie in [0, 1]"));
    }
    let n_g = gt.visible_count();
    if n_g == 0 {
        return Err(Error::NoVisibleFrame);
    }
    let (mut n_p, mut hits_p, mut hits_g) = (0usize, 0usize, 0usize);
    for (t, g) in gt.regions().iter().enumerate() {
        let a = thresholded_prediction(traj, t, tau_theta);
        let hit = iou(&a, g) >= tau_omega;
        if !a.is_empty() {
            n_p += 1;
            if hit {
                hits_p += 1;
            }
        }
        if !g.is_empty() && hit && !a.is_empty() {
            hits_g += 1;
        }
    }
    let precision = if n_p == 0 {
        0.0
    } else {
        hits_p as f64 / n_p as f64
    };
    Ok((precision, hits_g as f64 / n_g as f64))
}

/// Harmonic mean of precision and recall, zero when both are zero.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    let sum = precision + recall;
    if sum <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / sum
    }
}

/// Mean overlap over all frames, ignoring scores.
pub fn auc(traj: &Trajectory, gt: &GroundTruth) -> Result<f64> {
    check_lengths(traj, gt)?;
    let sum: f64 = traj
        .entries()
        .iter()
        .zip(gt.regions())
        .map(|(p, g)| iou(p.region(), g))
        .sum();
    Ok(sum / gt.len() as f64)
}

/// Like [`auc`], but frames where both the target and the prediction are
/// absent count as overlap 1.
pub fn auc_mod(traj: &Trajectory, gt: &GroundTruth) -> Result<f64> {
    check_lengths(traj, gt)?;
    let sum: f64 = traj
        .entries()
        .iter()
        .zip(gt.regions())
        .map(|(p, g)| {
            if p.region().is_empty() && g.is_empty() {
                1.0
            } else {
                iou(p.region(), g)
            }
        })
        .sum();
    Ok(sum / gt.len() as f64)
}

/// Precision/recall of one sequence at every grid point, thresholding raw
/// scores against `range`.
pub fn sequence_pr_curve(
    traj: &Trajectory,
    gt: &GroundTruth,
    grid: &ThresholdGrid,
    range: ScoreRange,
) -> Result<PRCurve> {
    check_lengths(traj, gt)?;
    let points = grid
        .values()
        .iter()
        .map(|&g| {
            let pr = tracking_precision_recall(traj, gt, range.raw_threshold(g))?;
            Ok(PRPoint::new(g, pr.precision, pr.recall))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PRCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BBox;
    use crate::model::Prediction;
    use alloc::vec;

    fn bb(x: f64, y: f64, w: f64, h: f64) -> BBox {
        BBox::new(x, y, w, h).unwrap()
    }

    /// Three frames: visible with overlap 0.8, visible with overlap 0.4,
    /// absent; the tracker reports a box on all three.
    fn three_frame_case() -> (Trajectory, GroundTruth) {
        let g = bb(0.0, 0.0, 10.0, 10.0);
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Box(g), Region::Empty]).unwrap();
        // 10x8 inside 10x10 -> 0.8; 10x4 inside -> 0.4
        let traj = Trajectory::new(vec![
            Prediction::present(bb(0.0, 0.0, 10.0, 8.0), 0.9).unwrap(),
            Prediction::present(bb(0.0, 0.0, 10.0, 4.0), 0.9).unwrap(),
            Prediction::present(g, 0.9).unwrap(),
        ]);
        (traj, gt)
    }

    #[test]
    fn thresholding() {
        let b = bb(1.0, 1.0, 2.0, 2.0);
        let traj = Trajectory::new(vec![
            Prediction::present(b, 0.9).unwrap(),
            Prediction::present(b, 0.3).unwrap(),
            Prediction::absent(),
        ]);
        assert_eq!(thresholded_prediction(&traj, 0, 0.5), Region::Box(b));
        assert_eq!(thresholded_prediction(&traj, 1, 0.5), Region::Empty);
        assert_eq!(thresholded_prediction(&traj, 2, f64::NEG_INFINITY), Region::Empty);
        // survives on equality
        assert_eq!(thresholded_prediction(&traj, 1, 0.3), Region::Box(b));
    }

    #[test]
    fn hand_evaluated_three_frames() {
        let (traj, gt) = three_frame_case();
        let pr = tracking_precision_recall(&traj, &gt, 0.5).unwrap();
        assert!((pr.precision - 0.4).abs() < 1e-12);
        assert!((pr.recall - 0.6).abs() < 1e-12);
        assert_eq!(pr.counts, EvalCounts { n_g: 2, n_p: 3 });
        let (p, r) = pr_recall_thresholded(&traj, &gt, 0.5, 0.5).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-12);
        assert!((r - 0.5).abs() < 1e-12);
    }

    #[test]
    fn threshold_above_all_scores() {
        let (traj, gt) = three_frame_case();
        let pr = tracking_precision_recall(&traj, &gt, 0.95).unwrap();
        assert_eq!((pr.precision, pr.recall, pr.counts.n_p), (0.0, 0.0, 0));
    }

    #[test]
    fn perfect_predictions() {
        let g = bb(5.0, 5.0, 3.0, 4.0);
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Empty, Region::Box(g)]).unwrap();
        let traj = Trajectory::new(vec![
            Prediction::present(g, 1.0).unwrap(),
            Prediction::absent(),
            Prediction::present(g, 0.7).unwrap(),
        ]);
        let pr = tracking_precision_recall(&traj, &gt, 0.0).unwrap();
        assert_eq!((pr.precision, pr.recall), (1.0, 1.0));
    }

    #[test]
    fn detection_style_extremes() {
        let (traj, gt) = three_frame_case();
        let (p, _) = pr_recall_thresholded(&traj, &gt, 0.0, 0.0).unwrap();
        assert_eq!(p, 1.0);
        let (p, r) = pr_recall_thresholded(&traj, &gt, 0.0, 1.0).unwrap();
        assert_eq!((p, r), (0.0, 0.0));
        assert!(pr_recall_thresholded(&traj, &gt, 0.0, 1.5).is_err());
    }

    #[test]
    fn f_values() {
        assert_eq!(f_measure(1.0, 1.0), 1.0);
        assert_eq!(f_measure(0.0, 0.7), 0.0);
        assert_eq!(f_measure(0.0, 0.0), 0.0);
        assert!((f_measure(0.4, 0.6) - 0.48).abs() < 1e-15);
    }

    #[test]
    fn auc_variants() {
        let g = bb(0.0, 0.0, 4.0, 4.0);
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Empty]).unwrap();
        let both_absent = Trajectory::new(vec![Prediction::present(g, 1.0).unwrap(), Prediction::absent()]);
        assert_eq!(auc(&both_absent, &gt).unwrap(), 0.5);
        assert_eq!(auc_mod(&both_absent, &gt).unwrap(), 1.0);
        let short = Trajectory::new(vec![Prediction::absent()]);
        assert!(auc(&short, &gt).is_err());
    }

    #[test]
    fn length_mismatch() {
        let (_, gt) = three_frame_case();
        let traj = Trajectory::new(vec![Prediction::absent()]);
        assert_eq!(
            tracking_precision_recall(&traj, &gt, 0.0).unwrap_err(),
            Error::LengthMismatch { expected: 3, found: 1 }
        );
    }

    #[test]
    fn grid_shape() {
        let grid = ThresholdGrid::default();
        assert_eq!(grid.len(), 101);
        assert_eq!(grid.values()[0], 0.0);
        assert_eq!(grid.values()[100], 1.0);
        assert!((grid.values()[50] - 0.5).abs() < 1e-15);
        assert!(ThresholdGrid::uniform(1).is_err());
    }

    #[test]
    fn constant_score_curve_is_flat() {
        let (traj, gt) = three_frame_case();
        let range = ScoreRange::of([&traj]);
        assert_eq!(range, ScoreRange { min: 0.9, max: 0.9 });
        let curve = sequence_pr_curve(&traj, &gt, &ThresholdGrid::default(), range).unwrap();
        assert_eq!(curve.points.len(), 101);
        assert!(curve.points.iter().all(|p| p.precision == curve.points[0].precision
            && p.recall == curve.points[0].recall));
        assert_eq!(curve.best_index(), Some(0));
    }

    #[test]
    fn perfect_certainty_curve() {
        // score 1 on visible frames, 0 on (reported) absent frames
        let g = bb(0.0, 0.0, 4.0, 4.0);
        let gt = GroundTruth::new(vec![Region::Box(g), Region::Empty, Region::Box(g)]).unwrap();
        let traj = Trajectory::new(vec![
            Prediction::present(g, 1.0).unwrap(),
            Prediction::present(g, 0.0).unwrap(),
            Prediction::present(g, 1.0).unwrap(),
        ]);
        let curve =
            sequence_pr_curve(&traj, &gt, &ThresholdGrid::default(), ScoreRange::of([&traj])).unwrap();
        assert!(curve.points[0].f < 1.0);
        assert!(curve.points[1..].iter().all(|p| p.f == 1.0));
    }

    #[test]
    fn raw_threshold_end_points() {
        let r = ScoreRange::new(0.1, 0.7).unwrap();
        assert_eq!(r.raw_threshold(0.0), 0.1);
        assert_eq!(r.raw_threshold(1.0), 0.7);
        assert!(ScoreRange::new(1.0, 0.0).is_err());
    }
}
