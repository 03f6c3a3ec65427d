//! Trackers derived from the ground truth.
//!
//! The four theoretical trackers probe how each measure reacts to absence
//! prediction; [`simulate_tracker`] produces seeded, imperfect trajectories
//! for analyses that need realistic behaviour.
//!
//! Scores are certainties: higher means more confident that the target is
//! present, so a threshold keeps predictions scoring at or above it.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::error::{Error, Result};
use crate::geometry::{BBox, Region};
use crate::model::{GroundTruth, Prediction, TimingLog, Trajectory};

/// Score of the constant-certainty trackers.
pub const CONSTANT_SCORE: f64 = 0.5;

fn present(b: BBox, score: f64) -> Prediction {
    Prediction::present(b, score).expect("finite score")
}

/// Reports the ground truth with certainty 1 where the target is visible and
/// absence with certainty 0 elsewhere.
pub fn t_gt_gt(gt: &GroundTruth) -> Trajectory {
    Trajectory::new(
        gt.regions()
            .iter()
            .map(|g| match g {
                Region::Box(b) => present(*b, 1.0),
                Region::Empty => Prediction::absent_with_score(0.0),
            })
            .collect(),
    )
}

/// Reports the ground truth with constant certainty in every frame. Absent
/// frames repeat the last visible box (the first visible one for a leading
/// absence).
pub fn t_gt_co(gt: &GroundTruth) -> Trajectory {
    let mut last = gt.regions().iter().find_map(Region::as_box).copied();
    Trajectory::new(
        gt.regions()
            .iter()
            .map(|g| {
                if let Region::Box(b) = g {
                    last = Some(*b);
                }
                match last {
                    Some(b) => present(b, CONSTANT_SCORE),
                    None => Prediction::absent_with_score(CONSTANT_SCORE),
                }
            })
            .collect(),
    )
}

/// Reports the whole `width x height` image in all `len` frames.
pub fn t_im_co(len: usize, width: u32, height: u32) -> Result<Trajectory> {
    let full = BBox::new(0.0, 0.0, width as f64, height as f64)?;
    Ok(Trajectory::new(
        (0..len).map(|_| present(full, CONSTANT_SCORE)).collect(),
    ))
}

/// Never reports the target.
pub fn t_lost(len: usize) -> Trajectory {
    Trajectory::new(
        (0..len)
            .map(|_| Prediction::absent_with_score(CONSTANT_SCORE))
            .collect(),
    )
}

/// The literal variant of [`t_lost`]: a 1x1 box in the top-left corner with
/// constant certainty.
pub fn t_lost_corner_box(len: usize) -> Trajectory {
    let corner = BBox::new(0.0, 0.0, 1.0, 1.0).expect("unit box");
    Trajectory::new((0..len).map(|_| present(corner, CONSTANT_SCORE)).collect())
}

/// How a simulated tracker's certainty relates to its actual state.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Calibration {
    /// Certainty 1 while tracking; reports absence whenever lost or the
    /// target is gone.
    Perfect,
    /// Always reports a box with [`CONSTANT_SCORE`].
    Constant,
    /// Certainty around 0.75 while tracking and 0.25 otherwise, with
    /// Gaussian noise of the given standard deviation.
    Noisy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulatorParams {
    /// Standard deviation of the per-frame center noise, in pixels.
    pub drift_rate: f64,
    /// Probability of losing the target on any frame after the first.
    pub fail_prob: f64,
    /// Frames spent lost after a failure; `None` never recovers.
    pub redetect_delay: Option<usize>,
    pub calibration: Calibration,
    pub rng_seed: u64,
}

impl Default for SimulatorParams {
    fn default() -> Self {
        Self {
            drift_rate: 0.0,
            fail_prob: 0.0,
            redetect_delay: Some(0),
            calibration: Calibration::Perfect,
            rng_seed: 0,
        }
    }
}

impl SimulatorParams {
    fn validate(&self) -> Result<()> {
        if !(self.drift_rate.is_finite() && self.drift_rate >= 0.0) {
            return Err(Error::InvalidParameter("drift rate must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.fail_prob) {
            return Err(Error::InvalidParameter("failure probability must lie in [0, 1]"));
        }
        if let Calibration::Noisy(sigma) = self.calibration {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(Error::InvalidParameter("score noise must be finite and >= 0"));
            }
        }
        Ok(())
    }
}

/// Seeded synthetic tracker following the ground truth.
///
/// The first frame always reports the ground truth. Afterwards the tracker
/// jitters around the target, fails with probability `fail_prob` per frame
/// and stays lost for `redetect_delay` frames, during which it either
/// reports absence (perfect calibration) or keeps the stale box.
pub fn simulate_tracker(gt: &GroundTruth, params: &SimulatorParams) -> Result<Trajectory> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let jitter = Normal::new(0.0, params.drift_rate)
        .map_err(|_| Error::InvalidParameter("drift rate"))?;
    let noise = match params.calibration {
        Calibration::Noisy(sigma) => Some(
            Normal::new(0.0, sigma).map_err(|_| Error::InvalidParameter("score noise"))?,
        ),
        _ => None,
    };
    let score = |rng: &mut ChaCha8Rng, confident: bool| -> f64 {
        match params.calibration {
            Calibration::Perfect => {
                if confident {
                    1.0
                } else {
                    0.0
                }
            }
            Calibration::Constant => CONSTANT_SCORE,
            Calibration::Noisy(_) => {
                let base = if confident { 0.75 } else { 0.25 };
                base + noise.as_ref().map_or(0.0, |n| n.sample(rng))
            }
        }
    };

    let mut entries = Vec::with_capacity(gt.len());
    let mut last: Option<BBox> = None;
    // remaining lost frames; `None` while tracking, `Some(None)` forever
    let mut lost: Option<Option<usize>> = None;

    let stale = |last: Option<BBox>, s: f64, calibration: Calibration| match (calibration, last) {
        (Calibration::Perfect, _) | (_, None) => Prediction::absent_with_score(s),
        (_, Some(b)) => present(b, s),
    };

    for (t, g) in gt.regions().iter().enumerate() {
        if t == 0 {
            let p = match g {
                Region::Box(b) => {
                    last = Some(*b);
                    present(*b, score(&mut rng, true))
                }
                Region::Empty => Prediction::absent_with_score(score(&mut rng, false)),
            };
            entries.push(p);
            continue;
        }
        if lost.is_none() && params.fail_prob > 0.0 && rng.random::<f64>() < params.fail_prob {
            lost = Some(params.redetect_delay);
        }
        if let Some(remaining) = lost {
            match remaining {
                Some(0) => lost = None,
                Some(n) => {
                    lost = Some(Some(n - 1));
                    let s = score(&mut rng, false);
                    entries.push(stale(last, s, params.calibration));
                    continue;
                }
                None => {
                    let s = score(&mut rng, false);
                    entries.push(stale(last, s, params.calibration));
                    continue;
                }
            }
        }
        let p = match g {
            Region::Box(b) => {
                let b = if params.drift_rate > 0.0 {
                    b.translated(jitter.sample(&mut rng), jitter.sample(&mut rng))
                } else {
                    *b
                };
                last = Some(b);
                present(b, score(&mut rng, true))
            }
            Region::Empty => {
                let s = score(&mut rng, false);
                stale(last, s, params.calibration)
            }
        };
        entries.push(p);
    }
    Ok(Trajectory::new(entries))
}

/// Seeded timing log for a sequence of `len` frames: initialization takes
/// about ten frames' worth of time and per-frame times vary log-normally
/// around `mean_frame_ms`.
pub fn simulate_timing(len: usize, mean_frame_ms: f64, seed: u64) -> Result<TimingLog> {
    if len == 0 || !(mean_frame_ms.is_finite() && mean_frame_ms > 0.0) {
        return Err(Error::InvalidParameter("timing needs frames and a positive mean"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = LogNormal::new(0.0, 0.35).map_err(|_| Error::InvalidParameter("spread"))?;
    let init_ms = 10.0 * mean_frame_ms * spread.sample(&mut rng);
    let frame_ms = (1..len)
        .map(|_| mean_frame_ms * spread.sample(&mut rng))
        .collect();
    TimingLog::new(init_ms, frame_ms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::tracking_precision_recall;
    use alloc::vec;

    fn gt() -> GroundTruth {
        let b = |x: f64| Region::bbox(x, 5.0, 10.0, 10.0).unwrap();
        GroundTruth::new(vec![b(0.0), b(1.0), Region::Empty, Region::Empty, b(4.0), b(5.0)]).unwrap()
    }

    #[test]
    fn gt_gt_scores_are_binary() {
        let tr = t_gt_gt(&gt());
        let scores: Vec<f64> = tr.entries().iter().map(|p| p.score()).collect();
        assert_eq!(scores, vec![1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(tr.entries()[2].region().is_empty());
    }

    #[test]
    fn gt_co_repeats_last_box() {
        let g = gt();
        let tr = t_gt_co(&g);
        assert_eq!(tr.entries()[2].region(), &g.regions()[1]);
        assert_eq!(tr.entries()[3].region(), &g.regions()[1]);
        assert!(tr.entries().iter().all(|p| p.score() == CONSTANT_SCORE));
        let pr = tracking_precision_recall(&tr, &g, CONSTANT_SCORE).unwrap();
        assert_eq!(pr.recall, 1.0);
        assert!(pr.precision < 1.0);
    }

    #[test]
    fn lost_variants() {
        let g = gt();
        let pr = tracking_precision_recall(&t_lost(g.len()), &g, f64::NEG_INFINITY).unwrap();
        assert_eq!((pr.precision, pr.recall), (0.0, 0.0));
        let pr = tracking_precision_recall(&t_lost_corner_box(g.len()), &g, 0.0).unwrap();
        assert_eq!(pr.recall, 0.0);
    }

    #[test]
    fn full_image_box_overlap() {
        // 10x10 target in a 100x10 image: overlap 0.1
        let g = GroundTruth::new(vec![Region::bbox(0.0, 0.0, 10.0, 10.0).unwrap()]).unwrap();
        let tr = t_im_co(1, 100, 10).unwrap();
        let pr = tracking_precision_recall(&tr, &g, 0.0).unwrap();
        assert!((pr.recall - 0.1).abs() < 1e-15);
    }

    #[test]
    fn degenerate_simulator_matches_gt_gt() {
        let g = gt();
        let tr = simulate_tracker(&g, &SimulatorParams::default()).unwrap();
        assert_eq!(tr, t_gt_gt(&g));
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = gt();
        let params = SimulatorParams {
            drift_rate: 2.0,
            fail_prob: 0.3,
            redetect_delay: Some(1),
            calibration: Calibration::Noisy(0.1),
            rng_seed: 42,
        };
        let a = simulate_tracker(&g, &params).unwrap();
        assert_eq!(a, simulate_tracker(&g, &params).unwrap());
        let other = simulate_tracker(&g, &SimulatorParams { rng_seed: 43, ..params }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn immediate_permanent_failure() {
        let g = gt();
        let params = SimulatorParams {
            fail_prob: 1.0,
            redetect_delay: None,
            ..SimulatorParams::default()
        };
        let tr = simulate_tracker(&g, &params).unwrap();
        let pr = tracking_precision_recall(&tr, &g, f64::NEG_INFINITY).unwrap();
        assert_eq!(pr.recall, 1.0 / g.visible_count() as f64);
    }

    #[test]
    fn timing_is_seeded_and_sized() {
        let a = simulate_timing(50, 20.0, 7).unwrap();
        assert_eq!(a.frame_ms.len(), 49);
        assert_eq!(a, simulate_timing(50, 20.0, 7).unwrap());
        assert!(a.frame_ms.iter().all(|&v| v > 0.0));
        assert!(simulate_timing(0, 20.0, 7).is_err());
    }

    #[test]
    fn invalid_params() {
        let g = gt();
        let bad = SimulatorParams {
            fail_prob: 1.5,
            ..SimulatorParams::default()
        };
        assert!(simulate_tracker(&g, &bad).is_err());
    }
}
