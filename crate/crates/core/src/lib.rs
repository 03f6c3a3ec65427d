//! Evaluation core for long-term single-object tracking.
//!
//! The crate is `no_std` (with `alloc`) and contains everything that is pure
//! computation:
//!
//! * [`geometry`]: regions and the overlap function,
//! * [`model`]: ground truth, trajectories, sequence metadata, timing logs and
//!   their line-oriented text formats,
//! * [`measures`]: tracking precision, recall and F-measure plus the AUC
//!   baselines,
//! * [`protocol`]: dataset-level averaging and tracker ranking,
//! * [`analyses`]: annotation sparsity, attribute and disappearance breakdowns,
//!   speed statistics and re-detection analyses,
//! * [`generators`]: re-detection and forward/backward loop experiments,
//! * [`simulate`]: theoretical and parameterized synthetic trackers,
//! * [`synthetic`]: seeded synthetic ground-truth datasets.
//!
//! File system access, image IO, reports and the command line live in the
//! `lt-eval` crate.

#![no_std]

extern crate alloc;

pub mod analyses;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod measures;
pub mod model;
pub mod protocol;
pub mod simulate;
pub mod synthetic;

pub use error::{Error, Result};
pub use geometry::{center, iou, BBox, Region};
pub use measures::{
    auc, auc_mod, f_measure, pr_recall_thresholded, sequence_pr_curve, thresholded_prediction,
    tracking_precision_recall, EvalCounts, PRCurve, PRPoint, ScoreRange, ThresholdGrid,
};
pub use model::{
    Attribute, AttributeSet, GroundTruth, Prediction, SequenceRecord, TimingLog, Trajectory,
};
pub use protocol::{evaluate_tracker, rank_trackers, TrackerEvaluation};
