//! Experiment sequence construction: staged re-detection and
//! forward/backward loop extension.
//!
//! Only the geometry and frame bookkeeping live here; pixel compositing and
//! file output are done by the `lt-eval` crate.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{iou, BBox, Region};
use crate::model::{GroundTruth, SequenceRecord, Trajectory};

/// Canvas enlargement of the re-detection experiment, per axis.
pub const PAD_FACTOR: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RedetectionSpec {
    /// Frames showing the enlarged original frame before the target moves.
    pub warmup_frames: usize,
    /// Frames showing only the displaced target patch.
    pub post_frames: usize,
}

impl Default for RedetectionSpec {
    fn default() -> Self {
        Self {
            warmup_frames: 5,
            post_frames: 300,
        }
    }
}

impl RedetectionSpec {
    pub fn new(warmup_frames: usize, post_frames: usize) -> Result<Self> {
        if warmup_frames == 0 || post_frames == 0 {
            return Err(Error::InvalidParameter(
                "re-detection sequences need at least one warm-up and one displaced frame",
            ));
        }
        Ok(Self {
            warmup_frames,
            post_frames,
        })
    }

    pub fn len(&self) -> usize {
        self.warmup_frames + self.post_frames
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Integer pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PixelRect {
    pub x: u32,
    pub y: u32,
    pub width: u32,
    pub height: u32,
}

/// Geometry of one generated re-detection sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct RedetectionPlan {
    pub spec: RedetectionSpec,
    pub canvas_width: u32,
    pub canvas_height: u32,
    /// Target box in the source (and warm-up) frames.
    pub original: BBox,
    /// Target box after the move to the bottom-right corner.
    pub displaced: BBox,
    /// Pixels copied from the source frame for the displaced patch.
    pub patch_source: PixelRect,
    /// Top-left corner of the patch on the canvas.
    pub patch_origin: (u32, u32),
    pub groundtruth: GroundTruth,
}

impl RedetectionPlan {
    /// Plans the sequence for a `width x height` first frame whose target is
    /// `target`.
    pub fn new(width: u32, height: u32, target: BBox, spec: RedetectionSpec) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter("image must not be empty"));
        }
        if !target.within(width as f64, height as f64) {
            return Err(Error::BoxOutOfBounds { width, height });
        }
        let canvas_width = PAD_FACTOR * width;
        let canvas_height = PAD_FACTOR * height;
        let (cw, ch) = (canvas_width as f64, canvas_height as f64);
        let displaced = BBox::new(
            cw - target.width(),
            ch - target.height(),
            target.width(),
            target.height(),
        )?;

        // smallest pixel rectangle covering the target
        let x0 = libm::floor(target.x()) as u32;
        let y0 = libm::floor(target.y()) as u32;
        let x1 = (libm::ceil(target.right()) as u32).min(width);
        let y1 = (libm::ceil(target.bottom()) as u32).min(height);
        let patch_source = PixelRect {
            x: x0,
            y: y0,
            width: (x1 - x0).max(1),
            height: (y1 - y0).max(1),
        };
        let patch_origin = (
            canvas_width - patch_source.width,
            canvas_height - patch_source.height,
        );

        let mut regions = Vec::with_capacity(spec.len());
        regions.extend(core::iter::repeat_n(Region::Box(target), spec.warmup_frames));
        regions.extend(core::iter::repeat_n(Region::Box(displaced), spec.post_frames));
        Ok(Self {
            spec,
            canvas_width,
            canvas_height,
            original: target,
            displaced,
            patch_source,
            patch_origin,
            groundtruth: GroundTruth::new(regions)?,
        })
    }

    /// True when the warm-up and displaced target positions do not overlap.
    pub fn positions_disjoint(&self) -> bool {
        iou(&Region::Box(self.original), &Region::Box(self.displaced)) == 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RedetectionOutcome {
    pub redetected: bool,
    /// Frames after the move until the first positive overlap; 0 means the
    /// target was found on the first displaced frame.
    pub frames_to_redetect: Option<usize>,
}

/// Scans the displaced part of a re-detection sequence for the first frame
/// where the prediction overlaps the target.
pub fn score_redetection(
    traj: &Trajectory,
    gt: &GroundTruth,
    spec: &RedetectionSpec,
) -> Result<RedetectionOutcome> {
    if traj.len() != gt.len() {
        return Err(Error::LengthMismatch {
            expected: gt.len(),
            found: traj.len(),
        });
    }
    let found = (spec.warmup_frames..gt.len())
        .find(|&t| iou(traj.entries()[t].region(), &gt.regions()[t]) > 0.0)
        .map(|t| t - spec.warmup_frames);
    Ok(RedetectionOutcome {
        redetected: found.is_some(),
        frames_to_redetect: found,
    })
}

/// Source frame index of every output frame when a length-`n` sequence is
/// played forward and backward `loops` times. Turning points are not
/// repeated, so the output has `2 * loops * (n - 1) + 1` frames.
pub fn loop_index_map(n: usize, loops: usize) -> Vec<usize> {
    if n <= 1 || loops == 0 {
        return (0..n).collect();
    }
    let period = 2 * (n - 1);
    (0..=loops * period)
        .map(|k| {
            let phase = k % period;
            if phase < n { phase } else { period - phase }
        })
        .collect()
}

/// Default number of forward/backward passes.
pub const DEFAULT_LOOPS: usize = 5;

/// The sequence extended by looping forward and backward; frame paths keep
/// pointing at the original images.
pub fn generate_loop_sequence(seq: &SequenceRecord, loops: usize) -> Result<SequenceRecord> {
    let map = loop_index_map(seq.len(), loops);
    let regions = map.iter().map(|&t| seq.groundtruth.regions()[t]).collect();
    Ok(SequenceRecord {
        name: format!("{}_loop{}", seq.name, loops),
        groundtruth: GroundTruth::new(regions)?,
        attributes: seq.attributes,
        frame_paths: seq
            .frame_paths
            .as_ref()
            .map(|p| map.iter().map(|&t| p[t].clone()).collect()),
        fps: seq.fps,
        image_size: seq.image_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Prediction;
    use alloc::string::{String, ToString};
    use alloc::vec;

    #[test]
    fn plan_geometry() {
        let target = BBox::new(10.0, 10.0, 20.0, 20.0).unwrap();
        let plan = RedetectionPlan::new(100, 80, target, RedetectionSpec::default()).unwrap();
        assert_eq!((plan.canvas_width, plan.canvas_height), (300, 240));
        assert_eq!(plan.displaced, BBox::new(280.0, 220.0, 20.0, 20.0).unwrap());
        assert_eq!(plan.groundtruth.len(), 305);
        for t in 0..5 {
            assert_eq!(plan.groundtruth.regions()[t], Region::Box(target));
        }
        assert_eq!(plan.groundtruth.regions()[5], Region::Box(plan.displaced));
        assert_eq!(plan.patch_origin, (280, 220));
        assert!(plan.positions_disjoint());
    }

    #[test]
    fn plan_rejects_box_outside_image() {
        let target = BBox::new(90.0, 10.0, 20.0, 20.0).unwrap();
        assert_eq!(
            RedetectionPlan::new(100, 80, target, RedetectionSpec::default()).unwrap_err(),
            Error::BoxOutOfBounds { width: 100, height: 80 }
        );
        assert!(RedetectionSpec::new(0, 10).is_err());
    }

    #[test]
    fn fractional_target_patch() {
        let target = BBox::new(10.5, 3.2, 4.0, 4.5).unwrap();
        let plan = RedetectionPlan::new(20, 20, target, RedetectionSpec::new(1, 1).unwrap()).unwrap();
        assert_eq!(
            plan.patch_source,
            PixelRect { x: 10, y: 3, width: 5, height: 5 }
        );
    }

    fn jump_at(k: usize, spec: RedetectionSpec) -> (Trajectory, GroundTruth) {
        let target = BBox::new(10.0, 10.0, 20.0, 20.0).unwrap();
        let plan = RedetectionPlan::new(100, 80, target, spec).unwrap();
        let traj = Trajectory::new(
            (0..spec.len())
                .map(|t| {
                    let b = if t >= spec.warmup_frames + k { plan.displaced } else { target };
                    Prediction::present(b, 1.0).unwrap()
                })
                .collect(),
        );
        (traj, plan.groundtruth)
    }

    #[test]
    fn scripted_jumps() {
        let spec = RedetectionSpec::default();
        for k in [0, 7, 77] {
            let (traj, gt) = jump_at(k, spec);
            let out = score_redetection(&traj, &gt, &spec).unwrap();
            assert!(out.redetected);
            assert_eq!(out.frames_to_redetect, Some(k));
        }
        let (traj, gt) = jump_at(spec.post_frames, spec);
        let out = score_redetection(&traj, &gt, &spec).unwrap();
        assert!(!out.redetected);
        assert_eq!(out.frames_to_redetect, None);
    }

    #[test]
    fn palindrome_for_one_loop() {
        assert_eq!(loop_index_map(3, 1), vec![0, 1, 2, 1, 0]);
        assert_eq!(loop_index_map(4, 5).len(), 10 * 3 + 1);
        assert_eq!(loop_index_map(1, 5), vec![0]);
    }

    #[test]
    fn loop_sequence_follows_visibility() {
        let b = Region::bbox(0.0, 0.0, 1.0, 1.0).unwrap();
        let gt = GroundTruth::new(vec![b, Region::Empty, b]).unwrap();
        let seq = SequenceRecord::new("s", gt)
            .with_frame_paths(vec!["0.png".into(), "1.png".into(), "2.png".into()])
            .unwrap();
        let looped = generate_loop_sequence(&seq, 1).unwrap();
        assert_eq!(looped.name, "s_loop1");
        assert_eq!(
            looped.groundtruth.regions(),
            &[b, Region::Empty, b, Region::Empty, b]
        );
        let paths: Vec<String> = ["0", "1", "2", "1", "0"].iter().map(|s| s.to_string() + ".png").collect();
        assert_eq!(looped.frame_paths.unwrap(), paths);
    }
}
