//! Sequences, ground truth, tracker trajectories and timing logs.
//!
//! All text formats are line oriented with one frame per line. A box is
//! written as `x,y,w,h` (trajectories append `,score`) and an empty line
//! means the target is absent or was not reported.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, ParseErrorKind, Result};
use crate::geometry::{BBox, Region};

/// Splits a file into lines; a single trailing newline terminates the last
/// line rather than starting a new empty one.
fn lines(text: &str) -> impl Iterator<Item = &str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut parts = body.split('\n');
    if text.is_empty() {
        // `"".split` yields one empty piece; an empty file has no lines.
        parts.next();
    }
    parts.map(|l| l.strip_suffix('\r').unwrap_or(l))
}

fn parse_fields(line: &str, line_no: usize, expected: usize) -> Result<Vec<f64>> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line: line_no,
            kind: ParseErrorKind::FieldCount {
                expected,
                found: fields.len(),
            },
        });
    }
    fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                kind: ParseErrorKind::NotANumber { field: i + 1 },
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    kind: ParseErrorKind::NonFinite { field: i + 1 },
                });
            }
            Ok(v)
        })
        .collect()
}

fn parse_box(values: &[f64], line_no: usize) -> Result<BBox> {
    BBox::new(values[0], values[1], values[2], values[3]).map_err(|_| Error::Parse {
        line: line_no,
        kind: ParseErrorKind::NonpositiveExtent,
    })
}

fn write_box(out: &mut String, b: &BBox) {
    let _ = write!(out, "{},{},{},{}", b.x(), b.y(), b.width(), b.height());
}

/// Per-frame ground-truth regions of one sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundTruth {
    regions: Vec<Region>,
}

impl GroundTruth {
    /// Fails with [`Error::NoVisibleFrame`] unless at least one region is a box.
    pub fn new(regions: Vec<Region>) -> Result<Self> {
        if regions.iter().all(Region::is_empty) {
            return Err(Error::NoVisibleFrame);
        }
        Ok(Self { regions })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut regions = Vec::new();
        for (i, line) in lines(text).enumerate() {
            if line.trim().is_empty() {
                regions.push(Region::Empty);
            } else {
                let values = parse_fields(line, i + 1, 4)?;
                regions.push(Region::Box(parse_box(&values, i + 1)?));
            }
        }
        if regions.is_empty() {
            return Err(Error::Parse {
                line: 1,
                kind: ParseErrorKind::Empty,
            });
        }
        Self::new(regions)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.regions {
            if let Region::Box(b) = r {
                write_box(&mut out, b);
            }
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn is_visible(&self, t: usize) -> bool {
        !self.regions[t].is_empty()
    }

    /// Number of frames with a visible target.
    pub fn visible_count(&self) -> usize {
        self.regions.iter().filter(|r| !r.is_empty()).count()
    }

    /// Lengths of the absence runs that follow a visible frame.
    pub fn disappearances(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut seen_visible = false;
        let mut run = 0usize;
        for r in &self.regions {
            if r.is_empty() {
                if seen_visible {
                    run += 1;
                }
            } else {
                if run > 0 {
                    runs.push(run);
                    run = 0;
                }
                seen_visible = true;
            }
        }
        if run > 0 {
            runs.push(run);
        }
        runs
    }
}

/// One frame of tracker output.
///
/// An empty region means the tracker reported the target absent; the score
/// of such an entry never influences any measure. Absence read from a file
/// carries `f64::NEG_INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Prediction {
    region: Region,
    score: f64,
}

impl Prediction {
    pub fn present(bbox: BBox, score: f64) -> Result<Self> {
        if !score.is_finite() {
            return Err(Error::InvalidParameter("prediction score must be finite"));
        }
        Ok(Self {
            region: Region::Box(bbox),
            score,
        })
    }

    /// Reported absence with an explicit (ignored) score.
    pub fn absent_with_score(score: f64) -> Self {
        Self {
            region: Region::Empty,
            score,
        }
    }

    pub fn absent() -> Self {
        Self::absent_with_score(f64::NEG_INFINITY)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn score(&self) -> f64 {
        self.score
    }

    /// Score of a reported box, `None` for absence.
    pub fn box_score(&self) -> Option<f64> {
        match self.region {
            Region::Box(_) => Some(self.score),
            Region::Empty => None,
        }
    }
}

/// A tracker's per-frame output on one sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Trajectory {
    entries: Vec<Prediction>,
}

impl Trajectory {
    pub fn new(entries: Vec<Prediction>) -> Self {
        Self { entries }
    }

    pub fn parse(text: &str, expected_length: usize) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in lines(text).enumerate() {
            if line.trim().is_empty() {
                entries.push(Prediction::absent());
            } else {
                let values = parse_fields(line, i + 1, 5)?;
                let bbox = parse_box(&values, i + 1)?;
                entries.push(Prediction {
                    region: Region::Box(bbox),
                    score: values[4],
                });
            }
        }
        if entries.len() != expected_length {
            return Err(Error::LengthMismatch {
                expected: expected_length,
                found: entries.len(),
            });
        }
        Ok(Self { entries })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.entries {
            if let Region::Box(b) = &p.region {
                write_box(&mut out, b);
                let _ = write!(out, ",{}", p.score);
            }
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Prediction] {
        &self.entries
    }

    /// Minimum and maximum score over reported boxes.
    pub fn score_bounds(&self) -> Option<(f64, f64)> {
        self.entries
            .iter()
            .filter_map(Prediction::box_score)
            .fold(None, |acc, s| match acc {
                None => Some((s, s)),
                Some((lo, hi)) => Some((lo.min(s), hi.max(s))),
            })
    }

    /// Copy with every entry whose index is not in `frames` dropped.
    pub fn select(&self, frames: &[usize]) -> Self {
        Self::new(frames.iter().map(|&t| self.entries[t]).collect())
    }
}

/// Visual attribute codes used to annotate sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attribute {
    /// Full occlusion.
    FullOcclusion,
    /// Out of view.
    OutOfView,
    /// Partial occlusion.
    PartialOcclusion,
    /// Camera motion.
    CameraMotion,
    /// Fast motion.
    FastMotion,
    /// Scale change.
    ScaleChange,
    /// Aspect ratio change.
    AspectRatioChange,
    /// Viewpoint change.
    ViewpointChange,
    /// Similar objects.
    SimilarObjects,
}

impl Attribute {
    pub const ALL: [Attribute; 9] = [
        Attribute::FullOcclusion,
        Attribute::OutOfView,
        Attribute::PartialOcclusion,
        Attribute::CameraMotion,
        Attribute::FastMotion,
        Attribute::ScaleChange,
        Attribute::AspectRatioChange,
        Attribute::ViewpointChange,
        Attribute::SimilarObjects,
    ];

    pub fn code(self) -> char {
        match self {
            Attribute::FullOcclusion => 'O',
            Attribute::OutOfView => 'V',
            Attribute::PartialOcclusion => 'P',
            Attribute::CameraMotion => 'C',
            Attribute::FastMotion => 'F',
            Attribute::ScaleChange => 'S',
            Attribute::AspectRatioChange => 'A',
            Attribute::ViewpointChange => 'W',
            Attribute::SimilarObjects => 'I',
        }
    }

    pub fn from_code(code: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| {
                let mut buf = [0u8; 4];
                a.code().encode_utf8(&mut buf) == code
            })
            .ok_or_else(|| Error::UnknownAttribute(code.to_string()))
    }

    fn bit(self) -> u16 {
        1 << (self as u16)
    }
}

/// A subset of the nine attributes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct AttributeSet(u16);

impl AttributeSet {
    pub fn new() -> Self {
        Self(0)
    }

    pub fn parse_codes<'a>(codes: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut set = Self::new();
        for c in codes {
            set.insert(Attribute::from_code(c)?);
        }
        Ok(set)
    }

    pub fn insert(&mut self, a: Attribute) {
        self.0 |= a.bit();
    }

    pub fn contains(&self, a: Attribute) -> bool {
        self.0 & a.bit() != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Attribute> + '_ {
        Attribute::ALL.into_iter().filter(|a| self.contains(*a))
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }
}

impl FromIterator<Attribute> for AttributeSet {
    fn from_iter<I: IntoIterator<Item = Attribute>>(iter: I) -> Self {
        let mut set = Self::new();
        for a in iter {
            set.insert(a);
        }
        set
    }
}

/// Frame rate assumed when a manifest does not specify one.
pub const DEFAULT_FPS: f64 = 25.0;

/// An annotated sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceRecord {
    pub name: String,
    pub groundtruth: GroundTruth,
    pub attributes: AttributeSet,
    pub frame_paths: Option<Vec<String>>,
    pub fps: f64,
    /// `(width, height)` of the frames in pixels, when known.
    pub image_size: Option<(u32, u32)>,
}

impl SequenceRecord {
    pub fn new(name: impl Into<String>, groundtruth: GroundTruth) -> Self {
        Self {
            name: name.into(),
            groundtruth,
            attributes: AttributeSet::new(),
            frame_paths: None,
            fps: DEFAULT_FPS,
            image_size: None,
        }
    }

    pub fn with_attributes(mut self, attributes: AttributeSet) -> Self {
        self.attributes = attributes;
        self
    }

    pub fn with_image_size(mut self, width: u32, height: u32) -> Self {
        self.image_size = Some((width, height));
        self
    }

    pub fn with_frame_paths(mut self, paths: Vec<String>) -> Result<Self> {
        if paths.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: paths.len(),
            });
        }
        self.frame_paths = Some(paths);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.groundtruth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groundtruth.is_empty()
    }
}

/// Processing times reported by a tracker for one sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingLog {
    pub init_ms: f64,
    /// One entry per frame after initialization.
    pub frame_ms: Vec<f64>,
}

impl TimingLog {
    pub fn new(init_ms: f64, frame_ms: Vec<f64>) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(init_ms) || !frame_ms.iter().all(|&v| ok(v)) {
            return Err(Error::InvalidParameter(
                "timings must be finite and non-negative",
            ));
        }
        Ok(Self { init_ms, frame_ms })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in lines(text).enumerate() {
            let v = parse_fields(line, i + 1, 1)?[0];
            if v < 0.0 {
                return Err(Error::Parse {
                    line: i + 1,
                    kind: ParseErrorKind::NegativeDuration,
                });
            }
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::Parse {
                line: 1,
                kind: ParseErrorKind::Empty,
            });
        }
        let init_ms = values.remove(0);
        Ok(Self {
            init_ms,
            frame_ms: values,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in core::iter::once(&self.init_ms).chain(&self.frame_ms) {
            let _ = writeln!(out, "{}", v);
        }
        out
    }
}

/// Long-term statistics of one sequence.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SequenceStatistics {
    pub name: String,
    pub frames: usize,
    /// Number of disappearances.
    pub dsp: usize,
    /// Mean disappearance length in frames, zero without disappearances.
    pub adl: f64,
    pub absent_fraction: f64,
}

/// Dataset-level disappearance statistics.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DatasetStatistics {
    pub sequences: Vec<SequenceStatistics>,
    pub sequence_count: usize,
    pub frames: usize,
    pub dsp: usize,
    /// Mean length over all disappearances of the dataset.
    pub adl: f64,
    /// Disappearances per sequence.
    pub adn: f64,
    pub absent_fraction: f64,
}

pub fn dataset_statistics(dataset: &[SequenceRecord]) -> Result<DatasetStatistics> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let mut sequences = Vec::with_capacity(dataset.len());
    let (mut frames, mut absent, mut dsp, mut run_total) = (0usize, 0usize, 0usize, 0usize);
    for seq in dataset {
        let gt = &seq.groundtruth;
        let runs = gt.disappearances();
        let run_sum: usize = runs.iter().sum();
        let seq_absent = gt.len() - gt.visible_count();
        sequences.push(SequenceStatistics {
            name: seq.name.clone(),
            frames: gt.len(),
            dsp: runs.len(),
            adl: if runs.is_empty() {
                0.0
            } else {
                run_sum as f64 / runs.len() as f64
            },
            absent_fraction: seq_absent as f64 / gt.len() as f64,
        });
        frames += gt.len();
        absent += seq_absent;
        dsp += runs.len();
        run_total += run_sum;
    }
    Ok(DatasetStatistics {
        sequence_count: dataset.len(),
        frames,
        dsp,
        adl: if dsp == 0 {
            0.0
        } else {
            run_total as f64 / dsp as f64
        },
        adn: dsp as f64 / dataset.len() as f64,
        absent_fraction: absent as f64 / frames as f64,
        sequences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bx(x: f64, y: f64, w: f64, h: f64) -> Region {
        Region::bbox(x, y, w, h).unwrap()
    }

    #[test]
    fn groundtruth_with_absent_line() {
        let gt = GroundTruth::parse("10,20,30,40\n\n5,5,2,2\n").unwrap();
        assert_eq!(
            gt.regions(),
            &[bx(10.0, 20.0, 30.0, 40.0), Region::Empty, bx(5.0, 5.0, 2.0, 2.0)]
        );
    }

    #[test]
    fn groundtruth_rejects_zero_width() {
        let err = GroundTruth::parse("10,20,0,40\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 1,
                kind: ParseErrorKind::NonpositiveExtent
            }
        );
    }

    #[test]
    fn groundtruth_fractional() {
        let gt = GroundTruth::parse("1.5,2.25,3,4\n").unwrap();
        assert_eq!(gt.regions(), &[bx(1.5, 2.25, 3.0, 4.0)]);
    }

    #[test]
    fn groundtruth_malformed_lines() {
        assert!(matches!(
            GroundTruth::parse("1,2,3\n"),
            Err(Error::Parse { line: 1, kind: ParseErrorKind::FieldCount { .. } })
        ));
        assert!(matches!(
            GroundTruth::parse("1,2,3,4\n1,a,3,4\n"),
            Err(Error::Parse { line: 2, kind: ParseErrorKind::NotANumber { field: 2 } })
        ));
        assert_eq!(GroundTruth::parse("\n\n"), Err(Error::NoVisibleFrame));
    }

    #[test]
    fn trajectory_with_absence() {
        let tr = Trajectory::parse("10,20,30,40,0.9\n\n", 2).unwrap();
        assert_eq!(tr.entries()[0].region(), &bx(10.0, 20.0, 30.0, 40.0));
        assert_eq!(tr.entries()[0].score(), 0.9);
        assert!(tr.entries()[1].region().is_empty());
        assert_eq!(tr.entries()[1].box_score(), None);
    }

    #[test]
    fn trajectory_length_mismatch() {
        let err = Trajectory::parse("1,1,1,1,1\n1,1,1,1,1\n1,1,1,1,1\n", 4).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 4, found: 3 });
    }

    #[test]
    fn trajectory_rejects_nan_score() {
        assert!(matches!(
            Trajectory::parse("1,1,1,1,nan\n", 1),
            Err(Error::Parse { line: 1, kind: ParseErrorKind::NonFinite { field: 5 } })
        ));
        assert!(Trajectory::parse("1,1,1,1,inf\n", 1).is_err());
    }

    #[test]
    fn crlf_lines_are_accepted() {
        let gt = GroundTruth::parse("1,2,3,4\r\n\r\n").unwrap();
        assert_eq!(gt.len(), 2);
    }

    #[test]
    fn canonical_text_round_trips() {
        let text = "10,20,30,40,0.9\n\n1.5,2.25,3,4,-7\n";
        assert_eq!(Trajectory::parse(text, 3).unwrap().to_text(), text);
        let gt = "\n1,2,3,4\n\n";
        assert_eq!(GroundTruth::parse(gt).unwrap().to_text(), gt);
    }

    #[test]
    fn timing_log() {
        let log = TimingLog::parse("120.5\n10\n11\n").unwrap();
        assert_eq!(log.init_ms, 120.5);
        assert_eq!(log.frame_ms, vec![10.0, 11.0]);
        assert_eq!(log.to_text(), "120.5\n10\n11\n");
        assert!(TimingLog::parse("1\n-2\n").is_err());
        assert!(TimingLog::parse("").is_err());
    }

    #[test]
    fn attribute_codes() {
        let set = AttributeSet::parse_codes(["O", "W", "I"]).unwrap();
        let codes: String = set.iter().map(Attribute::code).collect();
        assert_eq!(codes, "OWI");
        assert!(AttributeSet::parse_codes(["X"]).is_err());
    }

    #[test]
    fn frame_paths_must_match_length() {
        let gt = GroundTruth::new(vec![bx(0.0, 0.0, 1.0, 1.0); 3]).unwrap();
        let seq = SequenceRecord::new("s", gt);
        assert!(seq.clone().with_frame_paths(vec!["a".into()]).is_err());
        assert!(seq
            .with_frame_paths(vec!["a".into(), "b".into(), "c".into()])
            .is_ok());
    }

    fn pattern(p: &str) -> SequenceRecord {
        let regions = p
            .chars()
            .map(|c| if c == 'V' { bx(0.0, 0.0, 1.0, 1.0) } else { Region::Empty })
            .collect();
        SequenceRecord::new(p, GroundTruth::new(regions).unwrap())
    }

    #[test]
    fn statistics_of_hand_pattern() {
        let stats = dataset_statistics(&[pattern("VVAAAVAV")]).unwrap();
        assert_eq!(stats.dsp, 2);
        assert_eq!(stats.adl, 2.0);
        assert_eq!(stats.absent_fraction, 0.5);
    }

    #[test]
    fn statistics_all_visible_and_leading_absence() {
        let stats = dataset_statistics(&[pattern("VVVV"), pattern("AAVVAV")]).unwrap();
        assert_eq!(stats.sequences[0].dsp, 0);
        assert_eq!(stats.sequences[0].adl, 0.0);
        // the leading run is not a disappearance
        assert_eq!(stats.sequences[1].dsp, 1);
        assert_eq!(stats.sequences[1].adl, 1.0);
        assert_eq!(stats.adn, 0.5);
        assert!(dataset_statistics(&[]).is_err());
    }
}
