//! The `sequences.json` dataset manifest.
//!
//! ```json
//! [
//!   {"name": "car", "fps": 25, "attributes": ["O", "V"], "frames": 1200,
//!    "groundtruth_path": "car/groundtruth.txt", "frames_dir": "car/frames"}
//! ]
//! ```
//!
//! Paths are relative to the manifest's directory. Optional extensions:
//! `frame_paths` (explicit image list, used by generated sequences) and
//! `width`/`height` of the frames.

use std::fs;
use std::path::{Path, PathBuf};

use lt_eval_core::model::DEFAULT_FPS;
use lt_eval_core::{AttributeSet, GroundTruth, SequenceRecord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, IoContext, Result};

fn default_fps() -> f64 {
    DEFAULT_FPS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    #[serde(default = "default_fps")]
    pub fps: f64,
    #[serde(default)]
    pub attributes: Vec<String>,
    pub frames: usize,
    pub groundtruth_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames_dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_paths: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<u32>,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).at(path)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).at(parent)?;
    }
    fs::write(path, text).at(path)
}

fn is_image(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("png" | "jpg" | "jpeg")
    )
}

/// Image files of a directory, sorted by file name.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut frames = Vec::new();
    for entry in fs::read_dir(dir).at(dir)? {
        let path = entry.at(dir)?.path();
        if path.is_file() && is_image(&path) {
            frames.push(path);
        }
    }
    frames.sort();
    Ok(frames)
}

fn path_string(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn load_entry(base: &Path, entry: &ManifestEntry) -> Result<SequenceRecord> {
    let gt_path = base.join(&entry.groundtruth_path);
    let groundtruth = GroundTruth::parse(&read_text(&gt_path)?).map_err(|source| Error::Format {
        path: gt_path.clone(),
        source,
    })?;
    if groundtruth.len() != entry.frames {
        return Err(Error::Config(format!(
            "{}: manifest declares {} frames, ground truth has {}",
            entry.name,
            entry.frames,
            groundtruth.len()
        )));
    }
    let attributes = AttributeSet::parse_codes(entry.attributes.iter().map(String::as_str))?;
    let mut seq = SequenceRecord::new(entry.name.clone(), groundtruth).with_attributes(attributes);
    seq.fps = entry.fps;
    if let (Some(w), Some(h)) = (entry.width, entry.height) {
        seq = seq.with_image_size(w, h);
    }
    let frames = match (&entry.frame_paths, &entry.frames_dir) {
        (Some(paths), _) => Some(
            paths
                .iter()
                .map(|p| path_string(&base.join(p)))
                .collect::<Vec<_>>(),
        ),
        (None, Some(dir)) => Some(
            list_frames(&base.join(dir))?
                .iter()
                .map(|p| path_string(p))
                .collect(),
        ),
        (None, None) => None,
    };
    if let Some(frames) = frames {
        seq = seq
            .with_frame_paths(frames)
            .map_err(|e| Error::Config(format!("{}: frame list: {e}", entry.name)))?;
    }
    Ok(seq)
}

/// Loads every sequence of a manifest, in manifest order.
pub fn load_dataset(manifest: &Path) -> Result<Vec<SequenceRecord>> {
    let text = read_text(manifest)?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: manifest.to_path_buf(),
        source,
    })?;
    if entries.is_empty() {
        return Err(Error::Config(format!("{}: empty manifest", manifest.display())));
    }
    let mut names: Vec<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("duplicate sequence name `{}`", w[0])));
    }
    let base = std::path::absolute(manifest.parent().unwrap_or(Path::new(".")))
        .at(manifest)?;
    entries.par_iter().map(|e| load_entry(&base, e)).collect()
}

/// Writes ground truth files and a manifest for `dataset` under `dir`.
/// Frame paths, when present, are recorded explicitly.
pub fn write_dataset(dir: &Path, dataset: &[SequenceRecord]) -> Result<PathBuf> {
    let mut entries = Vec::with_capacity(dataset.len());
    for seq in dataset {
        let rel = format!("{}/groundtruth.txt", seq.name);
        write_text(&dir.join(&rel), &seq.groundtruth.to_text())?;
        entries.push(ManifestEntry {
            name: seq.name.clone(),
            fps: seq.fps,
            attributes: seq.attributes.iter().map(|a| a.code().to_string()).collect(),
            frames: seq.len(),
            groundtruth_path: rel,
            frames_dir: None,
            frame_paths: seq.frame_paths.clone(),
            width: seq.image_size.map(|s| s.0),
            height: seq.image_size.map(|s| s.1),
        });
    }
    let path = dir.join("sequences.json");
    write_json(&path, &entries)?;
    Ok(path)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}
