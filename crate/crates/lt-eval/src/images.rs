//! Pixel work for the staged re-detection sequences.

use std::fs;
use std::path::Path;

use image::{imageops, RgbImage};
use lt_eval_core::generators::{RedetectionPlan, RedetectionSpec};
use lt_eval_core::{Region, SequenceRecord};

use crate::error::{Error, IoContext, Result};
use crate::manifest::write_text;

fn frame_name(t: usize) -> String {
    format!("{:08}.png", t + 1)
}

fn save(img: &RgbImage, path: &Path) -> Result<()> {
    img.save(path).map_err(|source| Error::Image {
        path: path.to_path_buf(),
        source,
    })
}

/// Renders the warm-up and displaced canvases of a plan from the source frame.
pub fn render_redetection(source: &RgbImage, plan: &RedetectionPlan) -> (RgbImage, RgbImage) {
    let mut warmup = RgbImage::new(plan.canvas_width, plan.canvas_height);
    imageops::replace(&mut warmup, source, 0, 0);
    let p = plan.patch_source;
    let patch = imageops::crop_imm(source, p.x, p.y, p.width, p.height).to_image();
    let mut displaced = RgbImage::new(plan.canvas_width, plan.canvas_height);
    imageops::replace(
        &mut displaced,
        &patch,
        plan.patch_origin.0 as i64,
        plan.patch_origin.1 as i64,
    );
    (warmup, displaced)
}

/// Builds the re-detection sequence of `seq` under `dir/<name>_redet/`:
/// PNG frames in `frames/` and `groundtruth.txt`. Returns the new record
/// (frame paths set) and its plan.
pub fn generate_redetection(
    seq: &SequenceRecord,
    spec: RedetectionSpec,
    dir: &Path,
) -> Result<(SequenceRecord, RedetectionPlan)> {
    let first = seq
        .frame_paths
        .as_ref()
        .and_then(|p| p.first())
        .ok_or_else(|| Error::Config(format!("{}: no frame images", seq.name)))?;
    let first = Path::new(first);
    let target = match seq.groundtruth.regions()[0] {
        Region::Box(b) => b,
        Region::Empty => {
            return Err(Error::Config(format!(
                "{}: target not visible in the first frame",
                seq.name
            )))
        }
    };
    let source = image::open(first)
        .map_err(|source| Error::Image {
            path: first.to_path_buf(),
            source,
        })?
        .to_rgb8();
    let plan = RedetectionPlan::new(source.width(), source.height(), target, spec)?;
    let (warmup, displaced) = render_redetection(&source, &plan);

    let name = format!("{}_redet", seq.name);
    let seq_dir = dir.join(&name);
    let frames_dir = seq_dir.join("frames");
    fs::create_dir_all(&frames_dir).at(&frames_dir)?;
    let mut paths = Vec::with_capacity(spec.len());
    for t in 0..spec.len() {
        let path = frames_dir.join(frame_name(t));
        // identical frames are encoded once and copied
        if t == 0 {
            save(&warmup, &path)?;
        } else if t == spec.warmup_frames {
            save(&displaced, &path)?;
        } else {
            let model = if t < spec.warmup_frames { 0 } else { spec.warmup_frames };
            let from = frames_dir.join(frame_name(model));
            fs::copy(&from, &path).at(&path)?;
        }
        paths.push(path.to_string_lossy().into_owned());
    }
    write_text(&seq_dir.join("groundtruth.txt"), &plan.groundtruth.to_text())?;

    let mut record = SequenceRecord::new(name, plan.groundtruth.clone())
        .with_attributes(seq.attributes)
        .with_image_size(plan.canvas_width, plan.canvas_height)
        .with_frame_paths(paths)?;
    record.fps = seq.fps;
    Ok((record, plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;
    use lt_eval_core::BBox;

    #[test]
    fn canvases_place_frame_and_patch() {
        let mut src = RgbImage::from_pixel(10, 8, Rgb([200, 10, 10]));
        src.put_pixel(2, 3, Rgb([1, 2, 3]));
        let target = BBox::new(2.0, 3.0, 4.0, 2.0).unwrap();
        let plan = RedetectionPlan::new(10, 8, target, RedetectionSpec::new(2, 3).unwrap()).unwrap();
        let (warm, disp) = render_redetection(&src, &plan);
        assert_eq!(warm.dimensions(), (30, 24));
        assert_eq!(warm.get_pixel(2, 3), &Rgb([1, 2, 3]));
        assert_eq!(warm.get_pixel(9, 7), &Rgb([200, 10, 10]));
        assert_eq!(warm.get_pixel(10, 8), &Rgb([0, 0, 0]));
        // patch bottom-right corner sits at the canvas corner
        assert_eq!(disp.get_pixel(26, 22), &Rgb([1, 2, 3]));
        assert_eq!(disp.get_pixel(29, 23), &Rgb([200, 10, 10]));
        assert_eq!(disp.get_pixel(25, 23), &Rgb([0, 0, 0]));
        assert_eq!(disp.get_pixel(2, 3), &Rgb([0, 0, 0]));
    }
}
