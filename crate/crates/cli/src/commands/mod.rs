//! Shared plumbing for the subcommands: error-to-exit-code mapping, frame
//! file naming, and frame directory loading.

pub mod align;
pub mod fly;
pub mod interp;
pub mod metrics;
pub mod prep;

use std::path::{Path, PathBuf};

use flyover_core::{io, DisparityMap, Error, Frame, Intrinsics, Mask, Pose};
use ndarray::Array3;

/// CLI failure classes; exit codes 2 (arguments), 3 (mid-sequence abort,
/// partial output retained) and 4 (data errors, named on stderr).
#[derive(Debug)]
pub enum CliError {
    Args(String),
    Aborted { step: usize, error: Error },
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

pub fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("frame_{index:05}.png"))
}

pub fn disparity_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("disparity_{index:05}.pfm"))
}

pub fn mask_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("mask_{index:05}.png"))
}

/// Build a frame from an rgb image and disparity map: pixels with
/// non-positive disparity are masked out (and zeroed to keep the frame
/// invariants), everything else is valid.
pub fn frame_from_parts(
    mut rgb: Array3<f64>,
    disparity: ndarray::Array2<f64>,
    pose: Pose,
    intrinsics: Intrinsics,
) -> Result<Frame, CliError> {
    let (h, w) = disparity.dim();
    if rgb.dim() != (h, w, 3) {
        return Err(CliError::Data(Error::DimensionMismatch(format!(
            "image is {:?} but disparity is {h}x{w}",
            rgb.dim()
        ))));
    }
    let mut mask = Mask::ones(h, w);
    let mut disparity = disparity;
    for ((y, x), d) in disparity.indexed_iter_mut() {
        if !(*d > 0.0) {
            *d = 0.0;
            mask.data[[y, x]] = 0;
            for c in 0..3 {
                rgb[[y, x, c]] = 0.0;
            }
        }
    }
    Frame::new(rgb, DisparityMap::new(disparity)?, mask, pose, intrinsics).map_err(CliError::Data)
}

/// Load `frame_%05d.png` + `disparity_%05d.pfm` (+ optional `mask_%05d.png`)
/// for indices 0.. until the files stop existing.
pub fn load_frame_dir(
    dir: &Path,
    poses: &[(Pose, Intrinsics)],
) -> Result<Vec<Frame>, CliError> {
    let mut frames = Vec::new();
    for (i, (pose, k)) in poses.iter().enumerate() {
        let fp = frame_path(dir, i);
        if !fp.exists() {
            break;
        }
        let rgb = io::read_rgb_png(&fp)?;
        let disparity = io::read_pfm(&disparity_path(dir, i))?;
        let mut frame = frame_from_parts(rgb, disparity, *pose, k.clone())?;
        let mp = mask_path(dir, i);
        if mp.exists() {
            let mask = io::read_mask_png(&mp)?;
            // Intersect with the loaded mask, zeroing newly masked pixels.
            for ((y, x), &m) in mask.data.indexed_iter() {
                if m == 0 {
                    frame.mask.data[[y, x]] = 0;
                    frame.disparity.data[[y, x]] = 0.0;
                    for c in 0..3 {
                        frame.rgb[[y, x, c]] = 0.0;
                    }
                }
            }
        }
        frames.push(frame);
    }
    if frames.is_empty() {
        return Err(CliError::Args(format!(
            "no frame_00000.png found under {}",
            dir.display()
        )));
    }
    Ok(frames)
}

/// Write one frame's image, disparity and mask files.
pub fn write_frame(dir: &Path, index: usize, frame: &Frame) -> Result<(), CliError> {
    io::write_rgb_png(&frame_path(dir, index), &frame.rgb)?;
    io::write_pfm(&disparity_path(dir, index), &frame.disparity.data)?;
    io::write_mask_png(&mask_path(dir, index), &frame.mask)?;
    Ok(())
}

/// Parse a `HxW` size like `160x256`.
pub fn parse_size(s: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = s.split('x').collect();
    if parts.len() != 2 {
        return Err(CliError::Args(format!("bad size '{s}', expected HxW")));
    }
    let h = parts[0].parse().map_err(|_| CliError::Args(format!("bad size '{s}'")))?;
    let w = parts[1].parse().map_err(|_| CliError::Args(format!("bad size '{s}'")))?;
    Ok((h, w))
}

/// Bilinearly resize rgb + disparity and rescale the intrinsics to match.
pub fn resize_frame(frame: &Frame, height: usize, width: usize) -> Result<Frame, CliError> {
    let (h0, w0) = (frame.height(), frame.width());
    let sy = h0 as f64 / height as f64;
    let sx = w0 as f64 / width as f64;
    let map_coord = |y: usize, x: usize| -> (f64, f64) {
        (
            ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (h0 - 1) as f64),
            ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (w0 - 1) as f64),
        )
    };
    let mut rgb = Array3::<f64>::zeros((height, width, 3));
    let mut disparity = ndarray::Array2::<f64>::zeros((height, width));
    for y in 0..height {
        for x in 0..width {
            let (sy, sx) = map_coord(y, x);
            for c in 0..3 {
                let plane = frame.rgb.index_axis(ndarray::Axis(2), c);
                rgb[[y, x, c]] = bilinear(&plane.to_owned(), sx, sy);
            }
            disparity[[y, x]] = bilinear(&frame.disparity.data, sx, sy);
        }
    }
    let k = &frame.intrinsics;
    let intrinsics = Intrinsics::new(
        k.fx * width as f64 / w0 as f64,
        k.fy * height as f64 / h0 as f64,
        k.cx * width as f64 / w0 as f64,
        k.cy * height as f64 / h0 as f64,
        width,
        height,
    )?;
    frame_from_parts(rgb, disparity, frame.pose, intrinsics)
}

fn bilinear(map: &ndarray::Array2<f64>, u: f64, v: f64) -> f64 {
    let (h, w) = map.dim();
    let x0 = (u.floor() as usize).min(w - 1);
    let y0 = (v.floor() as usize).min(h - 1);
    let x1 = (x0 + 1).min(w - 1);
    let y1 = (y0 + 1).min(h - 1);
    let fx = u - x0 as f64;
    let fy = v - y0 as f64;
    let top = map[[y0, x0]] * (1.0 - fx) + map[[y0, x1]] * fx;
    let bot = map[[y1, x0]] * (1.0 - fx) + map[[y1, x1]] * fx;
    top * (1.0 - fy) + bot * fy
}
