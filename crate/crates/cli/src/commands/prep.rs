//! `flyover prep`: letterbox removal with intrinsics adjustment, drop-list
//! filtering, camera-speed normalization and stride selection.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use flyover_core::sequence::{
    crop_map, crop_rgb, detect_letterbox, normalize_speed, scale_normalize, scene_scale,
};
use flyover_core::{io, DisparityMap, Error, Mask, Trajectory, TrajectoryEntry};

use super::{disparity_path, frame_path, CliError};
use crate::config::{pick, FileConfig};

#[derive(Args, Debug)]
pub struct PrepArgs {
    /// Directory holding frame_%05d.png (and optionally disparity_%05d.pfm
    /// for scene-scale normalization).
    #[arg(long)]
    pub frames: PathBuf,
    /// Trajectory file with one entry per input frame.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Target camera speed band, scene units per step.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    pub target: Vec<f64>,
    /// Newline-separated frame ids to drop (pre-computed filtering).
    #[arg(long)]
    pub drop_list: Option<PathBuf>,
    /// Max luma (0-1) for a row/column to count as letterbox.
    #[arg(long, default_value_t = 16.0 / 255.0)]
    pub luma_threshold: f64,
    /// Bands thinner than this stay uncropped.
    #[arg(long, default_value_t = 4)]
    pub min_band: usize,
    /// Random seed for the stride choice.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct PrepSummary {
    crop: [usize; 4],
    normalizer: f64,
    valid_strides: Vec<usize>,
    stride: usize,
    frames_written: usize,
}

pub fn run(args: PrepArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    if args.target.len() != 2 {
        return Err(CliError::Args("--target needs two values: LO HI".into()));
    }
    let (lo, hi) = (args.target[0], args.target[1]);
    let seed = pick(&args.seed, &file.seed, 0);

    let first = io::read_rgb_png(&frame_path(&args.frames, 0))?;
    let (h, w, _) = first.dim();
    let traj = io::read_trajectory(&args.trajectory, w, h)?;

    // Letterbox geometry from the first frame, applied to the whole clip.
    let (rect, _) = detect_letterbox(
        &first,
        &traj.entries()[0].intrinsics,
        args.luma_threshold,
        args.min_band,
    )?;

    // Drop-list filtering.
    let drop: Vec<i64> = match &args.drop_list {
        None => Vec::new(),
        Some(path) => fs::read_to_string(path)
            .map_err(Error::from)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse()
                    .map_err(|e| CliError::Args(format!("bad drop-list entry '{l}': {e}")))
            })
            .collect::<Result<_, _>>()?,
    };

    let kept: Vec<(usize, TrajectoryEntry)> = traj
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, e)| !drop.contains(&e.frame_id))
        .map(|(i, e)| {
            let adjusted = e
                .intrinsics
                .cropped(rect.x0, rect.y0, rect.width(), rect.height())?;
            Ok::<_, Error>((i, TrajectoryEntry {
                frame_id: e.frame_id,
                intrinsics: adjusted,
                pose: e.pose,
            }))
        })
        .collect::<Result<_, _>>()?;
    let kept_traj = Trajectory::new(kept.iter().map(|(_, e)| e.clone()).collect())?;

    // Scene-scale normalization from the first kept frame's disparity, when
    // provided; otherwise speeds stay in raw trajectory units.
    let first_idx = kept[0].0;
    let dpath = disparity_path(&args.frames, first_idx);
    let normalizer = if dpath.exists() {
        let d = io::read_pfm(&dpath)?;
        let cropped = crop_map(&d, &rect);
        let mask = Mask {
            data: cropped.mapv(|v| (v > 0.0) as u8),
        };
        let cropped = DisparityMap::new(cropped.mapv(|v| v.max(0.0)))?;
        scene_scale(&cropped, &mask)?
    } else {
        1.0
    };
    let normalized = scale_normalize(&kept_traj, normalizer)?;

    let valid = normalize_speed(&normalized, lo, hi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stride = valid[rng.random_range(0..valid.len())];

    // Write the subsampled, cropped sequence and its trajectory.
    fs::create_dir_all(&args.out).map_err(Error::from)?;
    let mut written = 0usize;
    let mut out_entries = Vec::new();
    for (j, (src_idx, entry)) in kept.iter().enumerate().step_by(stride) {
        let _ = j;
        let rgb = io::read_rgb_png(&frame_path(&args.frames, *src_idx))?;
        if rgb.dim() != (h, w, 3) {
            return Err(CliError::Data(Error::DimensionMismatch(format!(
                "frame {src_idx} is {:?}, expected {h}x{w}",
                rgb.dim()
            ))));
        }
        io::write_rgb_png(&frame_path(&args.out, written), &crop_rgb(&rgb, &rect))?;
        let dp = disparity_path(&args.frames, *src_idx);
        if dp.exists() {
            let d = io::read_pfm(&dp)?;
            io::write_pfm(&disparity_path(&args.out, written), &crop_map(&d, &rect))?;
        }
        out_entries.push(entry.clone());
        written += 1;
    }
    io::write_trajectory(&args.out.join("trajectory_out.txt"), &Trajectory::new(out_entries)?)?;

    let summary = PrepSummary {
        crop: [rect.x0, rect.y0, rect.x1, rect.y1],
        normalizer,
        valid_strides: valid,
        stride,
        frames_written: written,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Format(e.to_string()))?;
    fs::write(args.out.join("prep.json"), json).map_err(Error::from)?;
    Ok(())
}
