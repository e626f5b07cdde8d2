//! `flyover interp`: insert geometry-aware in-between frames into a rendered
//! sequence, writing a renumbered sequence with originals preserved.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use flyover_core::engine::interpolate_frames;
use flyover_core::{io, InpaintConfig, RendererConfig};

use super::{load_frame_dir, write_frame, CliError};
use crate::config::{pick, FileConfig};

#[derive(Args, Debug)]
pub struct InterpArgs {
    /// Directory holding frame_%05d.png and disparity_%05d.pfm.
    #[arg(long)]
    pub frames: PathBuf,
    /// Trajectory file with one entry per input frame.
    #[arg(long)]
    pub trajectory: PathBuf,
    /// In-betweens per adjacent pair.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: InterpArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let n = pick(&args.n, &file.n, 4);
    let alpha = pick(&args.alpha, &file.alpha, 0.3);

    // Image dimensions come from the first frame file.
    let probe = io::read_rgb_png(&super::frame_path(&args.frames, 0))?;
    let (h, w, _) = probe.dim();
    let traj = io::read_trajectory(&args.trajectory, w, h)?;
    let poses: Vec<_> = traj
        .entries()
        .iter()
        .map(|e| (e.pose, e.intrinsics.clone()))
        .collect();
    let frames = load_frame_dir(&args.frames, &poses)?;
    if frames.len() < 2 {
        return Err(CliError::Args(format!(
            "need at least 2 frames to interpolate, found {}",
            frames.len()
        )));
    }
    if frames.len() > poses.len() {
        return Err(CliError::Args("trajectory has fewer entries than frames".into()));
    }

    let rcfg = RendererConfig { alpha, ..Default::default() };
    let icfg = InpaintConfig::default();
    fs::create_dir_all(&args.out).map_err(flyover_core::Error::from)?;
    let mut index = 0usize;
    for pair in frames.windows(2) {
        write_frame(&args.out, index, &pair[0])?;
        index += 1;
        for mid in interpolate_frames(&pair[0], &pair[1], n, &rcfg, &icfg)? {
            write_frame(&args.out, index, &mid)?;
            index += 1;
        }
    }
    write_frame(&args.out, index, frames.last().unwrap())?;
    Ok(())
}
