//! `flyover align`: fit scale/shift of a raw disparity map against sparse 3D
//! keypoints and write the aligned map plus the fitted parameters.

use std::fs;
use std::path::PathBuf;

use clap::Args;

use flyover_core::{align, io, KeypointSet};

use super::CliError;

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// Raw disparity map (PFM).
    #[arg(long)]
    pub disparity: PathBuf,
    /// Keypoints JSON {"points": [[x,y,z], ...]}, camera coordinates.
    #[arg(long)]
    pub keypoints: PathBuf,
    /// Intrinsics JSON {fx, fy, cx, cy, width, height} in pixels.
    #[arg(long)]
    pub intrinsics: PathBuf,
    /// Treat keypoints as world coordinates and transform them with the pose
    /// of this frame id from --trajectory.
    #[arg(long, requires = "trajectory")]
    pub world_frame: Option<i64>,
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Output directory (writes aligned.pfm and scale_shift.json).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: AlignArgs) -> Result<(), CliError> {
    let disparity = flyover_core::DisparityMap::new(io::read_pfm(&args.disparity)?)?;
    let text = fs::read_to_string(&args.intrinsics).map_err(flyover_core::Error::from)?;
    let k: flyover_core::Intrinsics = serde_json::from_str(&text)
        .map_err(|e| CliError::Args(format!("bad intrinsics json: {e}")))?;
    let k = flyover_core::Intrinsics::new(k.fx, k.fy, k.cx, k.cy, k.width, k.height)?;
    if (k.height, k.width) != disparity.data.dim() {
        return Err(CliError::Args(format!(
            "intrinsics are {}x{} but the disparity map is {:?}",
            k.width,
            k.height,
            disparity.data.dim()
        )));
    }

    let mut keypoints = io::read_keypoints(&args.keypoints)?;
    if let Some(frame_id) = args.world_frame {
        let tpath = args.trajectory.as_ref().expect("clap enforces requires");
        let traj = io::read_trajectory(tpath, k.width, k.height)?;
        let entry = traj
            .entries()
            .iter()
            .find(|e| e.frame_id == frame_id)
            .ok_or_else(|| CliError::Args(format!("frame id {frame_id} not in trajectory")))?;
        keypoints = KeypointSet::new(
            keypoints.points().iter().map(|p| entry.pose.transform(p)).collect(),
        )?;
    }

    let fitted = align::fit_scale_shift(&disparity, &keypoints, &k)?;
    let aligned = align::apply_scale_shift(&disparity, &fitted);

    fs::create_dir_all(&args.out).map_err(flyover_core::Error::from)?;
    io::write_pfm(&args.out.join("aligned.pfm"), &aligned.data)?;
    let json = serde_json::to_string_pretty(&fitted)
        .map_err(|e| flyover_core::Error::Format(e.to_string()))?;
    fs::write(args.out.join("scale_shift.json"), json).map_err(flyover_core::Error::from)?;
    Ok(())
}
