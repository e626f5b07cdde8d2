//! `flyover fly`: run the render-refine-repeat loop from one image+disparity
//! pair along a scripted trajectory or under autopilot control.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flyover_core::engine::{generate_with, EngineConfig, PoseSource};
use flyover_core::refine::{External, Inpaint, Passthrough, Refiner, ScaleDisparity};
use flyover_core::{
    io, AutopilotConfig, AutopilotState, Intrinsics, MeanderConfig, Pose, RendererConfig,
    Trajectory, TrajectoryEntry,
};

use super::{frame_from_parts, parse_size, resize_frame, write_frame, CliError};
use crate::config::{pick, pick_opt, FileConfig};

#[derive(Args, Debug)]
pub struct FlyArgs {
    /// Input RGB image (PNG).
    #[arg(long)]
    pub image: PathBuf,
    /// Input disparity map (PFM).
    #[arg(long)]
    pub disparity: PathBuf,
    /// Camera trajectory file; mutually exclusive with --autopilot.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    /// Drive the camera with the autopilot controller.
    #[arg(long)]
    pub autopilot: bool,
    /// Intrinsics JSON {fx, fy, cx, cy, width, height} in pixels (autopilot
    /// runs; scripted runs take intrinsics from the trajectory file).
    #[arg(long)]
    pub intrinsics: Option<PathBuf>,
    /// Assume this horizontal field of view in degrees when no intrinsics
    /// are supplied.
    #[arg(long)]
    pub fov: Option<f64>,
    /// Number of generation steps T (T+1 frames are written).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Refiner: passthrough | inpaint | scale:<factor> | external:<command>.
    #[arg(long)]
    pub refiner: Option<String>,
    /// Disable geometric grounding of the refined disparity.
    #[arg(long)]
    pub no_grounding: bool,
    /// Disparity-gradient threshold for the discontinuity mask.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Resize inputs to HxW before generation (160x256 when given bare).
    #[arg(long, num_args = 0..=1, default_missing_value = "160x256")]
    pub resize: Option<String>,
    /// Random seed (meander phase).
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON config merged under the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    // Autopilot knobs.
    #[arg(long)]
    pub sky_threshold: Option<f64>,
    #[arg(long)]
    pub near_threshold: Option<f64>,
    #[arg(long)]
    pub target_sky_fraction: Option<f64>,
    #[arg(long)]
    pub near_fraction_limit: Option<f64>,
    #[arg(long)]
    pub smoothing: Option<f64>,
    #[arg(long)]
    pub step_distance: Option<f64>,
    /// Add a sinusoidal horizontal meander to the look direction.
    #[arg(long)]
    pub meander: bool,
    #[arg(long)]
    pub meander_amplitude: Option<f64>,
    #[arg(long)]
    pub meander_period: Option<f64>,
}

pub fn parse_refiner(spec: &str) -> Result<Box<dyn Refiner>, CliError> {
    if spec == "passthrough" {
        return Ok(Box::new(Passthrough));
    }
    if spec == "inpaint" {
        return Ok(Box::new(Inpaint::default()));
    }
    if let Some(factor) = spec.strip_prefix("scale:") {
        let factor: f64 = factor
            .parse()
            .map_err(|_| CliError::Args(format!("bad scale factor in '{spec}'")))?;
        return Ok(Box::new(ScaleDisparity { factor }));
    }
    if let Some(cmd) = spec.strip_prefix("external:") {
        let command: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
        if command.is_empty() {
            return Err(CliError::Args("external refiner command is empty".into()));
        }
        return Ok(Box::new(External::new(command)));
    }
    Err(CliError::Args(format!(
        "unknown refiner '{spec}' (expected passthrough | inpaint | scale:<f> | external:<cmd>)"
    )))
}

fn intrinsics_from_fov(fov_deg: f64, width: usize, height: usize) -> Result<Intrinsics, CliError> {
    if !(fov_deg > 0.0 && fov_deg < 180.0) {
        return Err(CliError::Args(format!("fov must be in (0, 180), got {fov_deg}")));
    }
    let f = 0.5 * width as f64 / (fov_deg.to_radians() / 2.0).tan();
    Ok(Intrinsics::new(
        f,
        f,
        (width as f64 - 1.0) / 2.0,
        (height as f64 - 1.0) / 2.0,
        width,
        height,
    )?)
}

pub fn run(args: FlyArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    if args.trajectory.is_some() == args.autopilot {
        return Err(CliError::Args(
            "exactly one of --trajectory and --autopilot is required".into(),
        ));
    }
    let steps = pick(&args.steps, &file.steps, 0);
    let refiner_spec = pick(&args.refiner, &file.refiner, "inpaint".to_string());
    let refiner = parse_refiner(&refiner_spec)?;
    let grounding = if args.no_grounding { false } else { pick(&None, &file.grounding, true) };
    let alpha = pick(&args.alpha, &file.alpha, 0.3);
    let seed = pick(&args.seed, &file.seed, 0);

    let rgb = io::read_rgb_png(&args.image)?;
    let disparity = io::read_pfm(&args.disparity)?;
    let (h, w, _) = rgb.dim();

    // Intrinsics and starting pose.
    let (pose0, intrinsics, trajectory) = if let Some(tpath) = &args.trajectory {
        let traj = io::read_trajectory(tpath, w, h)?;
        let first = &traj.entries()[0];
        (first.pose, first.intrinsics.clone(), Some(traj))
    } else {
        let k = match &args.intrinsics {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(flyover_core::Error::from)?;
                let k: Intrinsics = serde_json::from_str(&text)
                    .map_err(|e| CliError::Args(format!("bad intrinsics json: {e}")))?;
                Intrinsics::new(k.fx, k.fy, k.cx, k.cy, k.width, k.height)?
            }
            None => {
                let fov = pick(&args.fov, &file.fov, 90.0);
                intrinsics_from_fov(fov, w, h)?
            }
        };
        (Pose::identity(), k, None)
    };
    if intrinsics.width != w || intrinsics.height != h {
        return Err(CliError::Args(format!(
            "intrinsics are {}x{} but the image is {w}x{h}",
            intrinsics.width, intrinsics.height
        )));
    }

    let mut frame0 = frame_from_parts(rgb, disparity, pose0, intrinsics)?;
    if let Some(size) = pick_opt(&args.resize, &file.resize) {
        let (rh, rw) = parse_size(&size)?;
        frame0 = resize_frame(&frame0, rh, rw)?;
    }

    let engine_cfg = EngineConfig {
        grounding_enabled: grounding,
        renderer: RendererConfig { alpha, ..Default::default() },
        steps,
    };

    let pose_source = if let Some(traj) = &trajectory {
        PoseSource::Scripted(traj)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let meander = if args.meander || file.meander.unwrap_or(false) {
            Some(MeanderConfig {
                amplitude: pick(&args.meander_amplitude, &file.meander_amplitude, 0.3),
                period: pick(&args.meander_period, &file.meander_period, 200.0),
                phase: rng.random_range(0.0..std::f64::consts::TAU),
            })
        } else {
            None
        };
        let config = AutopilotConfig {
            sky_threshold: pick(&args.sky_threshold, &file.sky_threshold, 0.05),
            near_threshold: pick(&args.near_threshold, &file.near_threshold, 0.5),
            target_sky_fraction: pick(&args.target_sky_fraction, &file.target_sky_fraction, 0.30),
            near_fraction_limit: pick(&args.near_fraction_limit, &file.near_fraction_limit, 0.20),
            smoothing: pick(&args.smoothing, &file.smoothing, 0.05),
            step_distance: pick(&args.step_distance, &file.step_distance, 0.1),
            meander,
        };
        config.validate().map_err(|e| CliError::Args(e.to_string()))?;
        let state = AutopilotState::from_pose(&frame0.pose);
        PoseSource::Autopilot { config, state }
    };

    fs::create_dir_all(&args.out).map_err(flyover_core::Error::from)?;
    let mut realized: Vec<TrajectoryEntry> = Vec::with_capacity(steps + 1);
    let mut diag_rows = Vec::with_capacity(steps);
    let out_dir = args.out.clone();
    let seq = generate_with(
        frame0,
        pose_source,
        &engine_cfg,
        refiner.as_ref(),
        false,
        |index, frame, diag| {
            write_frame(&out_dir, index, frame).map_err(|e| match e {
                CliError::Data(err) => err,
                other => flyover_core::Error::InvalidInput(format!("{other:?}")),
            })?;
            realized.push(TrajectoryEntry {
                frame_id: index as i64,
                intrinsics: frame.intrinsics.clone(),
                pose: frame.pose,
            });
            if let Some(d) = diag {
                diag_rows.push((d.step, d.gamma, d.fill_fraction));
            }
            Ok(())
        },
    )?;

    let mut csv = String::from("step,gamma,fill_fraction\n");
    for (step, gamma, fill) in &diag_rows {
        csv.push_str(&format!("{step},{gamma},{fill}\n"));
    }
    let mut f = fs::File::create(args.out.join("diagnostics.csv"))
        .map_err(flyover_core::Error::from)?;
    f.write_all(csv.as_bytes()).map_err(flyover_core::Error::from)?;

    io::write_trajectory(
        &args.out.join("trajectory_out.txt"),
        &Trajectory::new(realized).map_err(CliError::Data)?,
    )?;

    if let Some(abort) = seq.abort {
        return Err(CliError::Aborted { step: abort.step, error: abort.error });
    }
    Ok(())
}
