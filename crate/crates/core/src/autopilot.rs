//! Heuristic view controller: classifies sky and near content from the
//! current disparity and steers smoothed look/move directions, producing the
//! next camera pose online so long flights avoid the ground and obstacles.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Frame, Mask};
use crate::geometry::{slerp, Pose};

/// Proportional gain (radians per unit of fraction error) for the pitch and
/// yaw targets. The pitch target is horizon-referenced, so with a fixed
/// disparity the target is fixed and the smoothed state converges onto it.
const CONTROL_GAIN: f64 = 0.5;

/// Sinusoidal horizontal look offset for meandering trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanderConfig {
    /// Peak yaw offset in radians.
    pub amplitude: f64,
    /// Period in frames.
    pub period: f64,
    /// Phase offset in radians.
    pub phase: f64,
}

impl Default for MeanderConfig {
    fn default() -> Self {
        MeanderConfig { amplitude: 0.3, period: 200.0, phase: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutopilotConfig {
    /// Disparity below this is sky.
    pub sky_threshold: f64,
    /// Disparity above this is near.
    pub near_threshold: f64,
    /// Pitch control aims for this much sky in view.
    pub target_sky_fraction: f64,
    /// Above this near fraction the camera climbs; below half of it, it
    /// descends (a hysteresis band so it does not oscillate).
    pub near_fraction_limit: f64,
    /// Fraction of the angular distance to the targets covered per frame.
    pub smoothing: f64,
    /// Scene units traveled per frame.
    pub step_distance: f64,
    pub meander: Option<MeanderConfig>,
}

impl Default for AutopilotConfig {
    fn default() -> Self {
        AutopilotConfig {
            sky_threshold: 0.05,
            near_threshold: 0.5,
            target_sky_fraction: 0.30,
            near_fraction_limit: 0.20,
            smoothing: 0.05,
            step_distance: 0.1,
            meander: None,
        }
    }
}

impl AutopilotConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sky_threshold > 0.0 && self.sky_threshold < self.near_threshold) {
            return Err(Error::InvalidInput(format!(
                "need 0 < sky_threshold < near_threshold, got {} and {}",
                self.sky_threshold, self.near_threshold
            )));
        }
        for (name, v) in [
            ("target_sky_fraction", self.target_sky_fraction),
            ("near_fraction_limit", self.near_fraction_limit),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidInput(format!("{name} must be in (0, 1), got {v}")));
            }
        }
        if !(self.smoothing > 0.0 && self.smoothing <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "smoothing must be in (0, 1], got {}",
                self.smoothing
            )));
        }
        if !(self.step_distance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "step_distance must be positive, got {}",
                self.step_distance
            )));
        }
        Ok(())
    }
}

/// Sky/near content summary of one disparity map.
#[derive(Debug, Clone)]
pub struct Classification {
    pub sky_fraction: f64,
    pub near_fraction: f64,
    pub sky_mask: Mask,
    pub near_mask: Mask,
}

/// Threshold the disparity into sky (below `sky_threshold`) and near (above
/// `near_threshold`) content; fractions are pixel means.
pub fn classify(d: &DisparityMap, cfg: &AutopilotConfig) -> Classification {
    let sky = d.data.mapv(|v| (v < cfg.sky_threshold) as u8);
    let near = d.data.mapv(|v| (v > cfg.near_threshold) as u8);
    let n = d.data.len() as f64;
    let sky_fraction = sky.iter().map(|&m| m as f64).sum::<f64>() / n;
    let near_fraction = near.iter().map(|&m| m as f64).sum::<f64>() / n;
    Classification {
        sky_fraction,
        near_fraction,
        sky_mask: Mask { data: sky },
        near_mask: Mask { data: near },
    }
}

/// Smoothed controller state threaded through the flight; directions are
/// unit-norm world vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutopilotState {
    look: Vector3<f64>,
    move_dir: Vector3<f64>,
    frame: u64,
}

impl AutopilotState {
    pub fn new(look: Vector3<f64>, move_dir: Vector3<f64>, frame: u64) -> Result<Self> {
        for v in [&look, &move_dir] {
            if (v.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "autopilot directions must be unit-norm, got |v| = {}",
                    v.norm()
                )));
            }
        }
        Ok(AutopilotState { look, move_dir, frame })
    }

    /// Start looking and moving along the camera's current view direction.
    pub fn from_pose(pose: &Pose) -> Self {
        let look = pose.look_dir();
        AutopilotState { look, move_dir: look, frame: 0 }
    }

    pub fn look(&self) -> Vector3<f64> {
        self.look
    }

    pub fn move_dir(&self) -> Vector3<f64> {
        self.move_dir
    }

    pub fn frame(&self) -> u64 {
        self.frame
    }
}

fn pitch_yaw(dir: &Vector3<f64>) -> (f64, f64) {
    (dir.y.clamp(-1.0, 1.0).asin(), dir.x.atan2(dir.z))
}

fn dir_from_pitch_yaw(pitch: f64, yaw: f64) -> Vector3<f64> {
    Vector3::new(pitch.cos() * yaw.sin(), pitch.sin(), pitch.cos() * yaw.cos())
}

/// Apply the three view-control heuristics to the current frame and advance
/// the camera one step:
///
/// 1. pitch toward a horizon-referenced target proportional to the sky error,
/// 2. yaw toward whichever image half holds more sky,
/// 3. climb when too much of the image is near, descend when almost none is,
///    otherwise head for the point 30% down from the top of the image.
///
/// New directions move only `smoothing` of the way to their targets; the
/// returned pose sits `step_distance` along the new move direction.
pub fn next_pose(
    state: &AutopilotState,
    frame: &Frame,
    cfg: &AutopilotConfig,
) -> Result<(AutopilotState, Pose)> {
    let c = classify(&frame.disparity, cfg);
    let (_, yaw) = pitch_yaw(&state.look);

    let pitch_target = -CONTROL_GAIN * (c.sky_fraction - cfg.target_sky_fraction);

    // Sky fraction per image half; +yaw turns the camera left.
    let (h, w) = c.sky_mask.data.dim();
    let half = w / 2;
    let mut left = 0.0;
    let mut right = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = c.sky_mask.data[[y, x]] as f64;
            if x < half {
                left += v;
            } else {
                right += v;
            }
        }
    }
    let left_fraction = left / (h * half) as f64;
    let right_fraction = right / (h * (w - half)) as f64;
    let mut yaw_target = yaw + CONTROL_GAIN * (left_fraction - right_fraction);
    if let Some(m) = &cfg.meander {
        yaw_target += m.amplitude * ((std::f64::consts::TAU * state.frame as f64) / m.period + m.phase).sin();
    }
    let look_target = dir_from_pitch_yaw(pitch_target, yaw_target);

    let move_target = if c.near_fraction > cfg.near_fraction_limit {
        Vector3::new(0.0, 1.0, 0.0)
    } else if c.near_fraction < 0.5 * cfg.near_fraction_limit {
        Vector3::new(0.0, -1.0, 0.0)
    } else {
        let k = &frame.intrinsics;
        let u = 0.5 * (k.width - 1) as f64;
        let v = 0.3 * (k.height - 1) as f64;
        let ray = Vector3::new((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
        let world = frame.pose.rotation().transpose() * ray;
        let n = world.norm();
        if !(n > 1e-12) {
            return Err(Error::DegenerateLook);
        }
        world / n
    };

    let degenerate = |e: Error| match e {
        Error::DegenerateRotation => Error::DegenerateLook,
        other => other,
    };
    let look = slerp(&state.look, &look_target, cfg.smoothing).map_err(degenerate)?;
    let move_dir = slerp(&state.move_dir, &move_target, cfg.smoothing).map_err(degenerate)?;

    let center = frame.pose.camera_center() + cfg.step_distance * move_dir;
    let pose = Pose::look_at(center, look).map_err(degenerate)?;
    let next = AutopilotState { look, move_dir, frame: state.frame + 1 };
    Ok((next, pose))
}
