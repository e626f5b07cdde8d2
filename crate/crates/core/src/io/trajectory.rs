//! Camera trajectory text format: one camera per line, 19 whitespace
//! separated fields:
//!
//! ```text
//! frame_id fx fy cx cy 0 0 r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2
//! ```
//!
//! Intrinsics are stored normalized (fx, cx by width; fy, cy by height); the
//! two reserved slots are distortion placeholders and must be zero. The 3x4
//! block is the row-major world-to-camera `[R | t]`.

use std::fs;
use std::path::Path;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{Intrinsics, Pose, Trajectory, TrajectoryEntry};

/// Parse a trajectory file, denormalizing intrinsics with the given image
/// dimensions.
pub fn read_trajectory(path: &Path, width: usize, height: usize) -> Result<Trajectory> {
    let text = fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        entries.push(
            parse_line(line, width, height)
                .map_err(|e| Error::Format(format!("{}:{}: {e}", path.display(), lineno + 1)))?,
        );
    }
    Trajectory::new(entries)
}

fn parse_line(line: &str, width: usize, height: usize) -> Result<TrajectoryEntry> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 19 {
        return Err(Error::Format(format!("expected 19 fields, got {}", fields.len())));
    }
    let frame_id: i64 = fields[0]
        .parse()
        .map_err(|e| Error::Format(format!("bad frame id '{}': {e}", fields[0])))?;
    let mut nums = [0.0f64; 18];
    for (i, f) in fields[1..].iter().enumerate() {
        nums[i] = f
            .parse()
            .map_err(|e| Error::Format(format!("bad number '{f}': {e}")))?;
    }
    if nums[4] != 0.0 || nums[5] != 0.0 {
        return Err(Error::Format(
            "reserved distortion fields must be zero (lens distortion is unsupported)".into(),
        ));
    }
    let intrinsics = Intrinsics::new(
        nums[0] * width as f64,
        nums[1] * height as f64,
        nums[2] * width as f64,
        nums[3] * height as f64,
        width,
        height,
    )?;
    let m = &nums[6..18];
    let rotation = Matrix3::new(m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10]);
    let translation = Vector3::new(m[3], m[7], m[11]);
    let pose = Pose::new(rotation, translation)
        .map_err(|e| Error::Format(format!("bad pose: {e}")))?;
    Ok(TrajectoryEntry { frame_id, intrinsics, pose })
}

/// Write a trajectory, normalizing intrinsics by each entry's dimensions.
/// Floats use the shortest round-trippable representation.
pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::new();
    for e in traj.entries() {
        let k = &e.intrinsics;
        let (w, h) = (k.width as f64, k.height as f64);
        let r = e.pose.rotation();
        let t = e.pose.translation();
        let fields: Vec<String> = [
            k.fx / w,
            k.fy / h,
            k.cx / w,
            k.cy / h,
            0.0,
            0.0,
            r[(0, 0)],
            r[(0, 1)],
            r[(0, 2)],
            t[0],
            r[(1, 0)],
            r[(1, 1)],
            r[(1, 2)],
            t[1],
            r[(2, 0)],
            r[(2, 1)],
            r[(2, 2)],
            t[2],
        ]
        .iter()
        .map(|v| format!("{v}"))
        .collect();
        out.push_str(&format!("{} {}\n", e.frame_id, fields.join(" ")));
    }
    fs::write(path, out)?;
    Ok(())
}
