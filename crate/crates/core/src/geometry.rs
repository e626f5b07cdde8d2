//! Pinhole camera math: poses, intrinsics, unprojection/projection setup and
//! pose interpolation. Everything here is a pure function over immutable
//! values.
//!
//! Conventions, fixed once for the whole crate:
//! - Poses are world-to-camera: a world point `p` maps to camera coordinates
//!   `R * p + t`.
//! - The camera looks down +z in its own frame; image x grows right, image y
//!   grows down.
//! - Pixel coordinates are continuous with pixel centers at integer
//!   coordinates, so an `W x H` image spans `[-0.5, W-0.5] x [-0.5, H-0.5]`.
//! - World up is +y.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthonormality / determinant tolerance for accepting a rotation matrix.
pub const ROTATION_TOL: f64 = 1e-9;

/// Pinhole calibration in pixel units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Intrinsics {
    /// Width/height must be at least 3 so that a Sobel window always fits.
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !(fx > 0.0) || !(fy > 0.0) {
            return Err(Error::InvalidInput(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !cx.is_finite() || !cy.is_finite() {
            return Err(Error::InvalidInput("principal point must be finite".into()));
        }
        if width < 3 || height < 3 {
            return Err(Error::InvalidInput(format!(
                "image dimensions must be at least 3x3, got {width}x{height}"
            )));
        }
        Ok(Intrinsics { fx, fy, cx, cy, width, height })
    }

    /// True if `(u, v)` lies within the pixel-center grid `[0, W-1] x [0, H-1]`.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && u <= (self.width - 1) as f64 && v >= 0.0 && v <= (self.height - 1) as f64
    }

    /// Intrinsics for the crop whose top-left corner is `(x0, y0)`.
    pub fn cropped(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        Intrinsics::new(self.fx, self.fy, self.cx - x0 as f64, self.cy - y0 as f64, width, height)
    }
}

/// World-to-camera rigid transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    /// Validates that `rotation` is orthonormal with determinant +1 within
    /// [`ROTATION_TOL`].
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self> {
        let rtr = rotation.transpose() * rotation;
        let ortho_err = (rtr - Matrix3::identity()).abs().max();
        if ortho_err > ROTATION_TOL {
            return Err(Error::InvalidInput(format!(
                "rotation is not orthonormal (max |R'R - I| = {ortho_err:.3e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > ROTATION_TOL {
            return Err(Error::InvalidInput(format!(
                "rotation determinant is {det}, expected +1"
            )));
        }
        if !translation.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidInput("translation must be finite".into()));
        }
        Ok(Pose { rotation, translation })
    }

    pub fn identity() -> Self {
        Pose { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    /// Camera at `center` looking along the unit-ish direction `look`, with
    /// world up +y. Fails when `look` is (near) parallel to up.
    pub fn look_at(center: Vector3<f64>, look: Vector3<f64>) -> Result<Self> {
        let forward = normalize_checked(look)?;
        let up = Vector3::new(0.0, 1.0, 0.0);
        // Camera axes in world coordinates: x = right, y = down, z = forward.
        let right = forward.cross(&up);
        let norm = right.norm();
        if norm < 1e-12 {
            return Err(Error::DegenerateRotation);
        }
        let right = right / norm;
        let down = forward.cross(&right);
        let rotation = Matrix3::from_rows(&[
            right.transpose(),
            down.transpose(),
            forward.transpose(),
        ]);
        let translation = -(rotation * center);
        Ok(Pose { rotation, translation })
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Map a world point into camera coordinates.
    pub fn transform(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Camera center in world coordinates, `-R' t`.
    pub fn camera_center(&self) -> Vector3<f64> {
        -(self.rotation.transpose() * self.translation)
    }

    /// Viewing direction (camera +z axis) in world coordinates.
    pub fn look_dir(&self) -> Vector3<f64> {
        self.rotation.row(2).transpose()
    }

    /// Bitwise identity check; used to take exact fast paths.
    pub fn is_identity(&self) -> bool {
        self.rotation == Matrix3::identity() && self.translation == Vector3::zeros()
    }
}

/// Unproject pixel `(u, v)` with disparity `d` into the camera frame:
/// `(x, y, z) = K^-1 (u, v, 1) / d`, so `z = 1/d`.
pub fn unproject(k: &Intrinsics, u: f64, v: f64, d: f64) -> Result<Vector3<f64>> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDisparity(d));
    }
    Ok(Vector3::new((u - k.cx) / k.fx / d, (v - k.cy) / k.fy / d, 1.0 / d))
}

/// Project a camera-frame point to pixel coordinates, returning `(u, v, depth)`.
pub fn project(k: &Intrinsics, p: &Vector3<f64>) -> Result<(f64, f64, f64)> {
    if !(p.z > 0.0) {
        return Err(Error::BehindCamera(p.z));
    }
    Ok((k.fx * (p.x / p.z) + k.cx, k.fy * (p.y / p.z) + k.cy, p.z))
}

/// Transform mapping src-camera coordinates into dst-camera coordinates:
/// `rel = P_dst . P_src^-1`. Equal inputs short-circuit to the exact
/// identity so that same-pose rendering stays bit-exact.
pub fn relative_transform(src: &Pose, dst: &Pose) -> Pose {
    if src == dst {
        return Pose::identity();
    }
    let rotation = dst.rotation * src.rotation.transpose();
    let translation = dst.translation - rotation * src.translation;
    Pose { rotation, translation }
}

/// Interpolate camera center linearly and look direction spherically, then
/// rebuild the rotation from the look direction and world up. Endpoints are
/// returned bitwise. Roll is not carried through interior samples.
pub fn interpolate_pose(a: &Pose, b: &Pose, lambda: f64) -> Result<Pose> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidInput(format!("lambda must be in [0, 1], got {lambda}")));
    }
    if lambda == 0.0 || a == b {
        return Ok(*a);
    }
    if lambda == 1.0 {
        return Ok(*b);
    }
    let center = {
        let ca = a.camera_center();
        let cb = b.camera_center();
        ca + lambda * (cb - ca)
    };
    let look = slerp(&a.look_dir(), &b.look_dir(), lambda)?;
    Pose::look_at(center, look)
}

/// Spherical interpolation between unit vectors. Falls back to normalized
/// lerp for tiny angles; antipodal inputs are an error (the great-circle is
/// ambiguous).
pub fn slerp(a: &Vector3<f64>, b: &Vector3<f64>, t: f64) -> Result<Vector3<f64>> {
    let dot = a.dot(b).clamp(-1.0, 1.0);
    if dot < -1.0 + 1e-12 {
        return Err(Error::DegenerateRotation);
    }
    let theta = dot.acos();
    if theta < 1e-9 {
        return if t < 0.5 { Ok(*a) } else { Ok(*b) };
    }
    let sin_theta = theta.sin();
    let wa = ((1.0 - t) * theta).sin() / sin_theta;
    let wb = (t * theta).sin() / sin_theta;
    normalize_checked(wa * a + wb * b)
}

fn normalize_checked(v: Vector3<f64>) -> Result<Vector3<f64>> {
    let n = v.norm();
    if !(n > 1e-12) || !n.is_finite() {
        return Err(Error::DegenerateLook);
    }
    Ok(v / n)
}

/// One camera sample of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryEntry {
    pub frame_id: i64,
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

/// Ordered, non-empty camera path with strictly increasing frame ids.
#[derive(Debug, Clone)]
pub struct Trajectory {
    entries: Vec<TrajectoryEntry>,
}

impl Trajectory {
    pub fn new(entries: Vec<TrajectoryEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("trajectory must be non-empty".into()));
        }
        for pair in entries.windows(2) {
            if pair[1].frame_id <= pair[0].frame_id {
                return Err(Error::InvalidInput(format!(
                    "frame ids must be strictly increasing, got {} then {}",
                    pair[0].frame_id, pair[1].frame_id
                )));
            }
        }
        Ok(Trajectory { entries })
    }

    pub fn entries(&self) -> &[TrajectoryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Keep every `stride`-th entry starting from the first.
    pub fn subsampled(&self, stride: usize) -> Result<Trajectory> {
        if stride == 0 {
            return Err(Error::InvalidInput("stride must be at least 1".into()));
        }
        Trajectory::new(self.entries.iter().step_by(stride).cloned().collect())
    }

    /// Drop the listed frame ids.
    pub fn without_frames(&self, drop: &[i64]) -> Result<Trajectory> {
        Trajectory::new(
            self.entries.iter().filter(|e| !drop.contains(&e.frame_id)).cloned().collect(),
        )
    }
}
