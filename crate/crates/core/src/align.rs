//! Disparity alignment: fits raw monocular disparity to sparse 3D geometry
//! with a closed-form least-squares scale/shift, and re-grounds refined
//! disparity to the rendered range in log space to keep the generation loop
//! from drifting.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Mask};
use crate::geometry::{project, Intrinsics};

/// Disparity floor applied after affine alignment so downstream unprojection
/// always sees d > 0.
pub const DISPARITY_FLOOR: f64 = 1e-6;

/// Sparse 3D points in the camera coordinates of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct KeypointSet {
    points: Vec<Vector3<f64>>,
}

impl KeypointSet {
    pub fn new(points: Vec<Vector3<f64>>) -> Result<Self> {
        for p in &points {
            if !(p.z > 0.0) || !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "keypoints must be finite with z > 0, got ({}, {}, {})",
                    p.x, p.y, p.z
                )));
            }
        }
        Ok(KeypointSet { points })
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Affine disparity correction `d -> a*d + b`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScaleShift {
    pub a: f64,
    pub b: f64,
}

/// Result of log-space grounding: the fitted scale and the rescaled map.
#[derive(Debug, Clone)]
pub struct GroundingResult {
    pub gamma: f64,
    pub grounded: DisparityMap,
}

/// Fit `argmin_{a,b} sum (a * D(u_i, v_i) + b - 1/z_i)^2` over the keypoints
/// that project in-bounds, sampling the raw disparity bilinearly at each
/// projection. Out-of-bounds projections are dropped, not clamped.
pub fn fit_scale_shift(
    d_raw: &DisparityMap,
    keypoints: &KeypointSet,
    k: &Intrinsics,
) -> Result<ScaleShift> {
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(keypoints.len());
    for p in keypoints.points() {
        let (u, v, z) = project(k, p)?;
        if k.contains(u, v) {
            samples.push((d_raw.sample_bilinear(u, v), 1.0 / z));
        }
    }
    fit_scale_shift_samples(&samples)
}

/// Closed-form least squares over paired (disparity, inverse depth) samples.
pub fn fit_scale_shift_samples(samples: &[(f64, f64)]) -> Result<ScaleShift> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientKeypoints(n));
    }
    let nf = n as f64;
    let mean_x = samples.iter().map(|s| s.0).sum::<f64>() / nf;
    let mean_y = samples.iter().map(|s| s.1).sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in samples {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    // Numerically flat disparity gives no leverage on the scale.
    if sxx <= f64::EPSILON * nf * mean_x.abs().max(1.0).powi(2) {
        return Err(Error::RankDeficient);
    }
    let a = sxy / sxx;
    let b = mean_y - a * mean_x;
    if !(a > 0.0) {
        return Err(Error::NonPositiveScale(a));
    }
    Ok(ScaleShift { a, b })
}

/// Pointwise `a*d + b`, clamped below at [`DISPARITY_FLOOR`].
pub fn apply_scale_shift(d_raw: &DisparityMap, s: &ScaleShift) -> DisparityMap {
    DisparityMap { data: d_raw.data.mapv(|d| (s.a * d + s.b).max(DISPARITY_FLOOR)) }
}

/// Solve `min_gamma || M . (log(gamma * D_refined) - log(D_rendered)) ||^2`.
/// The closed form is `gamma = exp(mean over mask of (log D_rendered - log
/// D_refined))`; the correction is applied to the whole map.
pub fn ground_disparity(
    d_refined: &DisparityMap,
    d_rendered: &DisparityMap,
    mask: &Mask,
) -> Result<GroundingResult> {
    if d_refined.data.dim() != d_rendered.data.dim() || d_refined.data.dim() != mask.data.dim() {
        return Err(Error::DimensionMismatch(format!(
            "grounding inputs disagree: refined {:?}, rendered {:?}, mask {:?}",
            d_refined.data.dim(),
            d_rendered.data.dim(),
            mask.data.dim()
        )));
    }
    let mut sum = 0.0f64;
    let mut count = 0usize;
    for ((idx, &m), &df) in mask.data.indexed_iter().zip(d_refined.data.iter()) {
        if m == 1 {
            let dr = d_rendered.data[idx];
            if !(df > 0.0) {
                return Err(Error::NonPositiveDisparity(df));
            }
            if !(dr > 0.0) {
                return Err(Error::NonPositiveDisparity(dr));
            }
            sum += dr.ln() - df.ln();
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyMask);
    }
    let gamma = (sum / count as f64).exp();
    Ok(GroundingResult { gamma, grounded: DisparityMap { data: d_refined.data.mapv(|d| gamma * d) } })
}
