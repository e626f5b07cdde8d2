//! Dataset-side preprocessing: letterbox removal with intrinsics adjustment,
//! camera-speed normalization via subsampling, and a content-visibility
//! proxy.

use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Frame, Mask};
use crate::geometry::{project, relative_transform, unproject, Intrinsics, Pose, Trajectory};
use ndarray::{Array2, Array3};

/// Half-open pixel crop bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl CropRect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }
}

/// Per-step camera translation magnitudes plus the scene-scale normalizer
/// they were measured under.
#[derive(Debug, Clone)]
pub struct SpeedProfile {
    pub magnitudes: Vec<f64>,
    pub normalizer: f64,
}

/// Find maximal top/bottom letterbox bands (and left/right pillarbox bands)
/// whose per-row (per-column) max luma stays below `luma_threshold`, and
/// return the crop plus intrinsics with the principal point shifted by the
/// crop origin. Bands shorter than `min_band` are kept.
pub fn detect_letterbox(
    rgb: &Array3<f64>,
    intrinsics: &Intrinsics,
    luma_threshold: f64,
    min_band: usize,
) -> Result<(CropRect, Intrinsics)> {
    let (h, w, _) = rgb.dim();
    let luma = |y: usize, x: usize| -> f64 {
        0.299 * rgb[[y, x, 0]] + 0.587 * rgb[[y, x, 1]] + 0.114 * rgb[[y, x, 2]]
    };
    let row_dark =
        |y: usize| -> bool { (0..w).all(|x| luma(y, x) < luma_threshold) };

    let mut y0 = 0;
    while y0 < h && row_dark(y0) {
        y0 += 1;
    }
    if y0 == h {
        return Err(Error::FullyBlack);
    }
    let mut y1 = h;
    while y1 > y0 && row_dark(y1 - 1) {
        y1 -= 1;
    }
    if y0 < min_band {
        y0 = 0;
    }
    if h - y1 < min_band {
        y1 = h;
    }

    // Pillarboxes are judged on the rows that survive.
    let col_dark = |x: usize| -> bool { (y0..y1).all(|y| luma(y, x) < luma_threshold) };
    let mut x0 = 0;
    while x0 < w && col_dark(x0) {
        x0 += 1;
    }
    if x0 == w {
        return Err(Error::FullyBlack);
    }
    let mut x1 = w;
    while x1 > x0 && col_dark(x1 - 1) {
        x1 -= 1;
    }
    if x0 < min_band {
        x0 = 0;
    }
    if w - x1 < min_band {
        x1 = w;
    }

    let rect = CropRect { x0, y0, x1, y1 };
    let adjusted = intrinsics.cropped(x0, y0, rect.width(), rect.height())?;
    Ok((rect, adjusted))
}

pub fn crop_rgb(rgb: &Array3<f64>, rect: &CropRect) -> Array3<f64> {
    Array3::from_shape_fn((rect.height(), rect.width(), 3), |(y, x, c)| {
        rgb[[rect.y0 + y, rect.x0 + x, c]]
    })
}

pub fn crop_map(map: &Array2<f64>, rect: &CropRect) -> Array2<f64> {
    Array2::from_shape_fn((rect.height(), rect.width()), |(y, x)| {
        map[[rect.y0 + y, rect.x0 + x]]
    })
}

/// Scene-scale normalizer: the 80th-percentile depth (nearest-rank) of the
/// valid pixels of a disparity map.
pub fn scene_scale(disparity: &DisparityMap, mask: &Mask) -> Result<f64> {
    let mut depths: Vec<f64> = disparity
        .data
        .iter()
        .zip(mask.data.iter())
        .filter(|(_, &m)| m == 1)
        .map(|(&d, _)| 1.0 / d)
        .collect();
    if depths.is_empty() {
        return Err(Error::EmptyMask);
    }
    depths.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let idx = ((depths.len() - 1) as f64 * 0.8).round() as usize;
    Ok(depths[idx])
}

/// Rescale all camera translations by `1 / normalizer`, putting speeds in
/// scene-scale units.
pub fn scale_normalize(traj: &Trajectory, normalizer: f64) -> Result<Trajectory> {
    if !(normalizer > 0.0) {
        return Err(Error::InvalidInput(format!(
            "scene scale normalizer must be positive, got {normalizer}"
        )));
    }
    let entries = traj
        .entries()
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.pose = Pose::new(*e.pose.rotation(), e.pose.translation() / normalizer)
                .expect("rescaling translation preserves pose validity");
            e
        })
        .collect();
    Trajectory::new(entries)
}

/// Per-step translation magnitudes (camera-center distances).
pub fn speed_profile(traj: &Trajectory, normalizer: f64) -> SpeedProfile {
    let magnitudes = traj
        .entries()
        .windows(2)
        .map(|p| (p[1].pose.camera_center() - p[0].pose.camera_center()).norm())
        .collect();
    SpeedProfile { magnitudes, normalizer }
}

/// All subsampling strides k (1 up to length-1) whose mean per-step camera
/// translation lands inside `[lo, hi]`. The trajectory is assumed already
/// scale-normalized.
pub fn normalize_speed(traj: &Trajectory, lo: f64, hi: f64) -> Result<Vec<usize>> {
    if traj.len() < 2 {
        return Err(Error::InvalidInput("need at least 2 poses to measure speed".into()));
    }
    if !(lo <= hi) {
        return Err(Error::InvalidInput(format!("bad speed range [{lo}, {hi}]")));
    }
    let centers: Vec<_> = traj.entries().iter().map(|e| e.pose.camera_center()).collect();
    let mut valid = Vec::new();
    for k in 1..traj.len() {
        let stepped: Vec<_> = centers.iter().step_by(k).collect();
        if stepped.len() < 2 {
            continue;
        }
        let mean = stepped
            .windows(2)
            .map(|p| (p[1] - p[0]).norm())
            .sum::<f64>()
            / (stepped.len() - 1) as f64;
        if mean >= lo && mean <= hi {
            valid.push(k);
        }
    }
    if valid.is_empty() {
        return Err(Error::NoValidStride);
    }
    Ok(valid)
}

/// Fraction of the frame's valid pixels whose unprojected points land
/// in-bounds with positive depth when re-projected through `k` from
/// `p_future`. Occlusion is ignored; this is a coverage proxy.
pub fn visibility_fraction(frame: &Frame, p_future: &Pose, k: &Intrinsics) -> f64 {
    let rel = relative_transform(&frame.pose, p_future);
    let mut valid = 0usize;
    let mut visible = 0usize;
    for ((y, x), &m) in frame.mask.data.indexed_iter() {
        if m != 1 {
            continue;
        }
        valid += 1;
        let d = frame.disparity.data[[y, x]];
        let p = match unproject(&frame.intrinsics, x as f64, y as f64, d) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let q = rel.transform(&p);
        if q.z > 0.0 {
            if let Ok((u, v, _)) = project(k, &q) {
                if k.contains(u, v) {
                    visible += 1;
                }
            }
        }
    }
    if valid == 0 {
        return 0.0;
    }
    visible as f64 / valid as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrajectoryEntry;
    use crate::synth;
    use nalgebra::{Matrix3, Vector3};

    fn letterboxed_image(h: usize, w: usize, top: usize, bottom: usize) -> Array3<f64> {
        Array3::from_shape_fn((h, w, 3), |(y, _, _)| {
            if y < top || y >= h - bottom {
                0.0
            } else {
                0.5
            }
        })
    }

    #[test]
    fn letterbox_crop_and_principal_point() {
        let k = Intrinsics::new(100.0, 100.0, 50.0, 50.0, 80, 100).unwrap();
        let rgb = letterboxed_image(100, 80, 20, 20);
        let (rect, adjusted) = detect_letterbox(&rgb, &k, 16.0 / 255.0, 4).unwrap();
        assert_eq!((rect.y0, rect.y1, rect.x0, rect.x1), (20, 80, 0, 80));
        assert_eq!(adjusted.cy, 30.0);
        assert_eq!(adjusted.cx, 50.0);
        assert_eq!((adjusted.width, adjusted.height), (80, 60));
    }

    #[test]
    fn no_bands_is_a_full_rect() {
        let k = Intrinsics::new(100.0, 100.0, 50.0, 50.0, 40, 30).unwrap();
        let rgb = Array3::from_elem((30, 40, 3), 0.4);
        let (rect, adjusted) = detect_letterbox(&rgb, &k, 16.0 / 255.0, 4).unwrap();
        assert_eq!((rect.x0, rect.y0, rect.x1, rect.y1), (0, 0, 40, 30));
        assert_eq!(adjusted, k);
    }

    #[test]
    fn all_black_is_an_error() {
        let k = Intrinsics::new(100.0, 100.0, 50.0, 50.0, 40, 30).unwrap();
        let rgb = Array3::zeros((30, 40, 3));
        assert!(matches!(
            detect_letterbox(&rgb, &k, 16.0 / 255.0, 4),
            Err(Error::FullyBlack)
        ));
    }

    #[test]
    fn thin_bands_are_kept() {
        let k = Intrinsics::new(100.0, 100.0, 50.0, 50.0, 40, 30).unwrap();
        let rgb = letterboxed_image(30, 40, 2, 0);
        let (rect, _) = detect_letterbox(&rgb, &k, 16.0 / 255.0, 4).unwrap();
        assert_eq!(rect.y0, 0, "a 2-row band is below min_band");
    }

    #[test]
    fn crop_commutes_with_projection() {
        // Dyadic-friendly values keep both arithmetic routes bit-exact.
        let k = Intrinsics::new(256.0, 128.0, 128.0, 64.0, 256, 128).unwrap();
        let adjusted = k.cropped(32, 16, 192, 96).unwrap();
        for p in [
            Vector3::new(1.0, 0.5, 4.0),
            Vector3::new(-0.75, 0.25, 2.0),
            Vector3::new(0.125, -0.5, 8.0),
        ] {
            let (u, v, _) = project(&k, &p).unwrap();
            let (uc, vc, _) = project(&adjusted, &p).unwrap();
            assert_eq!(uc, u - 32.0);
            assert_eq!(vc, v - 16.0);
        }
    }

    fn collinear_trajectory(n: usize, spacing: f64) -> Trajectory {
        let k = Intrinsics::new(64.0, 64.0, 32.0, 32.0, 64, 64).unwrap();
        Trajectory::new(
            (0..n)
                .map(|i| TrajectoryEntry {
                    frame_id: i as i64,
                    intrinsics: k.clone(),
                    pose: Pose::new(
                        Matrix3::identity(),
                        Vector3::new(-(i as f64) * spacing, 0.0, 0.0),
                    )
                    .unwrap(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn stride_set_for_unit_spacing() {
        let traj = collinear_trajectory(8, 1.0);
        assert_eq!(normalize_speed(&traj, 2.0, 3.0).unwrap(), vec![2, 3]);
    }

    #[test]
    fn stride_one_when_already_in_range() {
        let traj = collinear_trajectory(6, 2.5);
        let strides = normalize_speed(&traj, 2.0, 3.0).unwrap();
        assert_eq!(strides, vec![1]);
    }

    #[test]
    fn subsampling_cannot_slow_down() {
        let traj = collinear_trajectory(6, 1.0);
        assert!(matches!(
            normalize_speed(&traj, 0.2, 0.5),
            Err(Error::NoValidStride)
        ));
    }

    #[test]
    fn stride_sets_are_contiguous_for_equal_spacing() {
        for n in [5usize, 9, 12] {
            let traj = collinear_trajectory(n, 1.0);
            if let Ok(strides) = normalize_speed(&traj, 2.0, 5.0) {
                for w in strides.windows(2) {
                    assert_eq!(w[1], w[0] + 1);
                }
            }
        }
    }

    #[test]
    fn scene_scale_is_80th_percentile_depth() {
        // Depths 1..=10: nearest-rank 80th percentile of 10 samples is 8.2 ->
        // rounds to index 7 -> depth 8.
        let d = DisparityMap {
            data: Array2::from_shape_fn((1, 10), |(_, x)| 1.0 / (x + 1) as f64),
        };
        let s = scene_scale(&d, &Mask::ones(1, 10)).unwrap();
        assert_eq!(s, 8.0);
    }

    #[test]
    fn scale_normalize_scales_speeds() {
        let traj = collinear_trajectory(4, 3.0);
        let normalized = scale_normalize(&traj, 3.0).unwrap();
        let profile = speed_profile(&normalized, 3.0);
        for m in profile.magnitudes {
            approx::assert_relative_eq!(m, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn visibility_identity_is_one() {
        let f = synth::plane_frame(16, 24, 4.0);
        assert_eq!(visibility_fraction(&f, &f.pose, &f.intrinsics), 1.0);
    }

    #[test]
    fn visibility_opposite_is_zero() {
        let f = synth::plane_frame(16, 24, 4.0);
        let flip = Pose::new(
            Matrix3::from_columns(&[-Vector3::x(), Vector3::y(), -Vector3::z()]),
            Vector3::zeros(),
        )
        .unwrap();
        assert_eq!(visibility_fraction(&f, &flip, &f.intrinsics), 0.0);
    }

    #[test]
    fn visibility_matches_analytic_egress_band() {
        // Lateral translation that pushes 10% of the field of view out of
        // frame leaves about 90% visible.
        let f = synth::plane_frame(64, 128, 4.0);
        let k = &f.intrinsics;
        let shift_px = 0.1 * k.width as f64;
        let delta = shift_px * 4.0 / k.fx;
        let future = Pose::new(Matrix3::identity(), Vector3::new(-delta, 0.0, 0.0)).unwrap();
        let vis = visibility_fraction(&f, &future, k);
        assert!((vis - 0.9).abs() <= 0.02, "visibility {vis}");
    }

    #[test]
    fn visibility_monotone_under_further_translation() {
        let f = synth::plane_frame(32, 48, 4.0);
        let mut last = 1.0;
        for steps in 1..=4 {
            let delta = 0.3 * steps as f64;
            let pose = Pose::new(Matrix3::identity(), Vector3::new(-delta, 0.0, 0.0)).unwrap();
            let vis = visibility_fraction(&f, &pose, &f.intrinsics);
            assert!(vis <= last + 1e-12);
            last = vis;
        }
    }
}
