//! Image-plane state: disparity maps, binary masks and the `Frame` value that
//! the generation loop threads from step to step.

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};
use crate::geometry::{Intrinsics, Pose};

/// Grid of disparity (inverse depth) values. Valid pixels must be positive;
/// masked-out pixels are held at zero by convention.
#[derive(Debug, Clone, PartialEq)]
pub struct DisparityMap {
    pub data: Array2<f64>,
}

impl DisparityMap {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidInput(format!("disparity contains non-finite value {bad}")));
        }
        Ok(DisparityMap { data })
    }

    pub fn constant(height: usize, width: usize, value: f64) -> Self {
        DisparityMap { data: Array2::from_elem((height, width), value) }
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Median over all pixels (lower median for even counts).
    pub fn median(&self) -> f64 {
        let mut v: Vec<f64> = self.data.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[(v.len() - 1) / 2]
    }

    /// Bilinear sample at continuous pixel coordinates; `(u, v)` must lie in
    /// `[0, W-1] x [0, H-1]`.
    pub fn sample_bilinear(&self, u: f64, v: f64) -> f64 {
        let (h, w) = self.data.dim();
        let x0 = (u.floor() as usize).min(w - 1);
        let y0 = (v.floor() as usize).min(h - 1);
        let x1 = (x0 + 1).min(w - 1);
        let y1 = (y0 + 1).min(h - 1);
        let fx = u - x0 as f64;
        let fy = v - y0 as f64;
        let top = self.data[[y0, x0]] * (1.0 - fx) + self.data[[y0, x1]] * fx;
        let bot = self.data[[y1, x0]] * (1.0 - fx) + self.data[[y1, x1]] * fx;
        top * (1.0 - fy) + bot * fy
    }
}

/// Per-pixel binary validity grid holding only 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    pub data: Array2<u8>,
}

impl Mask {
    pub fn new(data: Array2<u8>) -> Result<Self> {
        if let Some(bad) = data.iter().find(|&&m| m > 1) {
            return Err(Error::InvalidInput(format!("mask values must be 0 or 1, got {bad}")));
        }
        Ok(Mask { data })
    }

    pub fn ones(height: usize, width: usize) -> Self {
        Mask { data: Array2::from_elem((height, width), 1) }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Mask { data: Array2::from_elem((height, width), 0) }
    }

    pub fn height(&self) -> usize {
        self.data.nrows()
    }

    pub fn width(&self) -> usize {
        self.data.ncols()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&m| m == 1).count()
    }

    pub fn fraction_ones(&self) -> f64 {
        self.count_ones() as f64 / self.data.len() as f64
    }

    /// Elementwise AND with another mask of the same shape.
    pub fn and(&self, other: &Mask) -> Mask {
        let mut data = self.data.clone();
        data.zip_mut_with(&other.data, |a, b| *a &= b);
        Mask { data }
    }
}

/// The state carried between generation-loop iterations: an RGB image, its
/// disparity, the validity mask and the camera it was observed from.
///
/// Invariants: all grids share the intrinsics' dimensions; masked-out pixels
/// hold zero rgb and zero disparity; valid pixels have positive disparity.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub rgb: Array3<f64>,
    pub disparity: DisparityMap,
    pub mask: Mask,
    pub pose: Pose,
    pub intrinsics: Intrinsics,
}

impl Frame {
    pub fn new(
        rgb: Array3<f64>,
        disparity: DisparityMap,
        mask: Mask,
        pose: Pose,
        intrinsics: Intrinsics,
    ) -> Result<Self> {
        let frame = Frame { rgb, disparity, mask, pose, intrinsics };
        frame.validate()?;
        Ok(frame)
    }

    pub fn height(&self) -> usize {
        self.intrinsics.height
    }

    pub fn width(&self) -> usize {
        self.intrinsics.width
    }

    pub fn validate(&self) -> Result<()> {
        let (h, w) = (self.intrinsics.height, self.intrinsics.width);
        if self.rgb.dim() != (h, w, 3) {
            return Err(Error::DimensionMismatch(format!(
                "rgb is {:?}, expected ({h}, {w}, 3)",
                self.rgb.dim()
            )));
        }
        if self.disparity.data.dim() != (h, w) || self.mask.data.dim() != (h, w) {
            return Err(Error::DimensionMismatch(format!(
                "disparity {:?} / mask {:?} do not match image {h}x{w}",
                self.disparity.data.dim(),
                self.mask.data.dim()
            )));
        }
        for (idx, &m) in self.mask.data.indexed_iter() {
            if m > 1 {
                return Err(Error::InvalidInput("mask values must be 0 or 1".into()));
            }
            let d = self.disparity.data[idx];
            if m == 1 {
                if !(d > 0.0) {
                    return Err(Error::NonPositiveDisparity(d));
                }
            } else {
                if d != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "masked-out pixel {idx:?} holds disparity {d}, expected 0"
                    )));
                }
                for c in 0..3 {
                    let v = self.rgb[[idx.0, idx.1, c]];
                    if v != 0.0 {
                        return Err(Error::InvalidInput(format!(
                            "masked-out pixel {idx:?} holds rgb {v}, expected 0"
                        )));
                    }
                }
            }
        }
        for v in self.rgb.iter() {
            if !(*v >= 0.0 && *v <= 1.0) {
                return Err(Error::InvalidInput(format!("rgb value {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}
