//! 8-bit PNG I/O for rgb images (values quantized from [0,1]) and for binary
//! masks stored as {0, 255}.

use std::path::Path;

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};
use crate::frame::Mask;

pub fn write_rgb_png(path: &Path, rgb: &Array3<f64>) -> Result<()> {
    let (h, w, c) = rgb.dim();
    if c != 3 {
        return Err(Error::DimensionMismatch(format!("rgb image has {c} channels, expected 3")));
    }
    let mut raw = Vec::with_capacity(h * w * 3);
    for y in 0..h {
        for x in 0..w {
            for ch in 0..3 {
                raw.push(quantize_u8(rgb[[y, x, ch]]));
            }
        }
    }
    let img = image::RgbImage::from_raw(w as u32, h as u32, raw)
        .ok_or_else(|| Error::InvalidInput("rgb buffer size mismatch".into()))?;
    img.save(path).map_err(|e| Error::Format(format!("png write failed: {e}")))?;
    Ok(())
}

pub fn read_rgb_png(path: &Path) -> Result<Array3<f64>> {
    let img = image::open(path)
        .map_err(|e| Error::Format(format!("png read failed: {e}")))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    let mut rgb = Array3::<f64>::zeros((h as usize, w as usize, 3));
    for (x, y, px) in img.enumerate_pixels() {
        for c in 0..3 {
            rgb[[y as usize, x as usize, c]] = px.0[c] as f64 / 255.0;
        }
    }
    Ok(rgb)
}

pub fn write_mask_png(path: &Path, mask: &Mask) -> Result<()> {
    let (h, w) = mask.data.dim();
    let raw: Vec<u8> = mask.data.iter().map(|&m| if m == 1 { 255 } else { 0 }).collect();
    let img = image::GrayImage::from_raw(w as u32, h as u32, raw)
        .ok_or_else(|| Error::InvalidInput("mask buffer size mismatch".into()))?;
    img.save(path).map_err(|e| Error::Format(format!("png write failed: {e}")))?;
    Ok(())
}

pub fn read_mask_png(path: &Path) -> Result<Mask> {
    let img = image::open(path)
        .map_err(|e| Error::Format(format!("png read failed: {e}")))?
        .to_luma8();
    let (w, h) = img.dimensions();
    let mut data = Array2::<u8>::zeros((h as usize, w as usize));
    for (x, y, px) in img.enumerate_pixels() {
        data[[y as usize, x as usize]] = (px.0[0] >= 128) as u8;
    }
    Ok(Mask { data })
}

/// Round-to-nearest quantization to the u8 grid; exact for values already on
/// the grid, so PNG round trips are lossless for engine outputs derived from
/// 8-bit sources.
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}
