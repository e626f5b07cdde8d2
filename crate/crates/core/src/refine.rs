//! The refine step of the generation loop as a pluggable contract, with
//! non-neural built-ins and a file-exchange adapter for external refiners.
//!
//! Contract: a refiner returns fully populated rgb and disparity of the input
//! dimensions, with rgb in [0,1] and disparity positive everywhere, and must
//! leave valid (mask = 1) pixels untouched. The passthrough refiner
//! intentionally breaks the fill requirement - it exists to reproduce the
//! no-refinement ablation, where holes stay empty.

use std::path::PathBuf;
use std::process::Command;

use ndarray::Array3;

use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Mask};
use crate::io;

/// The refine contract: fill masked regions of an rgb + disparity pair.
pub trait Refiner {
    fn refine(
        &self,
        rgb: &Array3<f64>,
        disparity: &DisparityMap,
        mask: &Mask,
    ) -> Result<(Array3<f64>, DisparityMap)>;
}

/// Returns its inputs unchanged; masked pixels remain zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct Passthrough;

impl Refiner for Passthrough {
    fn refine(
        &self,
        rgb: &Array3<f64>,
        disparity: &DisparityMap,
        _mask: &Mask,
    ) -> Result<(Array3<f64>, DisparityMap)> {
        Ok((rgb.clone(), disparity.clone()))
    }
}

/// Multiplies disparity by a constant factor each call; a diagnostic refiner
/// for reproducing scale-drift experiments with and without grounding.
#[derive(Debug, Clone, Copy)]
pub struct ScaleDisparity {
    pub factor: f64,
}

impl Refiner for ScaleDisparity {
    fn refine(
        &self,
        rgb: &Array3<f64>,
        disparity: &DisparityMap,
        _mask: &Mask,
    ) -> Result<(Array3<f64>, DisparityMap)> {
        Ok((rgb.clone(), DisparityMap { data: disparity.data.mapv(|d| d * self.factor) }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InpaintConfig {
    pub max_iterations: usize,
    /// Sweep stops once no hole pixel moved by more than this.
    pub convergence_tol: f64,
}

impl Default for InpaintConfig {
    fn default() -> Self {
        InpaintConfig { max_iterations: 5000, convergence_tol: 1e-6 }
    }
}

/// Harmonic hole filling: every hole pixel relaxes to the mean of its
/// 4-neighbors until convergence. Valid pixels are preserved exactly; rgb is
/// diffused per channel and disparity in log space so it stays positive.
#[derive(Debug, Clone, Default)]
pub struct Inpaint {
    pub config: InpaintConfig,
}

impl Refiner for Inpaint {
    fn refine(
        &self,
        rgb: &Array3<f64>,
        disparity: &DisparityMap,
        mask: &Mask,
    ) -> Result<(Array3<f64>, DisparityMap)> {
        let (h, w) = mask.data.dim();
        let holes: Vec<(usize, usize)> = mask
            .data
            .indexed_iter()
            .filter(|(_, &m)| m == 0)
            .map(|(idx, _)| idx)
            .collect();
        if holes.is_empty() {
            return Ok((rgb.clone(), disparity.clone()));
        }
        if holes.len() == h * w {
            return Err(Error::AllMasked);
        }

        let mut out_rgb = rgb.clone();
        for c in 0..3 {
            let mut plane =
                ndarray::Array2::from_shape_fn((h, w), |(y, x)| rgb[[y, x, c]]);
            diffuse(&mut plane, &holes, &mask.data, &self.config);
            for &(y, x) in &holes {
                out_rgb[[y, x, c]] = plane[[y, x]];
            }
        }

        let mut log_d = disparity.data.mapv(|d| if d > 0.0 { d.ln() } else { 0.0 });
        diffuse(&mut log_d, &holes, &mask.data, &self.config);
        let mut out_d = disparity.clone();
        for &(y, x) in &holes {
            out_d.data[[y, x]] = log_d[[y, x]].exp();
        }
        Ok((out_rgb, out_d))
    }
}

/// Gauss-Seidel relaxation of the hole pixels in row-major order. Holes are
/// seeded with the mean of the valid pixels, which is already the fixed point
/// for constant surroundings.
fn diffuse(
    plane: &mut ndarray::Array2<f64>,
    holes: &[(usize, usize)],
    valid: &ndarray::Array2<u8>,
    cfg: &InpaintConfig,
) {
    let (h, w) = plane.dim();
    let mut sum = 0.0;
    let mut n = 0usize;
    for ((y, x), &m) in valid.indexed_iter() {
        if m == 1 {
            sum += plane[[y, x]];
            n += 1;
        }
    }
    let seed = sum / n as f64;
    for &(y, x) in holes {
        plane[[y, x]] = seed;
    }

    for _ in 0..cfg.max_iterations {
        let mut max_change = 0.0f64;
        for &(y, x) in holes {
            let mut acc = 0.0;
            let mut cnt = 0.0;
            if y > 0 {
                acc += plane[[y - 1, x]];
                cnt += 1.0;
            }
            if y + 1 < h {
                acc += plane[[y + 1, x]];
                cnt += 1.0;
            }
            if x > 0 {
                acc += plane[[y, x - 1]];
                cnt += 1.0;
            }
            if x + 1 < w {
                acc += plane[[y, x + 1]];
                cnt += 1.0;
            }
            let new = acc / cnt;
            max_change = max_change.max((new - plane[[y, x]]).abs());
            plane[[y, x]] = new;
        }
        if max_change < cfg.convergence_tol {
            break;
        }
    }
}

/// Adapter for an external refiner process. Inputs are written to an
/// exchange directory as `rgb.png`, `disparity.pfm` and `mask.png`; the
/// program is invoked with the directory as its final argument and must
/// write back `refined.png` and `refined_disparity.pfm`.
///
/// With `strict` set (the default), valid pixels must come back bit-exact in
/// the exchange formats (u8 for rgb, f32 for disparity). Refiners that
/// legitimately retouch the whole image can turn this off.
#[derive(Debug, Clone)]
pub struct External {
    pub command: Vec<String>,
    pub strict: bool,
    /// Fixed exchange directory; a fresh temp directory per call when unset.
    /// Concurrent calls must use distinct directories.
    pub exchange_dir: Option<PathBuf>,
}

impl External {
    pub fn new(command: Vec<String>) -> Self {
        External { command, strict: true, exchange_dir: None }
    }
}

impl Refiner for External {
    fn refine(
        &self,
        rgb: &Array3<f64>,
        disparity: &DisparityMap,
        mask: &Mask,
    ) -> Result<(Array3<f64>, DisparityMap)> {
        if self.command.is_empty() {
            return Err(Error::ExternalFailure("empty command".into()));
        }
        let tmp;
        let dir = match &self.exchange_dir {
            Some(d) => {
                std::fs::create_dir_all(d)?;
                d.clone()
            }
            None => {
                tmp = tempfile::tempdir()?;
                tmp.path().to_path_buf()
            }
        };

        io::write_rgb_png(&dir.join("rgb.png"), rgb)?;
        io::write_pfm(&dir.join("disparity.pfm"), &disparity.data)?;
        io::write_mask_png(&dir.join("mask.png"), mask)?;

        let status = Command::new(&self.command[0])
            .args(&self.command[1..])
            .arg(&dir)
            .status()
            .map_err(|e| Error::ExternalFailure(format!("failed to spawn {}: {e}", self.command[0])))?;
        if !status.success() {
            return Err(Error::ExternalFailure(format!("exited with {status}")));
        }

        let refined_png = dir.join("refined.png");
        let refined_pfm = dir.join("refined_disparity.pfm");
        if !refined_png.exists() || !refined_pfm.exists() {
            return Err(Error::ExternalFailure(
                "program produced no refined.png / refined_disparity.pfm".into(),
            ));
        }
        let out_rgb = io::read_rgb_png(&refined_png)?;
        let out_d = io::read_pfm(&refined_pfm)?;

        let (h, w) = mask.data.dim();
        if out_rgb.dim() != (h, w, 3) || out_d.dim() != (h, w) {
            return Err(Error::ContractViolation(format!(
                "output dimensions {:?} / {:?} do not match input {h}x{w}",
                out_rgb.dim(),
                out_d.dim()
            )));
        }
        if let Some(((y, x), &d)) = out_d.indexed_iter().find(|(_, &d)| !(d > 0.0)) {
            return Err(Error::ContractViolation(format!(
                "refined disparity at ({y}, {x}) is {d}, expected > 0"
            )));
        }
        if self.strict {
            for ((y, x), &m) in mask.data.indexed_iter() {
                if m != 1 {
                    continue;
                }
                for c in 0..3 {
                    let want = io::quantize_u8(rgb[[y, x, c]]);
                    let got = io::quantize_u8(out_rgb[[y, x, c]]);
                    if want != got {
                        return Err(Error::ContractViolation(format!(
                            "valid rgb pixel ({y}, {x}) changed from {want} to {got}"
                        )));
                    }
                }
                if disparity.data[[y, x]] as f32 != out_d[[y, x]] as f32 {
                    return Err(Error::ContractViolation(format!(
                        "valid disparity pixel ({y}, {x}) changed"
                    )));
                }
            }
        }
        Ok((out_rgb, DisparityMap::new(out_d)?))
    }
}
