//! Grayscale PFM ("Pf") maps. The scale line's sign encodes endianness; we
//! write little-endian ("-1.0") float32 with the standard bottom-up row
//! order. The scale magnitude is ignored on read.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};

pub fn write_pfm(path: &Path, map: &Array2<f64>) -> Result<()> {
    let (h, w) = map.dim();
    let mut bytes = Vec::with_capacity(64 + h * w * 4);
    bytes.extend_from_slice(format!("Pf\n{} {}\n-1.0\n", w, h).as_bytes());
    for y in (0..h).rev() {
        for x in 0..w {
            bytes.extend_from_slice(&(map[[y, x]] as f32).to_le_bytes());
        }
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_pfm(path: &Path) -> Result<Array2<f64>> {
    let bytes = fs::read(path)?;
    let mut pos = 0usize;
    let mut token = |what: &str| -> Result<String> {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format(format!("pfm: missing {what}")));
        }
        let s = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::Format("pfm: non-utf8 header".into()))?
            .to_string();
        // Consume exactly one whitespace after the token.
        pos += 1;
        Ok(s)
    };

    let magic = token("magic")?;
    if magic != "Pf" {
        return Err(Error::Format(format!("pfm: expected grayscale 'Pf', got '{magic}'")));
    }
    let w: usize = token("width")?
        .parse()
        .map_err(|e| Error::Format(format!("pfm: bad width: {e}")))?;
    let h: usize = token("height")?
        .parse()
        .map_err(|e| Error::Format(format!("pfm: bad height: {e}")))?;
    let scale: f64 = token("scale")?
        .parse()
        .map_err(|e| Error::Format(format!("pfm: bad scale: {e}")))?;
    let little_endian = scale < 0.0;

    let payload = &bytes[pos..];
    if payload.len() < h * w * 4 {
        return Err(Error::Format(format!(
            "pfm: payload holds {} bytes, expected {}",
            payload.len(),
            h * w * 4
        )));
    }
    let mut map = Array2::<f64>::zeros((h, w));
    let mut off = 0usize;
    for y in (0..h).rev() {
        for x in 0..w {
            let raw: [u8; 4] = payload[off..off + 4].try_into().unwrap();
            let v = if little_endian {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            map[[y, x]] = v as f64;
            off += 4;
        }
    }
    Ok(map)
}
