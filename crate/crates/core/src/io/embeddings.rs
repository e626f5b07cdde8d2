//! Embedding sequences on disk: a single-line JSON header `{"n":..,"m":..}`
//! followed by n*m little-endian float32 values, row-major. Reference
//! Gaussian statistics are plain JSON `{"mu": [...], "sigma": [[...]]}`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{EmbeddingSequence, GaussianStats};

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    m: usize,
}

pub fn write_embeddings(path: &Path, e: &EmbeddingSequence) -> Result<()> {
    let (n, m) = e.data().dim();
    let mut bytes = Vec::with_capacity(64 + n * m * 4);
    bytes.extend_from_slice(
        serde_json::to_string(&Header { n, m })
            .map_err(|e| Error::Format(e.to_string()))?
            .as_bytes(),
    );
    bytes.push(b'\n');
    for v in e.data().iter() {
        bytes.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_embeddings(path: &Path) -> Result<EmbeddingSequence> {
    let bytes = fs::read(path)?;
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Format("embeddings: missing header line".into()))?;
    let header: Header = serde_json::from_slice(&bytes[..newline])
        .map_err(|e| Error::Format(format!("embeddings header: {e}")))?;
    let payload = &bytes[newline + 1..];
    let expected = header.n * header.m * 4;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "embeddings payload holds {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let mut data = Array2::<f64>::zeros((header.n, header.m));
    for (i, v) in data.iter_mut().enumerate() {
        let raw: [u8; 4] = payload[i * 4..i * 4 + 4].try_into().unwrap();
        *v = f32::from_le_bytes(raw) as f64;
    }
    EmbeddingSequence::new(data)
}

#[derive(Serialize, Deserialize)]
struct StatsFile {
    mu: Vec<f64>,
    sigma: Vec<Vec<f64>>,
}

pub fn read_stats(path: &Path) -> Result<GaussianStats> {
    let text = fs::read_to_string(path)?;
    let file: StatsFile =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("stats: {e}")))?;
    let m = file.mu.len();
    if file.sigma.len() != m || file.sigma.iter().any(|row| row.len() != m) {
        return Err(Error::DimensionMismatch(format!(
            "stats: sigma must be {m}x{m} to match mu"
        )));
    }
    let mu = DVector::from_vec(file.mu);
    let sigma = DMatrix::from_fn(m, m, |i, j| file.sigma[i][j]);
    GaussianStats::new(mu, sigma)
}

pub fn write_stats(path: &Path, stats: &GaussianStats) -> Result<()> {
    let m = stats.mu.len();
    let file = StatsFile {
        mu: stats.mu.iter().copied().collect(),
        sigma: (0..m)
            .map(|i| (0..m).map(|j| stats.sigma[(i, j)]).collect())
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))?)?;
    Ok(())
}
