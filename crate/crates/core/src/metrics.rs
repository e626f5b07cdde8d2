//! Evaluation utilities: MSE, the Fréchet distance between Gaussian
//! summaries of externally computed embeddings, and sliding-window bookkeeping
//! over a sequence of per-frame embeddings.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, Array3};

use crate::error::{Error, Result};

/// Eigenvalues below `-1e-8 * max(1, lambda_max)` fail the PSD check.
const PSD_TOL: f64 = 1e-8;
/// Relative clamp for small negative eigenvalues inside the matrix square
/// root; pinned so distances reproduce bit-for-bit across runs.
const CLAMP_TOL: f64 = 1e-10;

/// Ordered per-frame feature vectors, one row per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    data: Array2<f64>,
}

impl EmbeddingSequence {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.ncols() == 0 {
            return Err(Error::InvalidInput("embedding dimension must be at least 1".into()));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("embedding contains non-finite value {v}")));
        }
        Ok(EmbeddingSequence { data })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// Number of frames.
    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    /// Embedding dimension m.
    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    /// Rows `lo..=hi` as a new sequence.
    pub fn slice_rows(&self, lo: usize, hi: usize) -> EmbeddingSequence {
        EmbeddingSequence {
            data: self.data.slice(ndarray::s![lo..=hi, ..]).to_owned(),
        }
    }
}

/// Mean and covariance summary of a set of embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    pub mu: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

impl GaussianStats {
    /// Validates symmetry (1e-9) and positive semidefiniteness up to the
    /// numerical tolerance.
    pub fn new(mu: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        let m = mu.len();
        if sigma.nrows() != m || sigma.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "sigma is {}x{}, expected {m}x{m}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let asym = (&sigma - sigma.transpose()).abs().max();
        if asym > 1e-9 {
            return Err(Error::NotPsd(format!("sigma is asymmetric by {asym:.3e}")));
        }
        let eig = sigma.clone().symmetric_eigen();
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL * max.max(1.0) {
            return Err(Error::NotPsd(format!("minimum eigenvalue {min:.3e}")));
        }
        Ok(GaussianStats { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Sliding evaluation window of even width `w` centered at frame `t`,
/// covering indices `t - w/2 < i <= t + w/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub width: usize,
    pub center: usize,
}

impl WindowSpec {
    pub fn new(width: usize, center: usize) -> Result<Self> {
        if width < 2 || width % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "window width must be even and at least 2, got {width}"
            )));
        }
        Ok(WindowSpec { width, center })
    }

    /// Inclusive index bounds of the half-open window.
    pub fn bounds(&self) -> (i64, i64) {
        let half = (self.width / 2) as i64;
        (self.center as i64 - half + 1, self.center as i64 + half)
    }
}

/// Mean squared difference over all pixels and channels.
pub fn mse(a: &Array3<f64>, b: &Array3<f64>) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "images are {:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let n = a.len() as f64;
    Ok(a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / n)
}

/// Sample mean and covariance (1/(n-1) normalization, symmetry enforced).
pub fn gaussian_stats(e: &EmbeddingSequence) -> Result<GaussianStats> {
    let n = e.len();
    if n < 2 {
        return Err(Error::TooFewSamples { got: n, needed: 2 });
    }
    let m = e.dim();
    let mut mu = DVector::zeros(m);
    for row in e.data.rows() {
        for j in 0..m {
            mu[j] += row[j];
        }
    }
    mu /= n as f64;
    let mut sigma = DMatrix::zeros(m, m);
    for row in e.data.rows() {
        let centered = DVector::from_fn(m, |j, _| row[j] - mu[j]);
        sigma += &centered * centered.transpose();
    }
    sigma /= (n - 1) as f64;
    // Exact symmetrization; outer-product sums are symmetric up to rounding.
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    Ok(GaussianStats { mu, sigma })
}

/// Principal square root of a symmetric PSD matrix via eigendecomposition,
/// clamping eigenvalues that are negative within tolerance.
fn sqrt_psd(s: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = -PSD_TOL * max.max(1.0);
    let mut vals = eig.eigenvalues.clone();
    for v in vals.iter_mut() {
        if *v < floor {
            return Err(Error::NotPsd(format!("{what}: eigenvalue {v:.3e}")));
        }
        *v = if *v < CLAMP_TOL * max.max(0.0) { 0.0 } else { v.sqrt() };
    }
    let q = &eig.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&vals) * q.transpose())
}

/// Squared Fréchet distance between two Gaussians:
/// `||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2))`, with the cross
/// term computed as the root of `S_a^(1/2) S_b S_a^(1/2)`.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "stats have dimensions {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let a_half = sqrt_psd(&a.sigma, "sigma_a")?;
    let inner = &a_half * &b.sigma * &a_half;
    let sym = (&inner + inner.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = -PSD_TOL * max.max(1.0);
    let mut tr_sqrt = 0.0;
    for &v in eig.eigenvalues.iter() {
        if v < floor {
            return Err(Error::NotPsd(format!("cross term eigenvalue {v:.3e}")));
        }
        if v > CLAMP_TOL * max.max(0.0) {
            tr_sqrt += v.sqrt();
        }
    }
    let dmu = &a.mu - &b.mu;
    let dist = dmu.dot(&dmu) + a.sigma.trace() + b.sigma.trace() - 2.0 * tr_sqrt;
    if dist < -1e-6 {
        return Err(Error::NotPsd(format!("distance came out {dist:.3e}")));
    }
    Ok(dist.max(0.0))
}

/// Gaussian statistics of the frames inside the window, then the Fréchet
/// distance against the reference statistics.
pub fn sliding_fid(
    e: &EmbeddingSequence,
    reference: &GaussianStats,
    spec: &WindowSpec,
) -> Result<f64> {
    if e.dim() != reference.dim() {
        return Err(Error::DimensionMismatch(format!(
            "embeddings have dimension {}, reference {}",
            e.dim(),
            reference.dim()
        )));
    }
    let (lo, hi) = spec.bounds();
    if lo < 0 || hi >= e.len() as i64 {
        return Err(Error::WindowOutOfBounds { lo, hi, len: e.len() });
    }
    if spec.width < e.dim() + 1 {
        log::warn!(
            "window of {} samples cannot produce a full-rank {}-dimensional covariance",
            spec.width,
            e.dim()
        );
    }
    let window = e.slice_rows(lo as usize, hi as usize);
    let stats = gaussian_stats(&window)?;
    frechet_distance(&stats, reference)
}
