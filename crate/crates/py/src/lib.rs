//! Python bindings for the flyover engine: the main types (Intrinsics, Pose,
//! Frame, Autopilot) and operations (render, step, generate, alignment,
//! grounding, inpainting, metrics, PFM I/O) with numpy arrays at the
//! boundary.

use std::path::PathBuf;

use numpy::{
    IntoPyArray, PyArray1, PyArray2, PyArray3, PyReadonlyArray1, PyReadonlyArray2,
    PyReadonlyArray3,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use flyover_core as core;
use flyover_core::engine;
use flyover_core::refine::{self, Refiner};

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.name()))
}

fn vec3(a: &PyReadonlyArray1<f64>) -> PyResult<nalgebra::Vector3<f64>> {
    let v = a.as_array();
    if v.len() != 3 {
        return Err(PyValueError::new_err("expected a 3-vector"));
    }
    Ok(nalgebra::Vector3::new(v[0], v[1], v[2]))
}

fn mat3(a: &PyReadonlyArray2<f64>) -> PyResult<nalgebra::Matrix3<f64>> {
    let m = a.as_array();
    if m.dim() != (3, 3) {
        return Err(PyValueError::new_err("expected a 3x3 matrix"));
    }
    Ok(nalgebra::Matrix3::from_fn(|i, j| m[[i, j]]))
}

fn mask_from(a: &PyReadonlyArray2<u8>) -> PyResult<core::Mask> {
    core::Mask::new(a.as_array().to_owned()).map_err(err)
}

fn disparity_from(a: &PyReadonlyArray2<f64>) -> PyResult<core::DisparityMap> {
    core::DisparityMap::new(a.as_array().to_owned()).map_err(err)
}

fn parse_refiner(spec: &str) -> PyResult<Box<dyn Refiner>> {
    if spec == "passthrough" {
        return Ok(Box::new(refine::Passthrough));
    }
    if spec == "inpaint" {
        return Ok(Box::new(refine::Inpaint::default()));
    }
    if let Some(f) = spec.strip_prefix("scale:") {
        let factor: f64 = f
            .parse()
            .map_err(|_| PyValueError::new_err(format!("bad scale factor in '{spec}'")))?;
        return Ok(Box::new(refine::ScaleDisparity { factor }));
    }
    if let Some(cmd) = spec.strip_prefix("external:") {
        let command: Vec<String> = cmd.split_whitespace().map(str::to_string).collect();
        return Ok(Box::new(refine::External::new(command)));
    }
    Err(PyValueError::new_err(format!(
        "unknown refiner '{spec}' (passthrough | inpaint | scale:<f> | external:<cmd>)"
    )))
}

/// Pinhole calibration in pixel units.
#[pyclass(name = "Intrinsics", from_py_object)]
#[derive(Clone)]
struct PyIntrinsics {
    inner: core::Intrinsics,
}

#[pymethods]
impl PyIntrinsics {
    #[new]
    fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> PyResult<Self> {
        Ok(PyIntrinsics {
            inner: core::Intrinsics::new(fx, fy, cx, cy, width, height).map_err(err)?,
        })
    }

    #[getter]
    fn fx(&self) -> f64 {
        self.inner.fx
    }

    #[getter]
    fn fy(&self) -> f64 {
        self.inner.fy
    }

    #[getter]
    fn cx(&self) -> f64 {
        self.inner.cx
    }

    #[getter]
    fn cy(&self) -> f64 {
        self.inner.cy
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height
    }

    fn __repr__(&self) -> String {
        let k = &self.inner;
        format!(
            "Intrinsics(fx={}, fy={}, cx={}, cy={}, width={}, height={})",
            k.fx, k.fy, k.cx, k.cy, k.width, k.height
        )
    }
}

/// World-to-camera rigid transform.
#[pyclass(name = "Pose", from_py_object)]
#[derive(Clone)]
struct PyPose {
    inner: core::Pose,
}

#[pymethods]
impl PyPose {
    #[new]
    fn new(rotation: PyReadonlyArray2<f64>, translation: PyReadonlyArray1<f64>) -> PyResult<Self> {
        Ok(PyPose {
            inner: core::Pose::new(mat3(&rotation)?, vec3(&translation)?).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity() -> Self {
        PyPose { inner: core::Pose::identity() }
    }

    /// Camera at `center` looking along `look`, world up +y.
    #[staticmethod]
    fn look_at(center: PyReadonlyArray1<f64>, look: PyReadonlyArray1<f64>) -> PyResult<Self> {
        Ok(PyPose {
            inner: core::Pose::look_at(vec3(&center)?, vec3(&look)?).map_err(err)?,
        })
    }

    #[getter]
    fn rotation<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<f64>> {
        let r = self.inner.rotation();
        ndarray::Array2::from_shape_fn((3, 3), |(i, j)| r[(i, j)]).into_pyarray(py)
    }

    #[getter]
    fn translation<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        let t = self.inner.translation();
        ndarray::Array1::from_vec(vec![t.x, t.y, t.z]).into_pyarray(py)
    }

    fn camera_center<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        let c = self.inner.camera_center();
        ndarray::Array1::from_vec(vec![c.x, c.y, c.z]).into_pyarray(py)
    }

    fn look_dir<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        let l = self.inner.look_dir();
        ndarray::Array1::from_vec(vec![l.x, l.y, l.z]).into_pyarray(py)
    }

    /// Interpolate camera center linearly and look direction spherically.
    fn interpolate(&self, other: &PyPose, lam: f64) -> PyResult<PyPose> {
        Ok(PyPose {
            inner: core::interpolate_pose(&self.inner, &other.inner, lam).map_err(err)?,
        })
    }
}

/// The loop state: rgb (H,W,3), disparity (H,W), mask (H,W) and the camera.
#[pyclass(name = "Frame", from_py_object)]
#[derive(Clone)]
struct PyFrame {
    inner: core::Frame,
}

#[pymethods]
impl PyFrame {
    #[new]
    fn new(
        rgb: PyReadonlyArray3<f64>,
        disparity: PyReadonlyArray2<f64>,
        mask: PyReadonlyArray2<u8>,
        pose: &PyPose,
        intrinsics: &PyIntrinsics,
    ) -> PyResult<Self> {
        Ok(PyFrame {
            inner: core::Frame::new(
                rgb.as_array().to_owned(),
                disparity_from(&disparity)?,
                mask_from(&mask)?,
                pose.inner,
                intrinsics.inner.clone(),
            )
            .map_err(err)?,
        })
    }

    #[getter]
    fn rgb<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.inner.rgb.clone().into_pyarray(py)
    }

    #[getter]
    fn disparity<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<f64>> {
        self.inner.disparity.data.clone().into_pyarray(py)
    }

    #[getter]
    fn mask<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<u8>> {
        self.inner.mask.data.clone().into_pyarray(py)
    }

    #[getter]
    fn pose(&self) -> PyPose {
        PyPose { inner: self.inner.pose }
    }

    #[getter]
    fn intrinsics(&self) -> PyIntrinsics {
        PyIntrinsics { inner: self.inner.intrinsics.clone() }
    }
}

/// Heuristic view controller; owns its smoothed state.
#[pyclass(name = "Autopilot")]
struct PyAutopilot {
    config: core::AutopilotConfig,
    state: core::AutopilotState,
}

#[pymethods]
impl PyAutopilot {
    #[new]
    #[pyo3(signature = (
        pose,
        sky_threshold = 0.05,
        near_threshold = 0.5,
        target_sky_fraction = 0.30,
        near_fraction_limit = 0.20,
        smoothing = 0.05,
        step_distance = 0.1,
        meander_amplitude = None,
        meander_period = 200.0,
        meander_phase = 0.0,
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        pose: &PyPose,
        sky_threshold: f64,
        near_threshold: f64,
        target_sky_fraction: f64,
        near_fraction_limit: f64,
        smoothing: f64,
        step_distance: f64,
        meander_amplitude: Option<f64>,
        meander_period: f64,
        meander_phase: f64,
    ) -> PyResult<Self> {
        let config = core::AutopilotConfig {
            sky_threshold,
            near_threshold,
            target_sky_fraction,
            near_fraction_limit,
            smoothing,
            step_distance,
            meander: meander_amplitude.map(|amplitude| core::MeanderConfig {
                amplitude,
                period: meander_period,
                phase: meander_phase,
            }),
        };
        config.validate().map_err(err)?;
        Ok(PyAutopilot { config, state: core::AutopilotState::from_pose(&pose.inner) })
    }

    /// Advance one step: consumes the current frame's disparity and returns
    /// the next camera pose.
    fn next(&mut self, frame: &PyFrame) -> PyResult<PyPose> {
        let (state, pose) = core::next_pose(&self.state, &frame.inner, &self.config).map_err(err)?;
        self.state = state;
        Ok(PyPose { inner: pose })
    }

    #[getter]
    fn look<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        let l = self.state.look();
        ndarray::Array1::from_vec(vec![l.x, l.y, l.z]).into_pyarray(py)
    }

    #[getter]
    fn move_dir<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        let m = self.state.move_dir();
        ndarray::Array1::from_vec(vec![m.x, m.y, m.z]).into_pyarray(py)
    }
}

/// Render a frame into a new camera; returns (rgb, disparity, mask).
#[pyfunction]
#[pyo3(signature = (frame, pose, intrinsics, alpha = 0.3))]
fn render<'py>(
    py: Python<'py>,
    frame: &PyFrame,
    pose: &PyPose,
    intrinsics: &PyIntrinsics,
    alpha: f64,
) -> PyResult<(
    Bound<'py, PyArray3<f64>>,
    Bound<'py, PyArray2<f64>>,
    Bound<'py, PyArray2<u8>>,
)> {
    let cfg = core::RendererConfig { alpha, ..Default::default() };
    let out = core::render(&frame.inner, &pose.inner, &intrinsics.inner, &cfg).map_err(err)?;
    Ok((
        out.rgb.into_pyarray(py),
        out.disparity.data.into_pyarray(py),
        out.mask.data.into_pyarray(py),
    ))
}

/// Sobel discontinuity mask of a disparity map.
#[pyfunction]
fn discontinuity_mask<'py>(
    py: Python<'py>,
    disparity: PyReadonlyArray2<f64>,
    alpha: f64,
) -> PyResult<Bound<'py, PyArray2<u8>>> {
    let d = disparity_from(&disparity)?;
    Ok(core::discontinuity_mask(&d, alpha).data.into_pyarray(py))
}

/// One render-refine-ground iteration; returns (frame, gamma, fill_fraction).
#[pyfunction]
#[pyo3(signature = (frame, pose, intrinsics, refiner = "inpaint", grounding = true, alpha = 0.3))]
fn step(
    frame: &PyFrame,
    pose: &PyPose,
    intrinsics: &PyIntrinsics,
    refiner: &str,
    grounding: bool,
    alpha: f64,
) -> PyResult<(PyFrame, f64, f64)> {
    let cfg = engine::EngineConfig {
        grounding_enabled: grounding,
        renderer: core::RendererConfig { alpha, ..Default::default() },
        steps: 1,
    };
    let r = parse_refiner(refiner)?;
    let (next, diag) =
        engine::step(&frame.inner, &pose.inner, &intrinsics.inner, &cfg, r.as_ref()).map_err(err)?;
    Ok((PyFrame { inner: next }, diag.gamma, diag.fill_fraction))
}

/// Run the loop along a scripted pose list (frame 0's pose first); returns
/// (frames, diagnostics) where diagnostics rows are (step, gamma, fill).
#[pyfunction]
#[pyo3(signature = (frame, poses, refiner = "inpaint", grounding = true, alpha = 0.3))]
fn generate(
    frame: &PyFrame,
    poses: Vec<PyPose>,
    refiner: &str,
    grounding: bool,
    alpha: f64,
) -> PyResult<(Vec<PyFrame>, Vec<(usize, f64, f64)>)> {
    let entries: Vec<core::TrajectoryEntry> = poses
        .iter()
        .enumerate()
        .map(|(i, p)| core::TrajectoryEntry {
            frame_id: i as i64,
            intrinsics: frame.inner.intrinsics.clone(),
            pose: p.inner,
        })
        .collect();
    let traj = core::Trajectory::new(entries).map_err(err)?;
    let cfg = engine::EngineConfig {
        grounding_enabled: grounding,
        renderer: core::RendererConfig { alpha, ..Default::default() },
        steps: traj.len() - 1,
    };
    let r = parse_refiner(refiner)?;
    let seq = engine::generate(
        frame.inner.clone(),
        engine::PoseSource::Scripted(&traj),
        &cfg,
        r.as_ref(),
    )
    .map_err(err)?;
    if let Some(abort) = seq.abort {
        return Err(err(abort.error));
    }
    Ok((
        seq.frames.into_iter().map(|f| PyFrame { inner: f }).collect(),
        seq.diagnostics.iter().map(|d| (d.step, d.gamma, d.fill_fraction)).collect(),
    ))
}

/// Geometry-aware in-betweens between two frames.
#[pyfunction]
#[pyo3(signature = (frame_a, frame_b, n, alpha = 0.3))]
fn interpolate_frames(
    frame_a: &PyFrame,
    frame_b: &PyFrame,
    n: usize,
    alpha: f64,
) -> PyResult<Vec<PyFrame>> {
    let rcfg = core::RendererConfig { alpha, ..Default::default() };
    let mids = engine::interpolate_frames(
        &frame_a.inner,
        &frame_b.inner,
        n,
        &rcfg,
        &core::InpaintConfig::default(),
    )
    .map_err(err)?;
    Ok(mids.into_iter().map(|f| PyFrame { inner: f }).collect())
}

/// Least-squares scale/shift of raw disparity against keypoints (n,3) in
/// camera coordinates; returns (a, b).
#[pyfunction]
fn fit_scale_shift(
    disparity: PyReadonlyArray2<f64>,
    points: PyReadonlyArray2<f64>,
    intrinsics: &PyIntrinsics,
) -> PyResult<(f64, f64)> {
    let d = disparity_from(&disparity)?;
    let pts = points.as_array();
    if pts.ncols() != 3 {
        return Err(PyValueError::new_err("points must be (n, 3)"));
    }
    let set = core::KeypointSet::new(
        pts.rows()
            .into_iter()
            .map(|r| nalgebra::Vector3::new(r[0], r[1], r[2]))
            .collect(),
    )
    .map_err(err)?;
    let s = core::fit_scale_shift(&d, &set, &intrinsics.inner).map_err(err)?;
    Ok((s.a, s.b))
}

/// Pointwise a*d + b with the positivity floor.
#[pyfunction]
fn apply_scale_shift<'py>(
    py: Python<'py>,
    disparity: PyReadonlyArray2<f64>,
    a: f64,
    b: f64,
) -> PyResult<Bound<'py, PyArray2<f64>>> {
    let d = disparity_from(&disparity)?;
    Ok(core::apply_scale_shift(&d, &core::ScaleShift { a, b }).data.into_pyarray(py))
}

/// Log-space grounding of refined disparity to the rendered range; returns
/// (gamma, grounded).
#[pyfunction]
fn ground_disparity<'py>(
    py: Python<'py>,
    refined: PyReadonlyArray2<f64>,
    rendered: PyReadonlyArray2<f64>,
    mask: PyReadonlyArray2<u8>,
) -> PyResult<(f64, Bound<'py, PyArray2<f64>>)> {
    let g = core::ground_disparity(
        &disparity_from(&refined)?,
        &disparity_from(&rendered)?,
        &mask_from(&mask)?,
    )
    .map_err(err)?;
    Ok((g.gamma, g.grounded.data.into_pyarray(py)))
}

/// Harmonic hole filling; returns (rgb, disparity).
#[pyfunction]
#[pyo3(signature = (rgb, disparity, mask, max_iterations = 5000, tol = 1e-6))]
fn inpaint<'py>(
    py: Python<'py>,
    rgb: PyReadonlyArray3<f64>,
    disparity: PyReadonlyArray2<f64>,
    mask: PyReadonlyArray2<u8>,
    max_iterations: usize,
    tol: f64,
) -> PyResult<(Bound<'py, PyArray3<f64>>, Bound<'py, PyArray2<f64>>)> {
    let filler = refine::Inpaint {
        config: core::InpaintConfig { max_iterations, convergence_tol: tol },
    };
    let (out_rgb, out_d) = filler
        .refine(&rgb.as_array().to_owned(), &disparity_from(&disparity)?, &mask_from(&mask)?)
        .map_err(err)?;
    Ok((out_rgb.into_pyarray(py), out_d.data.into_pyarray(py)))
}

/// Sky/near classification; returns (sky_fraction, near_fraction).
#[pyfunction]
#[pyo3(signature = (disparity, sky_threshold = 0.05, near_threshold = 0.5))]
fn classify(
    disparity: PyReadonlyArray2<f64>,
    sky_threshold: f64,
    near_threshold: f64,
) -> PyResult<(f64, f64)> {
    let cfg = core::AutopilotConfig { sky_threshold, near_threshold, ..Default::default() };
    let c = core::classify(&disparity_from(&disparity)?, &cfg);
    Ok((c.sky_fraction, c.near_fraction))
}

/// Letterbox detection; returns (x0, y0, x1, y1, adjusted_intrinsics).
#[pyfunction]
#[pyo3(signature = (rgb, intrinsics, luma_threshold = 16.0 / 255.0, min_band = 4))]
fn detect_letterbox(
    rgb: PyReadonlyArray3<f64>,
    intrinsics: &PyIntrinsics,
    luma_threshold: f64,
    min_band: usize,
) -> PyResult<(usize, usize, usize, usize, PyIntrinsics)> {
    let (rect, k) = core::detect_letterbox(
        &rgb.as_array().to_owned(),
        &intrinsics.inner,
        luma_threshold,
        min_band,
    )
    .map_err(err)?;
    Ok((rect.x0, rect.y0, rect.x1, rect.y1, PyIntrinsics { inner: k }))
}

/// Valid subsampling strides for a pose list under a target speed band.
#[pyfunction]
fn normalize_speed(poses: Vec<PyPose>, lo: f64, hi: f64) -> PyResult<Vec<usize>> {
    let k = core::Intrinsics::new(1.0, 1.0, 0.0, 0.0, 3, 3).map_err(err)?;
    let entries = poses
        .iter()
        .enumerate()
        .map(|(i, p)| core::TrajectoryEntry {
            frame_id: i as i64,
            intrinsics: k.clone(),
            pose: p.inner,
        })
        .collect();
    let traj = core::Trajectory::new(entries).map_err(err)?;
    core::normalize_speed(&traj, lo, hi).map_err(err)
}

/// Fraction of a frame's content still visible from a future pose.
#[pyfunction]
fn visibility_fraction(frame: &PyFrame, pose: &PyPose, intrinsics: &PyIntrinsics) -> f64 {
    core::visibility_fraction(&frame.inner, &pose.inner, &intrinsics.inner)
}

/// Mean squared error between two images.
#[pyfunction]
fn mse(a: PyReadonlyArray3<f64>, b: PyReadonlyArray3<f64>) -> PyResult<f64> {
    core::mse(&a.as_array().to_owned(), &b.as_array().to_owned()).map_err(err)
}

/// Sample mean and covariance of embeddings (n, m); returns (mu, sigma).
#[pyfunction]
fn gaussian_stats<'py>(
    py: Python<'py>,
    embeddings: PyReadonlyArray2<f64>,
) -> PyResult<(Bound<'py, PyArray1<f64>>, Bound<'py, PyArray2<f64>>)> {
    let e = core::EmbeddingSequence::new(embeddings.as_array().to_owned()).map_err(err)?;
    let s = core::gaussian_stats(&e).map_err(err)?;
    let m = s.mu.len();
    let mu = ndarray::Array1::from_vec(s.mu.iter().copied().collect());
    let sigma = ndarray::Array2::from_shape_fn((m, m), |(i, j)| s.sigma[(i, j)]);
    Ok((mu.into_pyarray(py), sigma.into_pyarray(py)))
}

fn stats_from(
    mu: &PyReadonlyArray1<f64>,
    sigma: &PyReadonlyArray2<f64>,
) -> PyResult<core::GaussianStats> {
    let mu_v = nalgebra::DVector::from_vec(mu.as_array().to_vec());
    let s = sigma.as_array();
    let (r, c) = s.dim();
    let sigma_m = nalgebra::DMatrix::from_fn(r, c, |i, j| s[[i, j]]);
    core::GaussianStats::new(mu_v, sigma_m).map_err(err)
}

/// Squared Fréchet distance between two Gaussian summaries.
#[pyfunction]
fn frechet_distance(
    mu_a: PyReadonlyArray1<f64>,
    sigma_a: PyReadonlyArray2<f64>,
    mu_b: PyReadonlyArray1<f64>,
    sigma_b: PyReadonlyArray2<f64>,
) -> PyResult<f64> {
    core::frechet_distance(&stats_from(&mu_a, &sigma_a)?, &stats_from(&mu_b, &sigma_b)?)
        .map_err(err)
}

/// Fréchet distance of the window (t - w/2, t + w/2] against a reference.
#[pyfunction]
fn sliding_fid(
    embeddings: PyReadonlyArray2<f64>,
    mu: PyReadonlyArray1<f64>,
    sigma: PyReadonlyArray2<f64>,
    window: usize,
    t: usize,
) -> PyResult<f64> {
    let e = core::EmbeddingSequence::new(embeddings.as_array().to_owned()).map_err(err)?;
    let reference = stats_from(&mu, &sigma)?;
    let spec = core::WindowSpec::new(window, t).map_err(err)?;
    core::sliding_fid(&e, &reference, &spec).map_err(err)
}

#[pyfunction]
fn read_pfm<'py>(py: Python<'py>, path: PathBuf) -> PyResult<Bound<'py, PyArray2<f64>>> {
    Ok(core::io::read_pfm(&path).map_err(err)?.into_pyarray(py))
}

#[pyfunction]
fn write_pfm(path: PathBuf, map: PyReadonlyArray2<f64>) -> PyResult<()> {
    core::io::write_pfm(&path, &map.as_array().to_owned()).map_err(err)
}

#[pymodule]
fn flyover(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyIntrinsics>()?;
    m.add_class::<PyPose>()?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyAutopilot>()?;
    m.add_function(wrap_pyfunction!(render, m)?)?;
    m.add_function(wrap_pyfunction!(discontinuity_mask, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate_frames, m)?)?;
    m.add_function(wrap_pyfunction!(fit_scale_shift, m)?)?;
    m.add_function(wrap_pyfunction!(apply_scale_shift, m)?)?;
    m.add_function(wrap_pyfunction!(ground_disparity, m)?)?;
    m.add_function(wrap_pyfunction!(inpaint, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(detect_letterbox, m)?)?;
    m.add_function(wrap_pyfunction!(normalize_speed, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(mse, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_stats, m)?)?;
    m.add_function(wrap_pyfunction!(frechet_distance, m)?)?;
    m.add_function(wrap_pyfunction!(sliding_fid, m)?)?;
    m.add_function(wrap_pyfunction!(read_pfm, m)?)?;
    m.add_function(wrap_pyfunction!(write_pfm, m)?)?;
    Ok(())
}
