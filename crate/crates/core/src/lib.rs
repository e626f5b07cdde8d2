//! Geometry engine for perpetual view generation from a single RGBD image.
//!
//! The core loop renders an image + disparity pair into a new camera through
//! a per-pixel triangle mesh, refines the uncovered regions with a pluggable
//! refiner, re-grounds the disparity scale so it cannot drift, and repeats
//! for arbitrarily long scripted or autopiloted camera trajectories. Side
//! modules cover disparity alignment against sparse geometry, sequence
//! preprocessing, geometry-aware frame interpolation and windowed Fréchet
//! distance metrics.

pub mod align;
pub mod autopilot;
pub mod engine;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod refine;
pub mod renderer;
pub mod sequence;
pub mod synth;

pub use align::{
    apply_scale_shift, fit_scale_shift, ground_disparity, GroundingResult, KeypointSet,
    ScaleShift, DISPARITY_FLOOR,
};
pub use autopilot::{classify, next_pose, AutopilotConfig, AutopilotState, MeanderConfig};
pub use engine::{
    generate, generate_with, interpolate_frames, step, EngineConfig, GeneratedSequence,
    PoseSource, StepDiagnostics,
};
pub use error::{Error, Result};
pub use frame::{DisparityMap, Frame, Mask};
pub use geometry::{
    interpolate_pose, project, relative_transform, slerp, unproject, Intrinsics, Pose,
    Trajectory, TrajectoryEntry,
};
pub use metrics::{
    frechet_distance, gaussian_stats, mse, sliding_fid, EmbeddingSequence, GaussianStats,
    WindowSpec,
};
pub use refine::{External, Inpaint, InpaintConfig, Passthrough, Refiner, ScaleDisparity};
pub use renderer::{
    build_mesh, discontinuity_mask, render, DepthTest, Mesh, MeshVertex, RenderOutput,
    RendererConfig,
};
pub use sequence::{
    detect_letterbox, normalize_speed, scale_normalize, scene_scale, speed_profile,
    visibility_fraction, CropRect, SpeedProfile,
};
