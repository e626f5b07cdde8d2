//! The repeat loop: render the current frame into the next camera, refine the
//! holes, re-ground the disparity scale, and carry the result forward. Also
//! hosts geometry-aware frame interpolation for presentation output.

use crate::align::ground_disparity;
use crate::autopilot::{next_pose, AutopilotConfig, AutopilotState};
use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Frame, Mask};
use crate::geometry::{interpolate_pose, Intrinsics, Pose, Trajectory};
use crate::refine::{Inpaint, InpaintConfig, Refiner};
use crate::renderer::{render, RendererConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub grounding_enabled: bool,
    pub renderer: RendererConfig,
    /// Number of generation iterations T; the output holds T + 1 frames.
    pub steps: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { grounding_enabled: true, renderer: RendererConfig::default(), steps: 0 }
    }
}

/// Per-step bookkeeping: the grounding scale applied (1 when grounding is
/// off) and the fraction of pixels the refiner had to fill.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub step: usize,
    pub gamma: f64,
    pub fill_fraction: f64,
}

/// Error that stopped a generation run mid-sequence.
#[derive(Debug)]
pub struct Abort {
    /// Index of the frame that failed to generate.
    pub step: usize,
    pub error: Error,
}

/// Output of a generation run. `frames[0]` is the input frame; when a step
/// fails the frames generated so far are kept and `abort` records the index.
#[derive(Debug)]
pub struct GeneratedSequence {
    pub frames: Vec<Frame>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub abort: Option<Abort>,
}

/// Where the next camera comes from: a pre-scripted trajectory or the
/// autopilot controller driven by the current frame's disparity.
pub enum PoseSource<'a> {
    Scripted(&'a Trajectory),
    Autopilot { config: AutopilotConfig, state: AutopilotState },
}

/// One render-refine-ground iteration.
///
/// The output frame's mask is derived from the refined disparity: refiners
/// that fill every hole yield an all-ones mask, while the passthrough refiner
/// keeps the rendered mask (holes stay holes in the ablation mode).
pub fn step(
    frame: &Frame,
    p_next: &Pose,
    k_next: &Intrinsics,
    cfg: &EngineConfig,
    refiner: &dyn Refiner,
) -> Result<(Frame, StepDiagnostics)> {
    let rendered = render(frame, p_next, k_next, &cfg.renderer)?;
    let valid = rendered.mask.count_ones();
    if valid == 0 {
        return Err(Error::EmptyMask);
    }
    let total = (k_next.width * k_next.height) as f64;
    let fill_fraction = 1.0 - valid as f64 / total;

    let (rgb, refined) = refiner.refine(&rendered.rgb, &rendered.disparity, &rendered.mask)?;
    if rgb.dim() != (k_next.height, k_next.width, 3) || refined.data.dim() != (k_next.height, k_next.width)
    {
        return Err(Error::ContractViolation(format!(
            "refiner changed dimensions to {:?} / {:?}",
            rgb.dim(),
            refined.data.dim()
        )));
    }

    let (gamma, disparity) = if cfg.grounding_enabled {
        let g = ground_disparity(&refined, &rendered.disparity, &rendered.mask)?;
        (g.gamma, g.grounded)
    } else {
        (1.0, refined)
    };

    let mask = Mask {
        data: disparity.data.mapv(|d| (d > 0.0) as u8),
    };
    let next = Frame {
        rgb,
        disparity,
        mask,
        pose: *p_next,
        intrinsics: k_next.clone(),
    };
    Ok((next, StepDiagnostics { step: 0, gamma, fill_fraction }))
}

/// Run the loop for `cfg.steps` iterations, collecting every frame.
pub fn generate(
    frame0: Frame,
    poses: PoseSource,
    cfg: &EngineConfig,
    refiner: &dyn Refiner,
) -> Result<GeneratedSequence> {
    generate_with(frame0, poses, cfg, refiner, true, |_, _, _| Ok(()))
}

/// Streaming variant: `on_frame(index, frame, diagnostics)` fires for the
/// input frame (index 0, no diagnostics) and once per generated frame. With
/// `keep_frames` off only the callback sees intermediate frames, which keeps
/// long runs at constant memory.
pub fn generate_with(
    frame0: Frame,
    poses: PoseSource,
    cfg: &EngineConfig,
    refiner: &dyn Refiner,
    keep_frames: bool,
    mut on_frame: impl FnMut(usize, &Frame, Option<&StepDiagnostics>) -> Result<()>,
) -> Result<GeneratedSequence> {
    let (mut autopilot, scripted) = match poses {
        PoseSource::Autopilot { config, state } => (Some((config, state)), None),
        PoseSource::Scripted(traj) => (None, Some(traj)),
    };
    if let Some(traj) = scripted {
        if traj.len() < cfg.steps + 1 {
            return Err(Error::TrajectoryTooShort { got: traj.len(), needed: cfg.steps + 1 });
        }
    }

    on_frame(0, &frame0, None)?;
    let mut frames = Vec::new();
    let mut diagnostics = Vec::with_capacity(cfg.steps);
    let mut abort = None;
    let mut current = frame0;
    for t in 1..=cfg.steps {
        let (p_next, k_next) = match (&mut autopilot, scripted) {
            (Some((config, state)), _) => {
                let (new_state, pose) = match next_pose(state, &current, config) {
                    Ok(v) => v,
                    Err(error) => {
                        abort = Some(Abort { step: t, error });
                        break;
                    }
                };
                *state = new_state;
                (pose, current.intrinsics.clone())
            }
            (None, Some(traj)) => {
                let entry = &traj.entries()[t];
                (entry.pose, entry.intrinsics.clone())
            }
            (None, None) => unreachable!(),
        };

        match step(&current, &p_next, &k_next, cfg, refiner) {
            Ok((next, mut diag)) => {
                diag.step = t;
                on_frame(t, &next, Some(&diag))?;
                diagnostics.push(diag);
                if keep_frames {
                    frames.push(std::mem::replace(&mut current, next));
                } else {
                    current = next;
                }
            }
            Err(error) => {
                abort = Some(Abort { step: t, error });
                break;
            }
        }
    }
    frames.push(current);
    Ok(GeneratedSequence { frames, diagnostics, abort })
}

/// Geometry-aware in-betweening: for each k in 1..=n, re-render both endpoint
/// frames from the pose a fraction `k/(n+1)` of the way along, blend where
/// both cover, take the covering frame alone where only one does, and fill
/// the rest by harmonic inpainting. Outputs are presentation-only and never
/// re-enter the loop.
pub fn interpolate_frames(
    frame_a: &Frame,
    frame_b: &Frame,
    n: usize,
    cfg: &RendererConfig,
    inpaint: &InpaintConfig,
) -> Result<Vec<Frame>> {
    let mut out = Vec::with_capacity(n);
    let k = &frame_a.intrinsics;
    let (h, w) = (k.height, k.width);
    for i in 1..=n {
        let lambda = i as f64 / (n + 1) as f64;
        let pose = interpolate_pose(&frame_a.pose, &frame_b.pose, lambda)?;
        let ra = render(frame_a, &pose, k, cfg)?;
        let rb = render(frame_b, &pose, k, cfg)?;

        let mut rgb = ndarray::Array3::<f64>::zeros((h, w, 3));
        let mut disparity = ndarray::Array2::<f64>::zeros((h, w));
        let mut mask = ndarray::Array2::<u8>::zeros((h, w));
        for y in 0..h {
            for x in 0..w {
                match (ra.mask.data[[y, x]], rb.mask.data[[y, x]]) {
                    (1, 1) => {
                        for c in 0..3 {
                            let a = ra.rgb[[y, x, c]];
                            let b = rb.rgb[[y, x, c]];
                            rgb[[y, x, c]] = a + lambda * (b - a);
                        }
                        let da = ra.disparity.data[[y, x]];
                        let db = rb.disparity.data[[y, x]];
                        disparity[[y, x]] = da + lambda * (db - da);
                        mask[[y, x]] = 1;
                    }
                    (1, 0) => {
                        for c in 0..3 {
                            rgb[[y, x, c]] = ra.rgb[[y, x, c]];
                        }
                        disparity[[y, x]] = ra.disparity.data[[y, x]];
                        mask[[y, x]] = 1;
                    }
                    (0, 1) => {
                        for c in 0..3 {
                            rgb[[y, x, c]] = rb.rgb[[y, x, c]];
                        }
                        disparity[[y, x]] = rb.disparity.data[[y, x]];
                        mask[[y, x]] = 1;
                    }
                    _ => {}
                }
            }
        }

        let mask = Mask { data: mask };
        let covered = mask.count_ones();
        let frame = if covered == 0 {
            // Endpoints share nothing with this pose; emit an empty frame
            // rather than fabricating content.
            Frame {
                rgb,
                disparity: DisparityMap { data: disparity },
                mask,
                pose,
                intrinsics: k.clone(),
            }
        } else if covered < h * w {
            let filler = Inpaint { config: *inpaint };
            let (rgb, disparity) =
                filler.refine(&rgb, &DisparityMap { data: disparity }, &mask)?;
            Frame { rgb, disparity, mask: Mask::ones(h, w), pose, intrinsics: k.clone() }
        } else {
            Frame {
                rgb,
                disparity: DisparityMap { data: disparity },
                mask,
                pose,
                intrinsics: k.clone(),
            }
        };
        out.push(frame);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TrajectoryEntry;
    use crate::refine::{Passthrough, ScaleDisparity};
    use crate::renderer::frame_discontinuity_mask;
    use crate::synth;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix3, Vector3};

    fn static_trajectory(frame: &Frame, len: usize) -> Trajectory {
        Trajectory::new(
            (0..len)
                .map(|i| TrajectoryEntry {
                    frame_id: i as i64,
                    intrinsics: frame.intrinsics.clone(),
                    pose: frame.pose,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_step_with_passthrough() {
        let f = synth::textured_frame(20, 26, 77);
        let cfg = EngineConfig { steps: 1, ..Default::default() };
        let (next, diag) = step(&f, &f.pose, &f.intrinsics, &cfg, &Passthrough).unwrap();
        // Equal to the render identity output: mask is the discontinuity cut,
        // rgb/disparity preserved on it, gamma exactly 1.
        assert_eq!(diag.gamma, 1.0);
        let disc = frame_discontinuity_mask(&f, &cfg.renderer);
        assert_eq!(next.mask.data, disc.and(&f.mask).data);
        for ((y, x), &m) in next.mask.data.indexed_iter() {
            if m == 1 {
                assert_eq!(next.disparity.data[[y, x]], f.disparity.data[[y, x]]);
            }
        }
    }

    #[test]
    fn grounding_cancels_a_pure_scale_refiner() {
        let f = synth::constant_frame(16, 16, [0.4, 0.4, 0.4], 0.5);
        let cfg = EngineConfig { steps: 1, ..Default::default() };
        let (next, diag) =
            step(&f, &f.pose, &f.intrinsics, &cfg, &ScaleDisparity { factor: 2.0 }).unwrap();
        assert_relative_eq!(diag.gamma, 0.5, epsilon = 1e-12);
        for ((y, x), &m) in next.mask.data.indexed_iter() {
            if m == 1 {
                assert_relative_eq!(
                    next.disparity.data[[y, x]],
                    f.disparity.data[[y, x]],
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn opposite_pose_is_empty_mask() {
        let f = synth::plane_frame(12, 12, 4.0);
        let flip = Pose::new(
            Matrix3::from_columns(&[-Vector3::x(), Vector3::y(), -Vector3::z()]),
            Vector3::zeros(),
        )
        .unwrap();
        let cfg = EngineConfig::default();
        assert!(matches!(
            step(&f, &flip, &f.intrinsics, &cfg, &Passthrough),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn zero_steps_returns_only_the_input() {
        let f = synth::constant_frame(8, 8, [0.2, 0.2, 0.2], 1.0);
        let traj = static_trajectory(&f, 1);
        let cfg = EngineConfig { steps: 0, ..Default::default() };
        let seq = generate(f.clone(), PoseSource::Scripted(&traj), &cfg, &Passthrough).unwrap();
        assert_eq!(seq.frames.len(), 1);
        assert_eq!(seq.frames[0], f);
        assert!(seq.abort.is_none());
    }

    #[test]
    fn static_loop_with_passthrough_is_a_fixed_point() {
        // Constant disparity keeps the discontinuity mask full, so frames
        // 1..5 are bitwise identical to frame 1.
        let f = synth::constant_frame(12, 14, [0.3, 0.6, 0.9], 0.8);
        let traj = static_trajectory(&f, 6);
        let cfg = EngineConfig { steps: 5, ..Default::default() };
        let seq = generate(f, PoseSource::Scripted(&traj), &cfg, &Passthrough).unwrap();
        assert_eq!(seq.frames.len(), 6);
        for t in 2..=5 {
            assert_eq!(seq.frames[t], seq.frames[1]);
        }
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let f = synth::constant_frame(8, 8, [0.2, 0.2, 0.2], 1.0);
        let traj = static_trajectory(&f, 3);
        let cfg = EngineConfig { steps: 5, ..Default::default() };
        assert!(matches!(
            generate(f, PoseSource::Scripted(&traj), &cfg, &Passthrough),
            Err(Error::TrajectoryTooShort { got: 3, needed: 6 })
        ));
    }

    #[test]
    fn mid_sequence_empty_mask_aborts_with_partial_output() {
        let f = synth::plane_frame(12, 12, 4.0);
        let flip = Pose::new(
            Matrix3::from_columns(&[-Vector3::x(), Vector3::y(), -Vector3::z()]),
            Vector3::zeros(),
        )
        .unwrap();
        let entries = vec![
            TrajectoryEntry { frame_id: 0, intrinsics: f.intrinsics.clone(), pose: f.pose },
            TrajectoryEntry { frame_id: 1, intrinsics: f.intrinsics.clone(), pose: f.pose },
            TrajectoryEntry { frame_id: 2, intrinsics: f.intrinsics.clone(), pose: flip },
            TrajectoryEntry { frame_id: 3, intrinsics: f.intrinsics.clone(), pose: f.pose },
        ];
        let traj = Trajectory::new(entries).unwrap();
        let cfg = EngineConfig { steps: 3, ..Default::default() };
        let seq = generate(f, PoseSource::Scripted(&traj), &cfg, &Passthrough).unwrap();
        let abort = seq.abort.expect("must abort");
        assert_eq!(abort.step, 2);
        assert!(matches!(abort.error, Error::EmptyMask));
        assert_eq!(seq.frames.len(), 2); // input + step 1
    }

    #[test]
    fn markov_restart_is_bit_exact() {
        // Run 6 steps with gentle forward motion, then restart from frame 3
        // with the tail trajectory; frames 4..6 must match bitwise.
        let f = synth::textured_frame(16, 20, 3);
        let entries: Vec<TrajectoryEntry> = (0..7)
            .map(|i| TrajectoryEntry {
                frame_id: i as i64,
                intrinsics: f.intrinsics.clone(),
                pose: Pose::new(
                    Matrix3::identity(),
                    Vector3::new(0.0, 0.0, -0.02 * i as f64),
                )
                .unwrap(),
            })
            .collect();
        let traj = Trajectory::new(entries.clone()).unwrap();
        let cfg = EngineConfig { steps: 6, ..Default::default() };
        let full = generate(f.clone(), PoseSource::Scripted(&traj), &cfg, &Passthrough).unwrap();
        assert!(full.abort.is_none());

        let tail = Trajectory::new(entries[3..].to_vec()).unwrap();
        let cfg_tail = EngineConfig { steps: 3, ..Default::default() };
        let resumed = generate(
            full.frames[3].clone(),
            PoseSource::Scripted(&tail),
            &cfg_tail,
            &Passthrough,
        )
        .unwrap();
        assert!(resumed.abort.is_none());
        for i in 0..=3 {
            assert_eq!(resumed.frames[i], full.frames[3 + i]);
        }
    }

    #[test]
    fn streaming_matches_collected() {
        let f = synth::constant_frame(10, 10, [0.5, 0.5, 0.5], 0.7);
        let traj = static_trajectory(&f, 4);
        let cfg = EngineConfig { steps: 3, ..Default::default() };
        let collected =
            generate(f.clone(), PoseSource::Scripted(&traj), &cfg, &Passthrough).unwrap();
        let mut seen = Vec::new();
        let streamed = generate_with(
            f,
            PoseSource::Scripted(&traj),
            &cfg,
            &Passthrough,
            false,
            |i, frame, _| {
                seen.push((i, frame.clone()));
                Ok(())
            },
        )
        .unwrap();
        assert_eq!(streamed.frames.len(), 1);
        assert_eq!(seen.len(), 4);
        for (i, frame) in &seen {
            assert_eq!(frame, &collected.frames[*i]);
        }
    }

    #[test]
    fn interpolation_count_and_identity_blend() {
        let f = synth::textured_frame(12, 16, 21);
        let cfg = RendererConfig::default();
        let inp = InpaintConfig::default();
        assert!(interpolate_frames(&f, &f, 0, &cfg, &inp).unwrap().is_empty());

        let mids = interpolate_frames(&f, &f, 1, &cfg, &inp).unwrap();
        assert_eq!(mids.len(), 1);
        // Identical endpoints: values reproduced exactly on the rendered mask.
        let identity = render(&f, &f.pose, &f.intrinsics, &cfg).unwrap();
        for ((y, x), &m) in identity.mask.data.indexed_iter() {
            if m == 1 {
                for c in 0..3 {
                    assert_eq!(mids[0].rgb[[y, x, c]], f.rgb[[y, x, c]]);
                }
                assert_eq!(mids[0].disparity.data[[y, x]], f.disparity.data[[y, x]]);
            }
        }
    }

    #[test]
    fn interpolation_blends_constants_at_half() {
        let a = synth::constant_frame(8, 8, [0.0, 0.0, 0.0], 0.5);
        let mut b = synth::constant_frame(8, 8, [1.0, 1.0, 1.0], 0.5);
        b.rgb.fill(1.0);
        let mids =
            interpolate_frames(&a, &b, 1, &RendererConfig::default(), &InpaintConfig::default())
                .unwrap();
        let mid = &mids[0];
        // Full masks, same pose: every pixel is the exact 0.5 blend.
        for v in mid.rgb.iter() {
            assert_eq!(*v, 0.5);
        }
    }
}
