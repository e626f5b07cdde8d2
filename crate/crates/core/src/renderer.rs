//! Software mesh renderer: converts a frame into a per-pixel triangle mesh
//! and rasterizes rgb, disparity and mask into a target camera.
//!
//! The rasterizer is a z-buffered edge-function scanline renderer with
//! perspective-correct attribute interpolation; depth is interpolated as 1/z,
//! which is linear in screen space. Rendering is sequential and therefore
//! bit-deterministic.
//!
//! Rendering a frame into its own camera takes an exact path: vertex screen
//! positions come straight from the source pixel grid instead of the
//! unproject-transform-project chain, so the output reproduces the input
//! bitwise on valid pixels.

use nalgebra::Vector3;
use ndarray::{Array2, Array3};

use crate::error::{Error, Result};
use crate::frame::{DisparityMap, Frame, Mask};
use crate::geometry::{relative_transform, Intrinsics, Pose};

/// Geometry closer than this camera-space depth is clipped away.
const Z_NEAR: f64 = 1e-6;

/// Depth-test rule. `Less` keeps the earlier (lower-index) triangle on exact
/// ties; `LessEqual` lets the later triangle win.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DepthTest {
    #[default]
    Less,
    LessEqual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RendererConfig {
    /// Threshold on the Sobel gradient magnitude of the disparity map.
    pub alpha: f64,
    /// Normalize disparity to its frame maximum before thresholding, so
    /// `alpha` is scale-free.
    pub normalize_disparity: bool,
    pub depth_test: DepthTest,
}

impl Default for RendererConfig {
    fn default() -> Self {
        RendererConfig { alpha: 0.3, normalize_disparity: true, depth_test: DepthTest::Less }
    }
}

/// Result of rendering a frame into a new camera. Masked-out pixels hold
/// zero rgb and zero disparity; valid pixels hold positive disparity.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderOutput {
    pub rgb: Array3<f64>,
    pub disparity: DisparityMap,
    pub mask: Mask,
}

/// Mask that is 0 exactly where the Sobel gradient magnitude of `d` exceeds
/// `alpha`, 1 elsewhere. Border pixels use replicate padding.
pub fn discontinuity_mask(d: &DisparityMap, alpha: f64) -> Mask {
    sobel_mask(&d.data, None, alpha)
}

/// Mask-aware variant: invalid neighbors are replaced by the center value, so
/// holes do not bleed spurious gradients into adjacent valid pixels.
fn sobel_mask(d: &Array2<f64>, valid: Option<&Array2<u8>>, alpha: f64) -> Mask {
    let (h, w) = d.dim();
    let mut out = Array2::<u8>::from_elem((h, w), 1);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let center = d[[y as usize, x as usize]];
            let at = |dy: isize, dx: isize| -> f64 {
                let ys = (y + dy).clamp(0, h as isize - 1) as usize;
                let xs = (x + dx).clamp(0, w as isize - 1) as usize;
                match valid {
                    Some(v) if v[[ys, xs]] == 0 => center,
                    _ => d[[ys, xs]],
                }
            };
            let gx = (at(-1, 1) + 2.0 * at(0, 1) + at(1, 1))
                - (at(-1, -1) + 2.0 * at(0, -1) + at(1, -1));
            let gy = (at(1, -1) + 2.0 * at(1, 0) + at(1, 1))
                - (at(-1, -1) + 2.0 * at(-1, 0) + at(-1, 1));
            if (gx * gx + gy * gy).sqrt() > alpha {
                out[[y as usize, x as usize]] = 0;
            }
        }
    }
    Mask { data: out }
}

#[derive(Debug, Clone, Copy)]
pub struct MeshVertex {
    /// Position in the mesh's own coordinate frame (camera coordinates for
    /// meshes built from a frame).
    pub position: Vector3<f64>,
    pub rgb: [f64; 3],
    /// Validity texture value carried through interpolation.
    pub mask: f64,
}

/// Provenance of a mesh built from an image grid; enables the exact
/// same-camera rasterization path.
#[derive(Debug, Clone)]
pub struct MeshSource {
    pub intrinsics: Intrinsics,
    /// Per-vertex `(u, v, disparity)` of the originating pixel.
    pub pixels: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<MeshVertex>,
    pub triangles: Vec<[u32; 3]>,
    pub source: Option<MeshSource>,
}

/// Convert a frame into a triangle mesh: each pixel is a vertex unprojected
/// through the intrinsics, each quad split along its top-left to bottom-right
/// diagonal. Vertices carry `frame.mask AND discontinuity_mask` as texture.
///
/// Pixels whose disparity is not positive cannot be unprojected: if such a
/// pixel is valid that is an error; if it is masked out (a hole) the
/// triangles touching it are simply omitted.
pub fn build_mesh(frame: &Frame, cfg: &RendererConfig) -> Result<Mesh> {
    if !(cfg.alpha > 0.0) {
        return Err(Error::InvalidInput(format!(
            "discontinuity threshold alpha must be positive, got {}",
            cfg.alpha
        )));
    }
    let (h, w) = (frame.height(), frame.width());
    let disc = frame_discontinuity_mask(frame, cfg);

    let mut vertices = Vec::with_capacity(h * w);
    let mut pixels = Vec::with_capacity(h * w);
    let mut valid = vec![false; h * w];
    for y in 0..h {
        for x in 0..w {
            let d = frame.disparity.data[[y, x]];
            let m = frame.mask.data[[y, x]];
            if d <= 0.0 && m == 1 {
                return Err(Error::NonPositiveDisparity(d));
            }
            let (u, v) = (x as f64, y as f64);
            let position = if d > 0.0 {
                valid[y * w + x] = true;
                crate::geometry::unproject(&frame.intrinsics, u, v, d)?
            } else {
                Vector3::zeros()
            };
            vertices.push(MeshVertex {
                position,
                rgb: [frame.rgb[[y, x, 0]], frame.rgb[[y, x, 1]], frame.rgb[[y, x, 2]]],
                mask: (m & disc.data[[y, x]]) as f64,
            });
            pixels.push((u, v, d));
        }
    }

    let mut triangles = Vec::with_capacity((h - 1) * (w - 1) * 2);
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let i00 = (y * w + x) as u32;
            let i01 = i00 + 1;
            let i10 = ((y + 1) * w + x) as u32;
            let i11 = i10 + 1;
            let ok = |i: u32| valid[i as usize];
            if ok(i00) && ok(i10) && ok(i11) {
                triangles.push([i00, i10, i11]);
            }
            if ok(i00) && ok(i11) && ok(i01) {
                triangles.push([i00, i11, i01]);
            }
        }
    }

    Ok(Mesh {
        vertices,
        triangles,
        source: Some(MeshSource { intrinsics: frame.intrinsics.clone(), pixels }),
    })
}

/// The discontinuity mask the renderer applies to `frame`, honoring the
/// normalization setting and ignoring gradients into masked-out holes.
pub fn frame_discontinuity_mask(frame: &Frame, cfg: &RendererConfig) -> Mask {
    let max = frame.disparity.max_value();
    if cfg.normalize_disparity && max > 0.0 {
        let normalized = frame.disparity.data.mapv(|d| d / max);
        sobel_mask(&normalized, Some(&frame.mask.data), cfg.alpha)
    } else {
        sobel_mask(&frame.disparity.data, Some(&frame.mask.data), cfg.alpha)
    }
}

/// Render the render step of the generation loop: mesh the frame and
/// rasterize it from `p_dst` / `k_dst`.
pub fn render(
    frame: &Frame,
    p_dst: &Pose,
    k_dst: &Intrinsics,
    cfg: &RendererConfig,
) -> Result<RenderOutput> {
    let mesh = build_mesh(frame, cfg)?;
    let rel = relative_transform(&frame.pose, p_dst);
    Ok(rasterize(&mesh, &rel, k_dst, cfg))
}

#[derive(Clone, Copy)]
struct ScreenVertex {
    x: f64,
    y: f64,
    invz: f64,
    rgb: [f64; 3],
    mask: f64,
}

#[derive(Clone, Copy)]
struct ClipVertex {
    pos: Vector3<f64>,
    rgb: [f64; 3],
    mask: f64,
}

struct Buffers {
    invz: Vec<f64>,
    rgb: Vec<[f64; 3]>,
    mask: Vec<f64>,
    width: usize,
    height: usize,
}

/// Rasterize a mesh through `view` (mapping mesh coordinates into the target
/// camera frame) and intrinsics `k`. Deterministic: identical inputs produce
/// bit-identical outputs.
pub fn rasterize(mesh: &Mesh, view: &Pose, k: &Intrinsics, cfg: &RendererConfig) -> RenderOutput {
    let (h, w) = (k.height, k.width);
    let mut buf = Buffers {
        invz: vec![0.0; h * w],
        rgb: vec![[0.0; 3]; h * w],
        mask: vec![0.0; h * w],
        width: w,
        height: h,
    };

    let exact_source = view.is_identity()
        && mesh.source.as_ref().map(|s| &s.intrinsics == k).unwrap_or(false);

    if exact_source {
        let source = mesh.source.as_ref().unwrap();
        for (tri_idx, tri) in mesh.triangles.iter().enumerate() {
            let sv = tri.map(|i| {
                let (u, v, d) = source.pixels[i as usize];
                let mv = &mesh.vertices[i as usize];
                ScreenVertex { x: u, y: v, invz: d, rgb: mv.rgb, mask: mv.mask }
            });
            raster_triangle(&mut buf, cfg, tri_idx, sv[0], sv[1], sv[2]);
        }
    } else {
        for (tri_idx, tri) in mesh.triangles.iter().enumerate() {
            let cv = tri.map(|i| {
                let mv = &mesh.vertices[i as usize];
                ClipVertex { pos: view.transform(&mv.position), rgb: mv.rgb, mask: mv.mask }
            });
            let inside = cv.iter().filter(|v| v.pos.z >= Z_NEAR).count();
            match inside {
                3 => {
                    let sv = cv.map(|v| to_screen(&v, k));
                    raster_triangle(&mut buf, cfg, tri_idx, sv[0], sv[1], sv[2]);
                }
                1 | 2 => {
                    let poly = clip_near(&cv);
                    for j in 1..poly.len().saturating_sub(1) {
                        raster_triangle(
                            &mut buf,
                            cfg,
                            tri_idx,
                            to_screen(&poly[0], k),
                            to_screen(&poly[j], k),
                            to_screen(&poly[j + 1], k),
                        );
                    }
                }
                _ => {}
            }
        }
    }

    // Compose: threshold the interpolated mask and multiply it in.
    let mut rgb = Array3::<f64>::zeros((h, w, 3));
    let mut disparity = Array2::<f64>::zeros((h, w));
    let mut mask = Array2::<u8>::zeros((h, w));
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if buf.invz[i] > 0.0 && buf.mask[i] >= 0.5 {
                mask[[y, x]] = 1;
                disparity[[y, x]] = buf.invz[i];
                for c in 0..3 {
                    rgb[[y, x, c]] = buf.rgb[i][c];
                }
            }
        }
    }
    RenderOutput { rgb, disparity: DisparityMap { data: disparity }, mask: Mask { data: mask } }
}

fn to_screen(v: &ClipVertex, k: &Intrinsics) -> ScreenVertex {
    let invz = 1.0 / v.pos.z;
    ScreenVertex {
        x: k.fx * (v.pos.x / v.pos.z) + k.cx,
        y: k.fy * (v.pos.y / v.pos.z) + k.cy,
        invz,
        rgb: v.rgb,
        mask: v.mask,
    }
}

/// Sutherland-Hodgman clip of a triangle against `z >= Z_NEAR`; yields a
/// polygon of up to four vertices with attributes lerped in camera space.
fn clip_near(tri: &[ClipVertex; 3]) -> Vec<ClipVertex> {
    let mut out = Vec::with_capacity(4);
    for i in 0..3 {
        let a = &tri[i];
        let b = &tri[(i + 1) % 3];
        let a_in = a.pos.z >= Z_NEAR;
        let b_in = b.pos.z >= Z_NEAR;
        if a_in {
            out.push(*a);
        }
        if a_in != b_in {
            let t = (Z_NEAR - a.pos.z) / (b.pos.z - a.pos.z);
            out.push(ClipVertex {
                pos: a.pos + t * (b.pos - a.pos),
                rgb: [
                    a.rgb[0] + t * (b.rgb[0] - a.rgb[0]),
                    a.rgb[1] + t * (b.rgb[1] - a.rgb[1]),
                    a.rgb[2] + t * (b.rgb[2] - a.rgb[2]),
                ],
                mask: a.mask + t * (b.mask - a.mask),
            });
        }
    }
    out
}

fn raster_triangle(
    buf: &mut Buffers,
    cfg: &RendererConfig,
    _tri_idx: usize,
    v0: ScreenVertex,
    v1: ScreenVertex,
    v2: ScreenVertex,
) {
    // Twice the signed area; dividing edge functions by it makes the
    // barycentric weights winding-independent (no backface culling).
    let area2 = (v1.x - v0.x) * (v2.y - v0.y) - (v1.y - v0.y) * (v2.x - v0.x);
    if area2 == 0.0 || !area2.is_finite() {
        return;
    }

    let xmin = v0.x.min(v1.x).min(v2.x).ceil().max(0.0) as usize;
    let xmax = v0.x.max(v1.x).max(v2.x).floor().min((buf.width - 1) as f64);
    let ymin = v0.y.min(v1.y).min(v2.y).ceil().max(0.0) as usize;
    let ymax = v0.y.max(v1.y).max(v2.y).floor().min((buf.height - 1) as f64);
    if xmax < 0.0 || ymax < 0.0 {
        return;
    }
    let (xmax, ymax) = (xmax as usize, ymax as usize);

    for py in ymin..=ymax {
        for px in xmin..=xmax {
            let (sx, sy) = (px as f64, py as f64);
            let e0 = (v2.x - v1.x) * (sy - v1.y) - (v2.y - v1.y) * (sx - v1.x);
            let e1 = (v0.x - v2.x) * (sy - v2.y) - (v0.y - v2.y) * (sx - v2.x);
            let e2 = (v1.x - v0.x) * (sy - v0.y) - (v1.y - v0.y) * (sx - v0.x);
            let w0 = e0 / area2;
            let w1 = e1 / area2;
            let w2 = e2 / area2;
            if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                continue;
            }
            // 1/z is linear in screen space; attributes interpolate with
            // perspective-corrected weights, which are exact at vertices.
            let invz = w0 * v0.invz + w1 * v1.invz + w2 * v2.invz;
            if invz <= 0.0 {
                continue;
            }
            let i = py * buf.width + px;
            let wins = match cfg.depth_test {
                DepthTest::Less => invz > buf.invz[i],
                DepthTest::LessEqual => invz >= buf.invz[i],
            };
            if !wins {
                continue;
            }
            let l0 = w0 * v0.invz / invz;
            let l1 = w1 * v1.invz / invz;
            let l2 = w2 * v2.invz / invz;
            buf.invz[i] = invz;
            buf.mask[i] = l0 * v0.mask + l1 * v1.mask + l2 * v2.mask;
            for c in 0..3 {
                buf.rgb[i][c] = l0 * v0.rgb[c] + l1 * v1.rgb[c] + l2 * v2.rgb[c];
            }
        }
    }
}
