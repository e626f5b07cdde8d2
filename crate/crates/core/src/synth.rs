//! Deterministic synthetic scenes: flat planes, textured frames and a
//! procedural heightfield terrain. Used by the test suites and handy for
//! demos; nothing here depends on an RNG crate.

use nalgebra::Vector3;
use ndarray::{Array2, Array3};

use crate::frame::{DisparityMap, Frame, Mask};
use crate::geometry::{Intrinsics, Pose};
use crate::renderer::{Mesh, MeshVertex};

/// Default synthetic intrinsics: ~64 degree horizontal field of view with the
/// principal point at the pixel-grid center.
pub fn default_intrinsics(height: usize, width: usize) -> Intrinsics {
    Intrinsics {
        fx: 0.8 * width as f64,
        fy: 0.8 * width as f64,
        cx: (width - 1) as f64 / 2.0,
        cy: (height - 1) as f64 / 2.0,
        width,
        height,
    }
}

/// Full-mask frame with constant color and constant disparity.
pub fn constant_frame(height: usize, width: usize, rgb: [f64; 3], disparity: f64) -> Frame {
    Frame {
        rgb: Array3::from_shape_fn((height, width, 3), |(_, _, c)| rgb[c]),
        disparity: DisparityMap::constant(height, width, disparity),
        mask: Mask::ones(height, width),
        pose: Pose::identity(),
        intrinsics: default_intrinsics(height, width),
    }
}

/// Fronto-parallel plane at the given depth, mid-gray.
pub fn plane_frame(height: usize, width: usize, depth: f64) -> Frame {
    constant_frame(height, width, [0.5, 0.5, 0.5], 1.0 / depth)
}

/// Plane at the given depth textured with aperiodic per-column noise; useful
/// for measuring image shifts by correlation (the peak is unique).
pub fn striped_plane_frame(height: usize, width: usize, depth: f64) -> Frame {
    let mut f = plane_frame(height, width, depth);
    let mut rng = SplitMix64(width as u64 * 31 + 7);
    let columns: Vec<f64> = (0..width).map(|_| rng.next_f64()).collect();
    f.rgb = Array3::from_shape_fn((height, width, 3), |(_, x, _)| columns[x]);
    f
}

/// Tiny deterministic generator (SplitMix64) so synthetic content does not
/// pull in an RNG dependency.
#[derive(Clone)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Full-mask frame with per-pixel pseudo-random color and a smooth wavy
/// disparity field, seeded deterministically.
pub fn textured_frame(height: usize, width: usize, seed: u64) -> Frame {
    let mut rng = SplitMix64(seed);
    let (p0, p1, p2) = (rng.next_f64() * 6.0, rng.next_f64() * 6.0, rng.next_f64() * 6.0);
    let rgb = Array3::from_shape_fn((height, width, 3), |_| rng.next_f64());
    let disparity = Array2::from_shape_fn((height, width), |(y, x)| {
        0.5 + 0.3 * ((x as f64 / 9.0 + p0).sin() * (y as f64 / 7.0 + p1).cos())
            + 0.1 * (x as f64 / 23.0 + p2).cos()
    });
    Frame {
        rgb,
        disparity: DisparityMap { data: disparity },
        mask: Mask::ones(height, width),
        pose: Pose::identity(),
        intrinsics: default_intrinsics(height, width),
    }
}

/// Rolling-hills terrain in world coordinates (up is +y). The surface is
/// `y = base + amplitude * sin(x / wavelength) * cos(z / wavelength)`.
#[derive(Debug, Clone)]
pub struct Heightfield {
    pub base: f64,
    pub amplitude: f64,
    pub wavelength: f64,
}

impl Heightfield {
    pub fn height_at(&self, x: f64, z: f64) -> f64 {
        self.base + self.amplitude * (x / self.wavelength).sin() * (z / self.wavelength).cos()
    }

    /// Triangulated patch covering `x in [x0, x1], z in [z0, z1]` with the
    /// given grid resolution, colored by elevation. Vertex positions are in
    /// world coordinates, so rasterizing with a world-to-camera pose renders
    /// the terrain from that camera.
    pub fn mesh(&self, x0: f64, x1: f64, z0: f64, z1: f64, nx: usize, nz: usize) -> Mesh {
        let mut vertices = Vec::with_capacity(nx * nz);
        for iz in 0..nz {
            for ix in 0..nx {
                let x = x0 + (x1 - x0) * ix as f64 / (nx - 1) as f64;
                let z = z0 + (z1 - z0) * iz as f64 / (nz - 1) as f64;
                let y = self.height_at(x, z);
                let shade = 0.5 + 0.5 * ((y - self.base) / self.amplitude.max(1e-9)).clamp(-1.0, 1.0);
                vertices.push(MeshVertex {
                    position: Vector3::new(x, y, z),
                    rgb: [0.2 + 0.3 * shade, 0.4 + 0.4 * shade, 0.2],
                    mask: 1.0,
                });
            }
        }
        let mut triangles = Vec::with_capacity((nx - 1) * (nz - 1) * 2);
        for iz in 0..nz - 1 {
            for ix in 0..nx - 1 {
                let i00 = (iz * nx + ix) as u32;
                let i01 = i00 + 1;
                let i10 = ((iz + 1) * nx + ix) as u32;
                let i11 = i10 + 1;
                triangles.push([i00, i10, i11]);
                triangles.push([i00, i11, i01]);
            }
        }
        Mesh { vertices, triangles, source: None }
    }
}
