//! On-disk formats: PFM disparity maps, PNG images and masks, the 19-field
//! camera trajectory text format, keypoint JSON, and embedding blobs.

mod embeddings;
mod keypoints;
mod pfm;
mod pngio;
mod trajectory;

pub use embeddings::{read_embeddings, read_stats, write_embeddings, write_stats};
pub use keypoints::{read_keypoints, write_keypoints};
pub use pfm::{read_pfm, write_pfm};
pub use pngio::{quantize_u8, read_mask_png, read_rgb_png, write_mask_png, write_rgb_png};
pub use trajectory::{read_trajectory, write_trajectory};
