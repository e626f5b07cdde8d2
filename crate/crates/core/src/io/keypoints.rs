//! Sparse 3D keypoints as JSON: `{"points": [[x, y, z], ...]}` in the camera
//! coordinates of a given frame.

use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::align::KeypointSet;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct KeypointFile {
    points: Vec<[f64; 3]>,
}

pub fn read_keypoints(path: &Path) -> Result<KeypointSet> {
    let text = fs::read_to_string(path)?;
    let file: KeypointFile =
        serde_json::from_str(&text).map_err(|e| Error::Format(format!("keypoints: {e}")))?;
    KeypointSet::new(file.points.iter().map(|p| Vector3::new(p[0], p[1], p[2])).collect())
}

pub fn write_keypoints(path: &Path, points: &KeypointSet) -> Result<()> {
    let file = KeypointFile {
        points: points.points().iter().map(|p| [p.x, p.y, p.z]).collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))?)?;
    Ok(())
}
