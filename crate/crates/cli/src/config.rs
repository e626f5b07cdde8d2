//! Optional JSON run configuration, merged under explicit CLI flags: a flag
//! given on the command line always wins, then the config file, then the
//! built-in default.

use std::path::Path;

use serde::Deserialize;

use crate::commands::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub steps: Option<usize>,
    pub refiner: Option<String>,
    pub grounding: Option<bool>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub resize: Option<String>,
    pub fov: Option<f64>,
    pub sky_threshold: Option<f64>,
    pub near_threshold: Option<f64>,
    pub target_sky_fraction: Option<f64>,
    pub near_fraction_limit: Option<f64>,
    pub smoothing: Option<f64>,
    pub step_distance: Option<f64>,
    pub meander: Option<bool>,
    pub meander_amplitude: Option<f64>,
    pub meander_period: Option<f64>,
    pub n: Option<usize>,
    pub window: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(FileConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Args(format!("cannot read config {}: {e}", p.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Args(format!("bad config {}: {e}", p.display())))
            }
        }
    }
}

/// First non-empty choice: explicit flag, config value, default.
pub fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

/// Like [`pick`] but with no default; stays `None` when neither is given.
pub fn pick_opt<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}
