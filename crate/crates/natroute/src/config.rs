//! Optional JSON configuration. Command-line flags take precedence over
//! every value here.

use std::path::Path;

use serde::Deserialize;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Join threshold for natural roads, degrees.
    pub angle: Option<f64>,
    pub split_distance: Option<f64>,
    pub split_ratio: Option<f64>,
    /// `lonlat` or `planar` for input files without a declared CRS.
    pub crs: Option<String>,
    pub snap_tolerance: Option<f64>,
    pub noding_tolerance: Option<f64>,
    pub snap_radius: Option<f64>,
    pub sequence_cap: Option<usize>,
    pub threads: Option<usize>,
    pub host: Option<String>,
    pub port: Option<u16>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let p = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
        Self::from_json(&text).map_err(|source| ConfigError::Parse { path: p, source })
    }
}
