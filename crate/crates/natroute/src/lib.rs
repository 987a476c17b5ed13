//! File formats, engine snapshots, the parallel benchmark runner and the
//! HTTP service built on `natroute-core`.

pub mod bench;
pub mod config;
pub mod edgelist;
pub mod engine;
pub mod geojson;
pub mod server;
pub mod snapshot;

pub use engine::{Engine, EngineError, RouteAnswer};
pub use snapshot::{BuildParams, EngineSnapshot, SnapshotError};


use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("invalid GeoJSON: {0}")]
    GeoJson(String),
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

/// Input formats for line features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    GeoJson,
    EdgeList,
}

impl InputFormat {
    /// `.json`/`.geojson` read as GeoJSON, anything else as an edge list.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("json" | "geojson") => InputFormat::GeoJson,
            _ => InputFormat::EdgeList,
        }
    }
}

/// Parsed features plus the CRS the file declared, if any.
pub fn read_features(text: &str, format: InputFormat) -> Result<geojson::GeoJsonInput, FormatError> {
    match format {
        InputFormat::GeoJson => geojson::parse_geojson(text),
        InputFormat::EdgeList => Ok(geojson::GeoJsonInput {
            features: edgelist::parse_edge_list(text)?,
            declared_crs: None,
            skipped: 0,
        }),
    }
}
