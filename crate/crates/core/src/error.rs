use std::path::PathBuf;

/// Errors produced anywhere in the overlay pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed GeoJSON: {0}")]
    Parse(String),
    #[error("unsupported geometry type `{0}` (only Polygon and MultiPolygon are accepted)")]
    UnsupportedGeometry(String),
    #[error("ring {ring} of polygon {polygon} has fewer than 3 distinct vertices or zero area")]
    DegenerateRing { polygon: usize, ring: usize },
    #[error("ring {ring} of polygon {polygon} is not closed (first vertex differs from last)")]
    UnclosedRing { polygon: usize, ring: usize },
    #[error("region id {0} is used by more than one polygon")]
    DuplicateRegionId(u32),
    #[error("invalid region id {0}: ids must be positive integers")]
    InvalidRegionId(String),
    #[error("world/CRS transform is singular (|det| = {0:e})")]
    SingularTransform(f64),
    #[error("cap triangulation failed for region {region_id}: {reason}")]
    TriangulationFailure { region_id: u32, reason: String },
    #[error("no style defined for region id {0}")]
    MissingStyle(u32),
    #[error("shape mesh for region {region_id} is not closed: {open_edges} edges are not shared by exactly two triangles")]
    OpenMesh { region_id: u32, open_edges: usize },
    #[error("camera is inside the extruded shape of region {0}")]
    CameraInsideSolid(u32),
    #[error("slope fit needs at least 3 distinct overlay counts, got {0}")]
    InsufficientData(usize),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no such input: {}", .0.display())]
    NoSuchInput(PathBuf),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("image error: {0}")]
    Image(#[from] image::ImageError),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
