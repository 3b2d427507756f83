//! Scene configuration: one JSON document with `"schema": 1`.
//!
//! Units: world lengths are scene units with `y` up and the ground plane in
//! `(x, z)`; angles are degrees; colours are linear RGB in `[0, 1]`; the
//! transform `[a, b, c, d, tx, ty]` maps world `(x, z)` to CRS
//! `(a·x + b·z + tx, c·x + d·z + ty)`. Relative paths resolve against the
//! directory of the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::geo::{parse_geojson, Rect, RoiPolygon, RoiSet, Vec2, WorldCrsTransform};
use crate::overlay::{DecalOptions, LayerFilter};
use crate::scene::{Camera, Heightfield, Sun, TriMesh, Vec3};
use crate::style::{OpacityPolicy, OverlayStyle, StyleSet};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TEXTURE_SIZE: usize = 1024;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub schema: u32,
    /// `[width, height]` in pixels.
    pub resolution: [usize; 2],
    pub terrain: TerrainSource,
    #[serde(default)]
    pub objects: Vec<ObjectConfig>,
    pub camera: CameraConfig,
    #[serde(default)]
    pub sun: Option<SunConfig>,
    /// Default world→CRS transform for every overlay.
    pub transform: [f64; 6],
    pub overlays: Vec<OverlayConfig>,
    #[serde(default)]
    pub opacity_policy: OpacityPolicy,
    #[serde(default)]
    pub texture_size: Option<usize>,
    /// Extrusion half-height; defaults to 10 × the terrain's max |height|,
    /// raised to 1.5 × the tallest object.
    #[serde(default)]
    pub half_height: Option<f64>,
    #[serde(default)]
    pub decal: DecalConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TerrainSource {
    Flat {
        size: [usize; 2],
        cell_size: f64,
        #[serde(default)]
        origin: [f64; 2],
        #[serde(default)]
        height: f64,
    },
    Procedural {
        seed: u64,
        size: [usize; 2],
        cell_size: f64,
        #[serde(default)]
        origin: [f64; 2],
        amplitude: f64,
        feature_size: f64,
    },
    Png {
        path: PathBuf,
        cell_size: f64,
        #[serde(default)]
        origin: [f64; 2],
        /// World height of PNG value 65535.
        height_scale: f64,
        #[serde(default)]
        height_offset: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectConfig {
    Cone {
        base: [f64; 3],
        radius: f64,
        height: f64,
        #[serde(default = "default_segments")]
        segments: usize,
        #[serde(default = "default_albedo")]
        albedo: [f32; 3],
    },
    Box {
        center: [f64; 3],
        half_extents: [f64; 3],
        #[serde(default = "default_albedo")]
        albedo: [f32; 3],
    },
}

fn default_segments() -> usize {
    16
}

fn default_albedo() -> [f32; 3] {
    [0.2, 0.38, 0.18]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub position: [f64; 3],
    pub target: [f64; 3],
    #[serde(default = "default_up")]
    pub up: [f64; 3],
    pub fov_y_deg: f64,
    #[serde(default = "default_near")]
    pub near: f64,
    #[serde(default = "default_far")]
    pub far: f64,
}

fn default_up() -> [f64; 3] {
    [0.0, 1.0, 0.0]
}

fn default_near() -> f64 {
    0.1
}

fn default_far() -> f64 {
    10_000.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SunConfig {
    pub direction: [f64; 3],
    pub intensity: f64,
    pub ambient: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlayConfig {
    pub geojson: PathBuf,
    /// Overrides the scene transform for this file.
    #[serde(default)]
    pub transform: Option<[f64; 6]>,
    /// Style for every region of the file.
    #[serde(default)]
    pub style: OverlayStyle,
    /// Per-region overrides keyed by the id in the file.
    #[serde(default)]
    pub region_styles: BTreeMap<u32, OverlayStyle>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecalConfig {
    #[serde(default)]
    pub layers: LayerFilter,
    #[serde(default)]
    pub bilinear: bool,
}

/// Regions of one GeoJSON file with their transform and styles; ids are
/// already made unique across files.
#[derive(Debug, Clone)]
pub struct OverlayGroup {
    pub source: PathBuf,
    pub transform: WorldCrsTransform,
    pub rois: RoiSet,
    pub styles: StyleSet,
}

impl OverlayGroup {
    /// Square CRS window around the regions with a 2 % margin.
    pub fn crs_window(&self) -> Rect {
        window_around(self.rois.crs_bounds.expect("group has regions"))
    }
}

pub(crate) fn window_around(bounds: Rect) -> Rect {
    let sq = bounds.squared();
    sq.inflate(0.02 * sq.width().max(1e-9))
}

/// A fully validated scene with every input file loaded.
#[derive(Debug, Clone)]
pub struct LoadedScene {
    pub width: usize,
    pub height: usize,
    pub terrain: Heightfield,
    pub objects: Vec<TriMesh>,
    pub camera: Camera,
    pub sun: Sun,
    pub groups: Vec<OverlayGroup>,
    pub policy: OpacityPolicy,
    pub texture_size: usize,
    pub half_height: f64,
    pub decal: DecalOptions,
}

impl LoadedScene {
    /// All styles across groups.
    pub fn styles(&self) -> StyleSet {
        let mut all = StyleSet::new();
        for g in &self.groups {
            for (id, s) in g.styles.iter() {
                all.insert(id, s.clone());
            }
        }
        all
    }

    /// World height span decal projectors must enclose.
    pub fn y_range(&self) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for h in &self.terrain.heights {
            lo = lo.min(*h);
            hi = hi.max(*h);
        }
        for v in self.objects.iter().flat_map(|m| &m.vertices) {
            lo = lo.min(v.y);
            hi = hi.max(v.y);
        }
        (lo, hi)
    }
}

fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl SceneConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("scene config: {e}")))
    }

    /// Reads and validates a config file and everything it references.
    pub fn load(path: &Path) -> Result<LoadedScene> {
        if !path.exists() {
            return Err(Error::NoSuchInput(path.to_path_buf()));
        }
        let cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        cfg.resolve(path.parent().unwrap_or(Path::new(".")))
    }

    /// Validates the config, collecting every problem before giving up, then
    /// loads the referenced files relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<LoadedScene> {
        let mut problems: Vec<String> = Vec::new();
        if self.schema != SCHEMA_VERSION {
            problems.push(format!("unsupported schema {} (expected {SCHEMA_VERSION})", self.schema));
        }
        let [width, height] = self.resolution;
        if width < 16 || height < 16 {
            problems.push(format!("resolution must be at least 16x16, got {width}x{height}"));
        }
        let texture_size = self.texture_size.unwrap_or(DEFAULT_TEXTURE_SIZE);
        if !(1..=16384).contains(&texture_size) {
            problems.push(format!("texture_size must be in 1..=16384, got {texture_size}"));
        }
        if let Some(h) = self.half_height {
            if !(h > 0.0 && h.is_finite()) {
                problems.push(format!("half_height must be positive, got {h}"));
            }
        }
        if let Err(e) = self.opacity_policy.validate() {
            problems.push(e.to_string());
        }
        let default_transform = WorldCrsTransform::from_array(self.transform)
            .map_err(|e| problems.push(format!("transform: {e}")))
            .ok();
        if self.overlays.is_empty() {
            problems.push("at least one overlay is required".into());
        }
        for (k, o) in self.overlays.iter().enumerate() {
            let p = resolve(base, &o.geojson);
            if !p.exists() {
                problems.push(format!("overlay {k}: no such input: {}", p.display()));
            }
            if let Some(t) = o.transform {
                if let Err(e) = WorldCrsTransform::from_array(t) {
                    problems.push(format!("overlay {k} transform: {e}"));
                }
            }
            for s in std::iter::once(&o.style).chain(o.region_styles.values()) {
                if let Err(e) = s.validate() {
                    problems.push(format!("overlay {k} style: {e}"));
                }
            }
        }
        if let TerrainSource::Png { path, .. } = &self.terrain {
            let p = resolve(base, path);
            if !p.exists() {
                problems.push(format!("terrain: no such input: {}", p.display()));
            }
        }
        let camera = Camera::look_at(
            v3(self.camera.position),
            v3(self.camera.target),
            v3(self.camera.up),
            self.camera.fov_y_deg,
            width.max(1) as f64 / height.max(1) as f64,
            self.camera.near,
            self.camera.far,
        )
        .map_err(|e| problems.push(format!("camera: {e}")))
        .ok();
        let sun = match &self.sun {
            None => Some(Sun::default()),
            Some(s) => match v3(s.direction).try_normalize(1e-12) {
                Some(direction) => Some(Sun { direction, intensity: s.intensity, ambient: s.ambient }),
                None => {
                    problems.push("sun direction must be non-zero".into());
                    None
                }
            },
        };
        let terrain = self.load_terrain(base).map_err(|e| problems.push(format!("terrain: {e}"))).ok();
        let objects = self.objects(&mut problems);
        if !problems.is_empty() {
            return Err(Error::InvalidInput(problems.join("; ")));
        }

        let (terrain, camera, sun) = (terrain.unwrap(), camera.unwrap(), sun.unwrap());
        let default_transform = default_transform.unwrap();
        let mut groups = Vec::with_capacity(self.overlays.len());
        let mut next_id = 1u32;
        for o in &self.overlays {
            let path = resolve(base, &o.geojson);
            let set = parse_geojson(&std::fs::read_to_string(&path)?)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            if set.is_empty() {
                return Err(Error::InvalidInput(format!("{}: no regions", path.display())));
            }
            let mut styles = StyleSet::new();
            let mut regions = Vec::with_capacity(set.len());
            for poly in &set.regions {
                let id = next_id;
                next_id += 1;
                let style = o.region_styles.get(&poly.region_id).unwrap_or(&o.style);
                styles.insert(id, style.clone());
                regions.push(RoiPolygon { region_id: id, ..poly.clone() });
            }
            let transform = match o.transform {
                Some(t) => WorldCrsTransform::from_array(t)?,
                None => default_transform,
            };
            let mut rois = RoiSet::new(regions)?;
            rois.ignored_z = set.ignored_z;
            groups.push(OverlayGroup { source: path, transform, rois, styles });
        }
        let object_reach = objects.iter().flat_map(|m| m.vertices.iter().map(|v| v.y.abs())).fold(0.0, f64::max);
        let half_height = self
            .half_height
            .unwrap_or((10.0 * terrain.max_abs_height()).max(1.5 * object_reach).max(1.0));
        Ok(LoadedScene {
            width,
            height,
            terrain,
            objects,
            camera,
            sun,
            groups,
            policy: self.opacity_policy,
            texture_size,
            half_height,
            decal: DecalOptions { filter: self.decal.layers, bilinear: self.decal.bilinear },
        })
    }

    fn load_terrain(&self, base: &Path) -> Result<Heightfield> {
        let o = |a: [f64; 2]| Vec2::new(a[0], a[1]);
        match &self.terrain {
            TerrainSource::Flat { size, cell_size, origin, height } => Heightfield::flat(size[0], size[1], *cell_size, o(*origin), *height),
            TerrainSource::Procedural { seed, size, cell_size, origin, amplitude, feature_size } => {
                Heightfield::procedural(*seed, size[0], size[1], *cell_size, o(*origin), *amplitude, *feature_size)
            }
            TerrainSource::Png { path, cell_size, origin, height_scale, height_offset } => {
                Heightfield::from_png(&resolve(base, path), *cell_size, o(*origin), *height_scale, *height_offset)
            }
        }
    }

    fn objects(&self, problems: &mut Vec<String>) -> Vec<TriMesh> {
        let mut out = Vec::new();
        for (k, obj) in self.objects.iter().enumerate() {
            match *obj {
                ObjectConfig::Cone { base, radius, height, segments, albedo } => {
                    if !(radius > 0.0 && height > 0.0) {
                        problems.push(format!("object {k}: cone radius and height must be positive"));
                        continue;
                    }
                    out.push(TriMesh::cone(v3(base), radius, height, segments, albedo));
                }
                ObjectConfig::Box { center, half_extents, albedo } => {
                    if half_extents.iter().any(|h| !(*h > 0.0)) {
                        problems.push(format!("object {k}: box half extents must be positive"));
                        continue;
                    }
                    out.push(TriMesh::cuboid(v3(center), v3(half_extents), albedo));
                }
            }
        }
        out
    }
}
