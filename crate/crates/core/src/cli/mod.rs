//! Command implementations behind the `roi-overlay` binary.

mod args;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use args::{run, Cli, Command};
pub use config::{
    CameraConfig, DecalConfig, LoadedScene, ObjectConfig, OverlayConfig, OverlayGroup, SceneConfig, SunConfig, TerrainSource,
    DEFAULT_TEXTURE_SIZE, SCHEMA_VERSION,
};

use crate::bake::{bake_style_texture, extrude_polygon, rasterize_roi, squared_edt, write_obj, ShapeMesh};
use crate::bench::{fit_slopes, format_slope_table, mask_iou, run_bench, write_slopes_csv, BenchConfig, SlopeFit};
use crate::geo::{parse_geojson, WorldCrsTransform};
use crate::overlay::{OverlayAssets, OverlayMask, Technique};
use crate::scene::{rasterize_scene, shade_base, ColorImage, GBuffer};
use crate::style::{composite, ClampWarning, OverlayStyle, StyleSet};
use crate::{Error, Result};

/// Process exit status for an error: 2 for bad usage, configuration or
/// input data, 1 for failures while running.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoSuchInput(_)
        | Error::InvalidInput(_)
        | Error::Json(_)
        | Error::Parse(_)
        | Error::UnsupportedGeometry(_)
        | Error::DegenerateRing { .. }
        | Error::UnclosedRing { .. }
        | Error::DuplicateRegionId(_)
        | Error::InvalidRegionId(_)
        | Error::SingularTransform(_)
        | Error::CameraInsideSolid(_) => 2,
        _ => 1,
    }
}

/// Runs `f` on a pool with `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn threads_in_use(threads: Option<usize>) -> usize {
    threads.unwrap_or_else(rayon::current_num_threads).max(1)
}

// ---------------------------------------------------------------- bake

#[derive(Debug, Clone)]
pub struct BakeOptions {
    pub transform: [f64; 6],
    pub width: usize,
    pub height: usize,
    pub half_height: f64,
    pub style: OverlayStyle,
}

impl Default for BakeOptions {
    fn default() -> Self {
        Self {
            transform: [1.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            width: DEFAULT_TEXTURE_SIZE,
            height: DEFAULT_TEXTURE_SIZE,
            half_height: 100.0,
            style: OverlayStyle::default(),
        }
    }
}

/// Files written by [`cmd_bake`].
pub const BAKE_OUTPUTS: [&str; 4] = ["shapes.obj", "roi_ids.png", "roi_ids.json", "style.png"];

/// Bakes a GeoJSON file into an OBJ of extruded shapes, a 16-bit id
/// texture with its JSON header, and an RGBA style texture.
pub fn cmd_bake(geojson: &Path, out_dir: &Path, opts: &BakeOptions) -> Result<Vec<PathBuf>> {
    if !geojson.exists() {
        return Err(Error::NoSuchInput(geojson.to_path_buf()));
    }
    if !(opts.half_height > 0.0 && opts.half_height.is_finite()) {
        return Err(Error::InvalidInput(format!("half height must be positive, got {}", opts.half_height)));
    }
    if opts.width == 0 || opts.height == 0 {
        return Err(Error::InvalidInput("texture resolution must be positive".into()));
    }
    opts.style.validate()?;
    let transform = WorldCrsTransform::from_array(opts.transform)?;
    let set = parse_geojson(&std::fs::read_to_string(geojson)?)?;
    let bounds = set
        .crs_bounds
        .ok_or_else(|| Error::InvalidInput(format!("{}: no regions", geojson.display())))?;
    let meshes = set
        .regions
        .iter()
        .map(|p| extrude_polygon(p, &transform, opts.half_height))
        .collect::<Result<Vec<ShapeMesh>>>()?;
    let roi = rasterize_roi(&set, config::window_around(bounds), opts.width, opts.height)?;
    let styles = StyleSet::uniform(set.regions.iter().map(|r| r.region_id), opts.style.clone());
    let style_tex = bake_style_texture(&roi, &styles)?;

    std::fs::create_dir_all(out_dir)?;
    let paths: Vec<PathBuf> = BAKE_OUTPUTS.iter().map(|n| out_dir.join(n)).collect();
    let mut obj = std::io::BufWriter::new(std::fs::File::create(&paths[0])?);
    write_obj(&meshes, &mut obj)?;
    obj.flush()?;
    roi.write_png(&paths[1], &paths[2])?;
    style_tex.write_png(&paths[3])?;
    Ok(paths)
}

// ---------------------------------------------------------------- render

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub threads: Option<usize>,
    pub no_clamp: bool,
    pub resolution: Option<(usize, usize)>,
    /// Also write the id mask as a 16-bit PNG.
    pub mask_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RenderReport {
    pub technique: Technique,
    pub width: usize,
    pub height: usize,
    pub threads: usize,
    pub regions: usize,
    pub covered_pixels: usize,
    pub bake_ms: f64,
    pub raster_ms: f64,
    pub overlay_ms: f64,
    pub composite_ms: f64,
    pub clamp_warnings: Vec<ClampWarning>,
    pub ignored_z: usize,
}

impl std::fmt::Display for RenderReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "technique      {}", self.technique)?;
        writeln!(f, "resolution     {}x{}", self.width, self.height)?;
        writeln!(f, "threads        {}", self.threads)?;
        writeln!(f, "regions        {}", self.regions)?;
        writeln!(f, "covered px     {}", self.covered_pixels)?;
        writeln!(f, "bake ms        {:.3}", self.bake_ms)?;
        writeln!(f, "raster ms      {:.3}", self.raster_ms)?;
        writeln!(f, "overlay ms     {:.3}", self.overlay_ms)?;
        writeln!(f, "composite ms   {:.3}", self.composite_ms)?;
        write!(f, "clamp warnings {}", self.clamp_warnings.len())
    }
}

/// Result of running the pipeline in memory.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub image: ColorImage,
    pub mask: OverlayMask,
    pub gbuffer: GBuffer,
    pub report: RenderReport,
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn bake_groups(scene: &LoadedScene) -> Result<Vec<OverlayAssets>> {
    scene
        .groups
        .iter()
        .map(|g| {
            OverlayAssets::bake(
                g.rois.clone(),
                &g.styles,
                g.transform,
                g.crs_window(),
                scene.texture_size,
                scene.half_height,
                scene.y_range(),
            )
        })
        .collect()
}

fn group_mask(scene: &LoadedScene, assets: &[OverlayAssets], technique: Technique, g: &GBuffer) -> Result<OverlayMask> {
    let mut mask = OverlayMask::empty(g.width, g.height);
    for a in assets {
        let (m, _) = a.mask(technique, g, &scene.camera, scene.decal)?;
        mask.merge_over(&m)?;
    }
    Ok(mask)
}

fn check_camera_outside(scene: &LoadedScene, assets: &[OverlayAssets]) -> Result<()> {
    for m in assets.iter().flat_map(|a| &a.meshes) {
        if m.contains(scene.camera.position) {
            return Err(Error::CameraInsideSolid(m.region_id));
        }
    }
    Ok(())
}

/// Bake, rasterize, overlay and composite without touching the disk.
pub fn render_scene(scene: &LoadedScene, technique: Technique, no_clamp: bool) -> Result<Rendered> {
    let mut policy = scene.policy;
    if no_clamp {
        policy.clamp = false;
    }
    let styles = scene.styles();
    let t0 = Instant::now();
    let assets = bake_groups(scene)?;
    if technique == Technique::Csg {
        check_camera_outside(scene, &assets)?;
    }
    let bake_ms = ms_since(t0);
    let t1 = Instant::now();
    let g = rasterize_scene(&scene.terrain, &scene.objects, &scene.camera, scene.width, scene.height)?;
    let base = shade_base(&g, &scene.sun);
    let raster_ms = ms_since(t1);
    let t2 = Instant::now();
    let mask = group_mask(scene, &assets, technique, &g)?;
    let overlay_ms = ms_since(t2);
    let t3 = Instant::now();
    let image = composite(&base, &mask, &styles, &policy)?;
    let composite_ms = ms_since(t3);
    let report = RenderReport {
        technique,
        width: scene.width,
        height: scene.height,
        threads: rayon::current_num_threads(),
        regions: scene.groups.iter().map(|g| g.rois.len()).sum(),
        covered_pixels: mask.covered(),
        bake_ms,
        raster_ms,
        overlay_ms,
        composite_ms,
        clamp_warnings: styles.clamp_warnings(&policy),
        ignored_z: scene.groups.iter().map(|g| g.rois.ignored_z).sum(),
    };
    Ok(Rendered { image, mask, gbuffer: g, report })
}

fn check_image_path(path: &Path) -> Result<()> {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("ppm" | "png") => Ok(()),
        _ => Err(Error::InvalidInput(format!("output must end in .ppm or .png: {}", path.display()))),
    }
}

fn load_with_resolution(config: &Path, resolution: Option<(usize, usize)>) -> Result<LoadedScene> {
    if !config.exists() {
        return Err(Error::NoSuchInput(config.to_path_buf()));
    }
    let mut cfg = SceneConfig::from_json(&std::fs::read_to_string(config)?)?;
    if let Some((w, h)) = resolution {
        cfg.resolution = [w, h];
    }
    cfg.resolve(config.parent().unwrap_or(Path::new(".")))
}

/// Renders a scene config with one technique and writes PPM or PNG by
/// extension. Nothing is written unless the whole pipeline succeeds.
pub fn cmd_render(config: &Path, technique: Technique, out: &Path, opts: &RenderOptions) -> Result<RenderReport> {
    check_image_path(out)?;
    let scene = load_with_resolution(config, opts.resolution)?;
    let rendered = with_threads(opts.threads, || render_scene(&scene, technique, opts.no_clamp))?;
    rendered.image.save(out)?;
    if let Some(m) = &opts.mask_out {
        rendered.mask.write_png(m)?;
    }
    let mut report = rendered.report;
    report.threads = threads_in_use(opts.threads);
    Ok(report)
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompareReport {
    pub iou: f64,
    /// Pixels whose region id differs.
    pub differing_pixels: usize,
    /// Largest distance in pixels from a membership disagreement to the
    /// boundary of the second mask; 0 when they agree.
    pub max_boundary_distance: f64,
    pub covered_a: usize,
    pub covered_b: usize,
}

impl std::fmt::Display for CompareReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "iou                    {:.6}", self.iou)?;
        writeln!(f, "differing pixels       {}", self.differing_pixels)?;
        writeln!(f, "max boundary distance  {:.3}", self.max_boundary_distance)?;
        write!(f, "covered pixels         {} / {}", self.covered_a, self.covered_b)
    }
}

/// Compares two id masks of the same size.
pub fn compare_masks(a: &OverlayMask, b: &OverlayMask) -> Result<CompareReport> {
    let iou = mask_iou(a, b)?;
    let (w, h) = (b.width, b.height);
    let inside = |m: &OverlayMask, x: usize, y: usize| m.ids[y * w + x] > 0;
    let mut boundary = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let c = inside(b, x, y);
            boundary[y * w + x] = (x + 1 < w && inside(b, x + 1, y) != c)
                || (x > 0 && inside(b, x - 1, y) != c)
                || (y + 1 < h && inside(b, x, y + 1) != c)
                || (y > 0 && inside(b, x, y - 1) != c);
        }
    }
    let dist2 = squared_edt(&boundary, w, h);
    let mut max_d2: f64 = 0.0;
    for ((x, y), d2) in a.ids.iter().zip(&b.ids).zip(&dist2) {
        if (*x > 0) != (*y > 0) {
            max_d2 = max_d2.max(if d2.is_finite() { *d2 } else { (w * w + h * h) as f64 });
        }
    }
    Ok(CompareReport {
        iou,
        differing_pixels: a.ids.iter().zip(&b.ids).filter(|(x, y)| x != y).count(),
        max_boundary_distance: max_d2.sqrt(),
        covered_a: a.covered(),
        covered_b: b.covered(),
    })
}

/// Red where only `a` covers, blue where only `b` does, white where both.
pub fn diff_image(a: &OverlayMask, b: &OverlayMask) -> ColorImage {
    let data = a
        .ids
        .iter()
        .zip(&b.ids)
        .map(|(&x, &y)| match (x > 0, y > 0) {
            (true, true) => [1.0, 1.0, 1.0],
            (true, false) => [1.0, 0.0, 0.0],
            (false, true) => [0.0, 0.3, 1.0],
            (false, false) => [0.0, 0.0, 0.0],
        })
        .collect();
    ColorImage { width: a.width, height: a.height, data }
}

/// Renders the G-buffer once and compares the masks of two techniques.
pub fn cmd_compare(
    config: &Path,
    a: Technique,
    b: Technique,
    diff_out: Option<&Path>,
    threads: Option<usize>,
    resolution: Option<(usize, usize)>,
) -> Result<CompareReport> {
    if let Some(p) = diff_out {
        check_image_path(p)?;
    }
    let scene = load_with_resolution(config, resolution)?;
    let (ma, mb) = with_threads(threads, || {
        let assets = bake_groups(&scene)?;
        if a == Technique::Csg || b == Technique::Csg {
            check_camera_outside(&scene, &assets)?;
        }
        let g = rasterize_scene(&scene.terrain, &scene.objects, &scene.camera, scene.width, scene.height)?;
        Ok((group_mask(&scene, &assets, a, &g)?, group_mask(&scene, &assets, b, &g)?))
    })?;
    let report = compare_masks(&ma, &mb)?;
    if let Some(p) = diff_out {
        diff_image(&ma, &mb).save(p)?;
    }
    Ok(report)
}

// ---------------------------------------------------------------- bench

/// Optional JSON bench configuration; command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    pub schema: u32,
    #[serde(default)]
    pub techniques: Option<Vec<Technique>>,
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub frames: Option<usize>,
    #[serde(default)]
    pub resolution: Option<[usize; 2]>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub texture_size: Option<usize>,
}

impl BenchFile {
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::NoSuchInput(path.to_path_buf()));
        }
        let f: BenchFile = serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::InvalidInput(format!("bench config: {e}")))?;
        if f.schema != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported schema {} (expected {SCHEMA_VERSION})", f.schema)));
        }
        Ok(f)
    }

    pub fn apply(&self, cfg: &mut BenchConfig) {
        if let Some(t) = &self.techniques {
            cfg.techniques = t.clone();
        }
        if let Some(c) = &self.counts {
            cfg.overlay_counts = c.clone();
        }
        if let Some(f) = self.frames {
            cfg.frames = f;
        }
        if let Some([w, h]) = self.resolution {
            cfg.width = w;
            cfg.height = h;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.texture_size {
            cfg.texture_size = t;
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub fits: Option<Vec<SlopeFit>>,
    pub table: String,
    /// Whether slope(pps) < slope(csg) < slope(decal), when all three ran.
    pub ordering_holds: Option<bool>,
}

/// Runs the benchmark, writes the CSV plus a JSON sidecar, and returns the
/// slope table. Ordering is reported, not enforced.
pub fn cmd_bench(cfg: &BenchConfig, csv_out: &Path, slopes_csv: Option<&Path>) -> Result<BenchOutcome> {
    if cfg.frames < 10 {
        return Err(Error::InvalidInput(format!("frames per cell must be at least 10, got {}", cfg.frames)));
    }
    let report = run_bench(cfg)?;
    report.save(csv_out)?;
    let fits = match fit_slopes(&report) {
        Ok(f) => Some(f),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    let mut table = String::new();
    let mut ordering_holds = None;
    if let Some(fits) = &fits {
        table = format_slope_table(fits);
        if let Some(p) = slopes_csv {
            write_slopes_csv(fits, std::fs::File::create(p)?)?;
        }
        let slope = |t: Technique| fits.iter().find(|f| f.technique == t).map(|f| f.slope);
        if let (Some(p), Some(c), Some(d)) = (slope(Technique::Pps), slope(Technique::Csg), slope(Technique::Decal)) {
            ordering_holds = Some(p < c && c < d);
        }
    }
    Ok(BenchOutcome { fits, table, ordering_holds })
}
