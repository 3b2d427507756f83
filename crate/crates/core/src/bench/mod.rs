//! Overlay-phase timing against the number of overlays.

mod scene;
mod stats;

use std::hint::black_box;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

pub use scene::{generate_bench_scene, BenchScene, POLYGON_VERTICES};
pub use stats::{fit_slopes, format_slope_table, mask_iou, median, write_slopes_csv, SlopeFit};

use crate::overlay::{DecalOptions, OverlayAssets, Technique};
use crate::scene::{rasterize_scene, shade_base, Camera, ColorImage, GBuffer, Sun};
use crate::style::{composite, OpacityPolicy};
use crate::{Error, Result};

pub const WARMUP_FRAMES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub techniques: Vec<Technique>,
    pub overlay_counts: Vec<usize>,
    /// Timed frames per cell, after the warm-up frames.
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub texture_size: usize,
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            techniques: Technique::ALL.to_vec(),
            overlay_counts: vec![1, 2, 4, 8, 16, 32],
            frames: 20,
            width: 512,
            height: 512,
            seed: 7,
            texture_size: 1024,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub technique: Technique,
    pub overlays: usize,
    pub frame: usize,
    pub ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BenchEnvironment {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub threads: usize,
    pub frames: usize,
    pub warmup_frames: usize,
    pub texture_size: usize,
    pub polygon_vertices: usize,
    pub debug_assertions: bool,
    pub target: String,
    pub crate_version: String,
}

/// PPS texture fetches seen across the frames of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FetchRecord {
    pub overlays: usize,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    /// Ordered by technique (config order), then overlay count, then frame.
    pub rows: Vec<BenchRow>,
    pub environment: BenchEnvironment,
    pub pps_fetches: Vec<FetchRecord>,
}

impl BenchReport {
    pub fn techniques(&self) -> Vec<Technique> {
        let mut out: Vec<Technique> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.technique) {
                out.push(r.technique);
            }
        }
        out
    }

    pub fn counts(&self, technique: Technique) -> Vec<usize> {
        let mut out: Vec<usize> = self.rows.iter().filter(|r| r.technique == technique).map(|r| r.overlays).collect();
        out.dedup();
        out
    }

    pub fn median_ms(&self, technique: Technique, overlays: usize) -> Option<f64> {
        let mut v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.technique == technique && r.overlays == overlays)
            .map(|r| r.ms)
            .collect();
        (!v.is_empty()).then(|| median(&mut v))
    }

    /// CSV with header `technique,overlays,frame,ms`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the CSV and a `.json` environment sidecar next to it.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(csv_path)?)?;
        #[derive(Serialize)]
        struct Sidecar<'a> {
            environment: &'a BenchEnvironment,
            pps_fetches: &'a [FetchRecord],
        }
        let json = serde_json::to_string_pretty(&Sidecar { environment: &self.environment, pps_fetches: &self.pps_fetches })?;
        std::fs::write(csv_path.with_extension("json"), json + "\n")?;
        Ok(())
    }
}

/// Times the overlay phase (mask + composite) of each technique.
///
/// Base rendering and baking happen once per overlay count outside the
/// timed region. Every cell first runs [`WARMUP_FRAMES`] untimed frames;
/// timed frames then visit the cells in turn, one frame at a time. With
/// zero overlays there is nothing to draw and the phase is a copy of the
/// base.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.frames == 0 || cfg.techniques.is_empty() || cfg.overlay_counts.is_empty() {
        return Err(Error::InvalidInput("benchmark needs techniques, counts and at least one frame".into()));
    }
    if cfg.width == 0 || cfg.height == 0 {
        return Err(Error::InvalidInput("benchmark resolution must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| run_cells(cfg))
}

struct CountContext {
    n: usize,
    scene: BenchScene,
    cam: Camera,
    g: GBuffer,
    base: ColorImage,
    assets: OverlayAssets,
}

impl CountContext {
    fn new(cfg: &BenchConfig, n: usize) -> Result<Self> {
        let scene = generate_bench_scene(cfg.seed, n)?;
        let cam = scene.camera(cfg.width, cfg.height)?;
        let g = rasterize_scene(&scene.terrain, &scene.objects, &cam, cfg.width, cfg.height)?;
        let base = shade_base(&g, &Sun::default());
        let assets = scene.bake(cfg.texture_size)?;
        Ok(Self { n, scene, cam, g, base, assets })
    }

    /// One overlay phase; returns the image and the PPS fetch count.
    fn frame(&self, technique: Technique, policy: &OpacityPolicy) -> Result<(ColorImage, Option<u64>)> {
        if self.n == 0 {
            return Ok((self.base.clone(), None));
        }
        let (mask, fetches) = self.assets.mask(technique, &self.g, &self.cam, DecalOptions::default())?;
        Ok((composite(&self.base, &mask, &self.scene.styles, policy)?, fetches))
    }
}

fn run_cells(cfg: &BenchConfig) -> Result<BenchReport> {
    let policy = OpacityPolicy::default();
    let contexts = cfg
        .overlay_counts
        .iter()
        .map(|&n| CountContext::new(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    let cell_ids: Vec<(usize, usize)> =
        (0..cfg.techniques.len()).flat_map(|ti| (0..contexts.len()).map(move |ci| (ti, ci))).collect();
    let mut rows: Vec<Vec<BenchRow>> = vec![Vec::with_capacity(cfg.frames); cell_ids.len()];
    let mut fetches: Vec<Vec<u64>> = vec![Vec::new(); cell_ids.len()];

    for &(ti, ci) in &cell_ids {
        for _ in 0..WARMUP_FRAMES {
            black_box(contexts[ci].frame(cfg.techniques[ti], &policy)?);
        }
    }
    // Frames go round-robin over the cells so slow spells of the machine
    // spread evenly instead of landing on one overlay count.
    for f in 0..cfg.frames {
        for (k, &(ti, ci)) in cell_ids.iter().enumerate() {
            let technique = cfg.techniques[ti];
            let start = Instant::now();
            let (out, fetched) = contexts[ci].frame(technique, &policy)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            black_box(out);
            fetches[k].extend(fetched);
            rows[k].push(BenchRow { technique, overlays: contexts[ci].n, frame: f, ms: ms.max(1e-6) });
        }
    }

    let pps_fetches = cell_ids
        .iter()
        .zip(&fetches)
        .filter(|((ti, ci), _)| cfg.techniques[*ti] == Technique::Pps && contexts[*ci].n > 0)
        .map(|((_, ci), f)| FetchRecord {
            overlays: contexts[*ci].n,
            min: f.iter().copied().min().unwrap_or(0),
            max: f.iter().copied().max().unwrap_or(0),
        })
        .collect();
    Ok(BenchReport {
        rows: rows.into_iter().flatten().collect(),
        environment: BenchEnvironment {
            width: cfg.width,
            height: cfg.height,
            seed: cfg.seed,
            threads: cfg.threads.max(1),
            frames: cfg.frames,
            warmup_frames: WARMUP_FRAMES,
            texture_size: cfg.texture_size,
            polygon_vertices: POLYGON_VERTICES,
            debug_assertions: cfg!(debug_assertions),
            target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
        },
        pps_fetches,
    })
}
