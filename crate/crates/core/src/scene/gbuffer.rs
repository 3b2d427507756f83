use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raster::ScreenTri;
use super::{Camera, Heightfield, TriMesh, Vec3};
use crate::{Error, Result};

/// Category of the surface that won the depth test at a pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Sky,
    Terrain,
    Object,
}

/// Per-pixel surface attributes from the base pass, row-major with `y` down.
#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer {
    pub width: usize,
    pub height: usize,
    /// Camera depth; `f64::INFINITY` for sky.
    pub depth: Vec<f64>,
    pub position: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    pub albedo: Vec<[f32; 3]>,
    pub layer: Vec<Layer>,
}

impl GBuffer {
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn is_sky(&self, i: usize) -> bool {
        self.layer[i] == Layer::Sky
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneOptions {
    /// Terrain colour at the lowest and highest sample.
    pub terrain_low: [f32; 3],
    pub terrain_high: [f32; 3],
    /// Rows per parallel work item.
    pub band_rows: usize,
}

impl Default for SceneOptions {
    fn default() -> Self {
        Self { terrain_low: [0.36, 0.48, 0.25], terrain_high: [0.62, 0.58, 0.48], band_rows: 16 }
    }
}

pub fn rasterize_scene(terrain: &Heightfield, objects: &[TriMesh], cam: &Camera, width: usize, height: usize) -> Result<GBuffer> {
    rasterize_scene_with(terrain, objects, cam, width, height, &SceneOptions::default())
}

#[derive(Clone, Copy)]
enum Source {
    Terrain([(usize, usize); 3]),
    Object { mesh: usize, tri: usize },
}

/// Depth-buffered rasterization of the terrain grid and the objects.
///
/// Rows are processed in parallel bands; within a band triangles are visited
/// in submission order with a strict depth test, so the result does not
/// depend on the thread count.
pub fn rasterize_scene_with(
    terrain: &Heightfield,
    objects: &[TriMesh],
    cam: &Camera,
    width: usize,
    height: usize,
    opts: &SceneOptions,
) -> Result<GBuffer> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!("resolution must be at least 1x1, got {width}x{height}")));
    }
    let mut sources: Vec<Source> = terrain.triangles().map(Source::Terrain).collect();
    for (m, mesh) in objects.iter().enumerate() {
        sources.extend((0..mesh.triangles.len()).map(|t| Source::Object { mesh: m, tri: t }));
    }
    let corners = |s: &Source| -> [Vec3; 3] {
        match *s {
            Source::Terrain(v) => v.map(|(i, k)| terrain.position(i, k)),
            Source::Object { mesh, tri } => objects[mesh].triangles[tri].map(|i| objects[mesh].vertices[i as usize]),
        }
    };
    let tris: Vec<ScreenTri> = sources
        .par_chunks(4096)
        .enumerate()
        .flat_map_iter(|(c, chunk)| {
            let mut out = Vec::new();
            for (k, s) in chunk.iter().enumerate() {
                ScreenTri::setup(c * 4096 + k, corners(s), cam, width, height, &mut out);
            }
            out
        })
        .collect();

    let band_rows = opts.band_rows.max(1);
    let bands = height.div_ceil(band_rows);
    let mut bins: Vec<Vec<u32>> = vec![Vec::new(); bands];
    for (k, t) in tris.iter().enumerate() {
        for bin in &mut bins[t.y0 / band_rows..=(t.y1 - 1) / band_rows] {
            bin.push(k as u32);
        }
    }

    let (lo, hi) = terrain
        .heights
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &h| (lo.min(h), hi.max(h)));
    let span = if hi > lo { hi - lo } else { 1.0 };

    let parts: Vec<GBuffer> = bins
        .par_iter()
        .enumerate()
        .map(|(b, bin)| {
            let row0 = b * band_rows;
            let row1 = (row0 + band_rows).min(height);
            let n = (row1 - row0) * width;
            let mut depth = vec![f64::INFINITY; n];
            let mut owner: Vec<Option<(usize, [f64; 3])>> = vec![None; n];
            for &k in bin {
                let t = &tris[k as usize];
                t.rasterize_rows(row0, row1, |f| {
                    let i = (f.y - row0) * width + f.x;
                    if f.depth <= cam.far && f.depth < depth[i] {
                        depth[i] = f.depth;
                        owner[i] = Some((t.source, f.weights));
                    }
                });
            }
            let mut part = GBuffer {
                width,
                height: row1 - row0,
                depth,
                position: vec![Vec3::zeros(); n],
                normal: vec![Vec3::zeros(); n],
                albedo: vec![[0.0; 3]; n],
                layer: vec![Layer::Sky; n],
            };
            for (i, o) in owner.iter().enumerate() {
                let Some((src, w)) = *o else { continue };
                let c = corners(&sources[src]);
                part.position[i] = c[0] * w[0] + c[1] * w[1] + c[2] * w[2];
                match sources[src] {
                    Source::Terrain(v) => {
                        let n = v.map(|(vi, vk)| terrain.normal(vi, vk));
                        part.normal[i] = (n[0] * w[0] + n[1] * w[1] + n[2] * w[2]).normalize();
                        let s = (((part.position[i].y - lo) / span) as f32).clamp(0.0, 1.0);
                        part.albedo[i] = std::array::from_fn(|ch| opts.terrain_low[ch] + (opts.terrain_high[ch] - opts.terrain_low[ch]) * s);
                        part.layer[i] = Layer::Terrain;
                    }
                    Source::Object { mesh, tri } => {
                        part.normal[i] = objects[mesh].face_normal(tri);
                        part.albedo[i] = objects[mesh].albedo;
                        part.layer[i] = Layer::Object;
                    }
                }
            }
            part
        })
        .collect();

    let mut g = GBuffer {
        width,
        height,
        depth: Vec::with_capacity(width * height),
        position: Vec::with_capacity(width * height),
        normal: Vec::with_capacity(width * height),
        albedo: Vec::with_capacity(width * height),
        layer: Vec::with_capacity(width * height),
    };
    for p in parts {
        g.depth.extend(p.depth);
        g.position.extend(p.position);
        g.normal.extend(p.normal);
        g.albedo.extend(p.albedo);
        g.layer.extend(p.layer);
    }
    Ok(g)
}
