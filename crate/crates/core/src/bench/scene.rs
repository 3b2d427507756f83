use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geo::{Rect, RoiPolygon, RoiSet, Vec2, WorldCrsTransform};
use crate::overlay::OverlayAssets;
use crate::scene::{Camera, Heightfield, TriMesh, Vec3};
use crate::style::{Density, OverlayStyle, Pattern, StyleSet};
use crate::Result;

/// Vertices per generated region outline.
pub const POLYGON_VERTICES: usize = 16;
const GRID: usize = 129;
const CELL: f64 = 2.0;
const AMPLITUDE: f64 = 6.0;

/// A seeded terrain with occluders, a camera and `n` random regions.
#[derive(Debug, Clone)]
pub struct BenchScene {
    pub seed: u64,
    pub terrain: Heightfield,
    pub objects: Vec<TriMesh>,
    pub eye: Vec3,
    pub target: Vec3,
    pub fov_y_deg: f64,
    pub transform: WorldCrsTransform,
    pub rois: RoiSet,
    pub styles: StyleSet,
    /// Square CRS window covering the whole terrain.
    pub crs_window: Rect,
    pub half_height: f64,
}

impl BenchScene {
    pub fn camera(&self, width: usize, height: usize) -> Result<Camera> {
        Camera::look_at(self.eye, self.target, Vec3::y(), self.fov_y_deg, width as f64 / height as f64, 0.5, 2000.0)
    }

    /// World height span of everything a decal must reach.
    pub fn y_range(&self) -> (f64, f64) {
        let top = self
            .objects
            .iter()
            .flat_map(|m| m.vertices.iter().map(|v| v.y))
            .fold(self.terrain.max_abs_height(), f64::max);
        (-self.terrain.max_abs_height(), top)
    }

    pub fn bake(&self, texture_size: usize) -> Result<OverlayAssets> {
        OverlayAssets::bake(
            self.rois.clone(),
            &self.styles,
            self.transform,
            self.crs_window,
            texture_size,
            self.half_height,
            self.y_range(),
        )
    }
}

/// Builds the benchmark scene for `seed` with `n` regions.
///
/// Terrain, objects and camera come from one random stream and regions from
/// another, so the first `k` regions are the same for every `n ≥ k`.
pub fn generate_bench_scene(seed: u64, n: usize) -> Result<BenchScene> {
    let mut world_rng = ChaCha8Rng::seed_from_u64(seed);
    let mut region_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0005_eed0_f4e6_10e5);

    let terrain = Heightfield::procedural(world_rng.gen(), GRID, GRID, CELL, Vec2::zeros(), AMPLITUDE, 96.0)?;
    let extent = terrain.extent();
    let size = extent.width();
    let height_at = |x: f64, z: f64| {
        let i = ((x / CELL).round() as usize).min(GRID - 1);
        let k = ((z / CELL).round() as usize).min(GRID - 1);
        terrain.height(i, k)
    };

    let mut objects = Vec::new();
    for _ in 0..8 {
        let (x, z) = (world_rng.gen_range(0.1..0.9) * size, world_rng.gen_range(0.1..0.9) * size);
        let r = world_rng.gen_range(2.0..4.0);
        let h = world_rng.gen_range(8.0..16.0);
        objects.push(TriMesh::cone(Vec3::new(x, height_at(x, z) - 0.5, z), r, h, 12, [0.18, 0.36, 0.16]));
    }

    // rotated, scaled and offset like a projected CRS
    let angle = world_rng.gen_range(-0.6f64..0.6);
    let scale = world_rng.gen_range(1.5..3.0);
    let (s, c) = angle.sin_cos();
    let transform = WorldCrsTransform::new(scale * c, -scale * s, scale * s, scale * c, 500_000.0, 4_200_000.0)?;

    let corners = [extent.min, Vec2::new(extent.max.x, extent.min.y), extent.max, Vec2::new(extent.min.x, extent.max.y)]
        .map(|p| transform.crs_from_world(p));
    let crs_window = Rect::enclosing(&corners).expect("four corners").squared();

    let center = extent.center();
    let dir = Vec2::new(-1.0, -0.55).normalize();
    let dist = 0.95 * size;
    let eye = Vec3::new(center.x + dir.x * dist, dist, center.y + dir.y * dist);
    let target = Vec3::new(center.x, 0.0, center.y);

    let palette = [[0.95, 0.25, 0.2], [0.2, 0.45, 0.95], [0.95, 0.8, 0.15], [0.6, 0.2, 0.8], [0.1, 0.8, 0.7]];
    let patterns = [Pattern::Fill, Pattern::Stripes, Pattern::Dots];
    let mut regions = Vec::with_capacity(n);
    let mut styles = StyleSet::new();
    for k in 0..n {
        let id = k as u32 + 1;
        let c = Vec2::new(region_rng.gen_range(0.15..0.85) * size, region_rng.gen_range(0.15..0.85) * size);
        let r = region_rng.gen_range(0.05..0.09) * size;
        let step = TAU / POLYGON_VERTICES as f64;
        let ring = (0..POLYGON_VERTICES)
            .map(|v| {
                let a = (v as f64 + region_rng.gen_range(0.0..0.5)) * step;
                let radius = r * region_rng.gen_range(0.55..1.0);
                transform.crs_from_world(c + Vec2::new(a.cos(), a.sin()) * radius)
            })
            .collect();
        regions.push(RoiPolygon::from_rings(ring, vec![], id)?);
        styles.insert(
            id,
            OverlayStyle {
                pattern: patterns[k % 3],
                density: if k % 2 == 0 { Density::Low } else { Density::High },
                outline: k % 4 == 3,
                color: palette[k % palette.len()],
                ..Default::default()
            },
        );
    }

    Ok(BenchScene {
        seed,
        half_height: (10.0 * terrain.max_abs_height()).max(1.0),
        terrain,
        objects,
        eye,
        target,
        fov_y_deg: 50.0,
        transform,
        rois: RoiSet::new(regions)?,
        styles,
        crs_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_and_deterministic() {
        let a = generate_bench_scene(7, 0).unwrap();
        assert!(a.rois.is_empty());
        let b = generate_bench_scene(7, 5).unwrap();
        let c = generate_bench_scene(7, 5).unwrap();
        assert_eq!(b.rois, c.rois);
        assert_eq!(b.terrain, c.terrain);
        assert_eq!(a.terrain, b.terrain);
    }

    #[test]
    fn regions_are_prefix_stable() {
        let small = generate_bench_scene(11, 4).unwrap();
        let big = generate_bench_scene(11, 12).unwrap();
        assert_eq!(small.rois.regions[..], big.rois.regions[..4]);
    }

    #[test]
    fn thirty_two_regions_bake() {
        let s = generate_bench_scene(7, 32).unwrap();
        assert_eq!(s.rois.len(), 32);
        let bounds = s.rois.crs_bounds.unwrap();
        assert!(s.crs_window.contains(bounds.min) && s.crs_window.contains(bounds.max));
        let assets = s.bake(256).unwrap();
        assert_eq!(assets.meshes.len(), 32);
        assert!(assets.meshes.iter().all(|m| m.open_edge_count() == 0));
        assert_eq!(assets.decals.len(), 32);
        let cam = s.camera(64, 64).unwrap();
        assert!(assets.meshes.iter().all(|m| !m.contains(cam.position)));
    }
}
