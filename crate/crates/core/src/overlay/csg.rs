use rayon::prelude::*;

use super::{OverlayMask, PatternSample};
use crate::bake::{distance_to_boundary, PatternFrame, ShapeMesh};
use crate::geo::{RoiSet, Vec2, WorldCrsTransform};
use crate::scene::raster::ScreenTri;
use crate::scene::{Camera, GBuffer};
use crate::{Error, Result};

/// Relative slack so a crossing exactly at the fragment counts as inside.
const DEPTH_EPS: f64 = 1e-7;
const BAND_ROWS: usize = 16;

fn check_inputs(meshes: &[ShapeMesh], cam: &Camera) -> Result<()> {
    for m in meshes {
        m.check_closed()?;
        if m.contains(cam.position) {
            return Err(Error::CameraInsideSolid(m.region_id));
        }
    }
    Ok(())
}

/// Parity membership of every fragment in every shape mesh.
///
/// Each shape triangle is rasterized with the scene camera and flips a
/// pixel's parity where it lies in front of (or at) the stored fragment.
/// Odd parity means the fragment is inside the solid; later meshes win.
pub fn csg_mask(g: &GBuffer, meshes: &[ShapeMesh], cam: &Camera) -> Result<OverlayMask> {
    check_inputs(meshes, cam)?;
    let (w, h) = (g.width, g.height);
    let setups: Vec<Vec<ScreenTri>> = meshes
        .iter()
        .map(|m| {
            let mut out = Vec::with_capacity(m.triangles.len());
            for (k, t) in m.triangles.iter().enumerate() {
                ScreenTri::setup(k, t.map(|i| m.vertices[i as usize]), cam, w, h, &mut out);
            }
            out
        })
        .collect();
    let mut ids = vec![0u32; w * h];
    ids.par_chunks_mut(BAND_ROWS * w).enumerate().for_each(|(b, band)| {
        let row0 = b * BAND_ROWS;
        let row1 = row0 + band.len() / w;
        let mut parity = vec![false; band.len()];
        for (m, tris) in meshes.iter().zip(&setups) {
            let (mut lo, mut hi) = (usize::MAX, 0);
            for t in tris.iter().filter(|t| t.y0 < row1 && t.y1 > row0) {
                t.rasterize_rows(row0, row1, |f| {
                    let i = f.y * w + f.x;
                    if f.depth <= g.depth[i] * (1.0 + DEPTH_EPS) {
                        let k = i - row0 * w;
                        parity[k] = !parity[k];
                        lo = lo.min(k);
                        hi = hi.max(k + 1);
                    }
                });
            }
            if lo < hi {
                for k in lo..hi {
                    if parity[k] {
                        band[k] = m.region_id;
                        parity[k] = false;
                    }
                }
            }
        }
    });
    Ok(OverlayMask::new(w, h, ids))
}

/// Reference parity pass: casts the camera→fragment segment against every
/// mesh triangle per pixel. Quadratic; meant for cross-checks.
pub fn csg_mask_segment(g: &GBuffer, meshes: &[ShapeMesh], cam: &Camera) -> Result<OverlayMask> {
    check_inputs(meshes, cam)?;
    let ids = (0..g.len())
        .into_par_iter()
        .map(|i| {
            if g.is_sky(i) {
                return 0;
            }
            let dir = g.position[i] - cam.position;
            meshes
                .iter()
                .rev()
                .find(|m| m.ray_crossings(cam.position, dir, 1.0 + DEPTH_EPS) % 2 == 1)
                .map_or(0, |m| m.region_id)
        })
        .collect();
    Ok(OverlayMask::new(g.width, g.height, ids))
}

/// Adds pattern samples to an id mask from each fragment's exact CRS
/// position and its analytic distance to the region outline.
pub fn annotate_pattern(mask: &mut OverlayMask, g: &GBuffer, t: &WorldCrsTransform, set: &RoiSet, frame: &PatternFrame) {
    let samples = mask
        .ids
        .par_iter()
        .enumerate()
        .map(|(i, &id)| {
            let Some(poly) = (id > 0).then(|| set.get(id)).flatten() else {
                return PatternSample::default();
            };
            let p = g.position[i];
            let q = t.crs_from_world(Vec2::new(p.x, p.z));
            let c = frame.coord(q);
            PatternSample {
                coord: [c.x as f32, c.y as f32],
                dist: -frame.length(distance_to_boundary(poly, q)) as f32,
            }
        })
        .collect();
    mask.pattern = Some(samples);
}
