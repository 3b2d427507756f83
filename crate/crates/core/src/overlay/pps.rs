use rayon::prelude::*;

use super::{OverlayMask, PatternSample};
use crate::bake::RoiTexture;
use crate::geo::{Vec2, WorldCrsTransform};
use crate::scene::GBuffer;

/// Maps each fragment into the id texture and reads one texel.
///
/// Every layer is sampled; sky and out-of-window fragments read id 0.
pub fn pps_lookup(g: &GBuffer, t: &WorldCrsTransform, roi: &RoiTexture) -> OverlayMask {
    pps_lookup_counted(g, t, roi).0
}

/// [`pps_lookup`] plus the number of texture fetches performed.
pub fn pps_lookup_counted(g: &GBuffer, t: &WorldCrsTransform, roi: &RoiTexture) -> (OverlayMask, u64) {
    let w = g.width;
    let frame = roi.pattern_frame();
    let mut mask = OverlayMask::empty(w, g.height);
    let mut pattern = vec![PatternSample::default(); g.len()];
    let fetches: u64 = mask
        .ids
        .par_chunks_mut(w)
        .zip(pattern.par_chunks_mut(w))
        .enumerate()
        .map(|(y, (ids, pat))| {
            let mut n = 0;
            for x in 0..w {
                let i = y * w + x;
                let texel = if g.is_sky(i) {
                    None
                } else {
                    let p = g.position[i];
                    roi.texel_of(t.crs_from_world(Vec2::new(p.x, p.z)))
                };
                // one fetch per pixel; outside the window reads the border (id 0)
                n += 1;
                let Some((ti, tj)) = texel else { continue };
                let id = roi.id_at(ti, tj);
                if id == 0 {
                    continue;
                }
                ids[x] = id;
                let c = frame.coord(roi.texel_center(ti, tj));
                pat[x] = PatternSample {
                    coord: [c.x as f32, c.y as f32],
                    dist: (f64::from(roi.dist_at(ti, tj)) / roi.pattern_scale) as f32,
                };
            }
            n
        })
        .sum();
    mask.pattern = Some(pattern);
    (mask, fetches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bake::rasterize_roi;
    use crate::geo::{Rect, RoiPolygon, RoiSet};
    use crate::scene::{rasterize_scene, Camera, Heightfield, Vec3};

    fn unit_tex() -> RoiTexture {
        let ring = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        let set = RoiSet::new(vec![RoiPolygon::from_rings(ring, vec![], 1).unwrap()]).unwrap();
        rasterize_roi(&set, Rect::new(Vec2::zeros(), Vec2::new(1.0, 1.0)), 8, 8).unwrap()
    }

    #[test]
    fn inside_and_outside_window() {
        let hf = Heightfield::flat(5, 5, 0.5, Vec2::new(-0.5, -0.5), 0.0).unwrap();
        let cam = Camera::new(Vec3::new(0.5, 3.0, 0.5), -Vec3::y(), Vec3::z(), 60.0, 1.0, 0.1, 10.0).unwrap();
        let g = rasterize_scene(&hf, &[], &cam, 32, 32).unwrap();
        let roi = unit_tex();
        let (mask, fetches) = pps_lookup_counted(&g, &WorldCrsTransform::identity(), &roi);
        assert_eq!(fetches, 32 * 32);
        for i in 0..g.len() {
            let p = g.position[i];
            let inside = (0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.z) && !g.is_sky(i);
            assert_eq!(mask.ids[i] == 1, inside);
        }
    }
}
