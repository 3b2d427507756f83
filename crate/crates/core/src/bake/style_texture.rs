use super::RoiTexture;
use crate::geo::Vec2;
use crate::scene::RgbaRaster;
use crate::style::{eval_pattern, StyleSet};
use crate::Result;

/// Bakes pattern, outline and opacity into a straight-alpha RGBA texture
/// laid out like `roi` (row 0 = lowest `v`).
///
/// Alpha is the raw style opacity; the opacity policy is applied when the
/// texture is composited.
pub fn bake_style_texture(roi: &RoiTexture, styles: &StyleSet) -> Result<RgbaRaster> {
    let frame = roi.pattern_frame();
    let mut out = RgbaRaster::new(roi.width, roi.height);
    for j in 0..roi.height {
        for i in 0..roi.width {
            let id = roi.id_at(i, j);
            if id == 0 {
                continue;
            }
            let style = styles.get(id)?;
            let coord = frame.coord(roi.texel_center(i, j));
            let dist = f64::from(roi.dist_at(i, j)) / roi.pattern_scale;
            let alpha = if eval_pattern(style, coord, dist) { style.opacity } else { 0.0 };
            let [r, g, b] = style.color;
            out.data[j * roi.width + i] = [r, g, b, alpha];
        }
    }
    Ok(out)
}

/// Texel-centre pattern coordinate, exposed for tests.
#[allow(dead_code)]
pub(crate) fn texel_pattern_coord(roi: &RoiTexture, i: usize, j: usize) -> Vec2 {
    roi.pattern_frame().coord(roi.texel_center(i, j))
}
