use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{annotate_pattern, apply_decals, csg_mask, pps_lookup_counted, DecalOptions, DecalTexture, OverlayMask, Projector};
use crate::bake::{bake_style_texture, extrude_polygon, rasterize_roi, RoiTexture, ShapeMesh};
use crate::geo::{Rect, RoiSet, WorldCrsTransform};
use crate::scene::{Camera, GBuffer};
use crate::style::StyleSet;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Csg,
    Decal,
    Pps,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::Csg, Technique::Decal, Technique::Pps];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Csg => "csg",
            Technique::Decal => "decal",
            Technique::Pps => "pps",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Technique::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown technique '{s}' (expected csg, decal or pps)")))
    }
}

/// Everything the three techniques need for one set of regions sharing a
/// world/CRS transform.
#[derive(Debug, Clone)]
pub struct OverlayAssets {
    pub transform: WorldCrsTransform,
    pub rois: RoiSet,
    /// Extruded solids, one per region in region order.
    pub meshes: Vec<ShapeMesh>,
    /// All regions merged into one id texture.
    pub texture: RoiTexture,
    /// One projector per region, each with a texture cropped to the region.
    pub decals: Vec<(Projector, DecalTexture)>,
}

impl OverlayAssets {
    /// Bakes meshes, the merged id texture and per-region decals.
    ///
    /// `y_range` is the world height span decal projectors must enclose.
    pub fn bake(
        rois: RoiSet,
        styles: &StyleSet,
        transform: WorldCrsTransform,
        window: Rect,
        texture_size: usize,
        half_height: f64,
        y_range: (f64, f64),
    ) -> Result<Self> {
        let meshes = rois
            .regions
            .iter()
            .map(|p| extrude_polygon(p, &transform, half_height))
            .collect::<Result<Vec<_>>>()?;
        let texture = rasterize_roi(&rois, window, texture_size, texture_size)?;
        let mut decals = Vec::with_capacity(rois.len());
        for poly in &rois.regions {
            let Some((i0, j0, w, h)) = texel_range(&texture, &poly.bounds()) else { continue };
            let sub = texture.sub_texture(i0, j0, w, h);
            let baked = bake_style_texture(&sub, styles)?;
            let projector = Projector::fit(&sub.crs_window, &transform, y_range)?;
            decals.push((projector, DecalTexture::from_baked(&sub, &baked, Some(poly.region_id))?));
        }
        Ok(Self { transform, rois, meshes, texture, decals })
    }

    /// Runs one technique over a G-buffer. The second value is the number
    /// of id-texture fetches (PPS only).
    pub fn mask(&self, technique: Technique, g: &GBuffer, cam: &Camera, decal: DecalOptions) -> Result<(OverlayMask, Option<u64>)> {
        match technique {
            Technique::Csg => {
                let mut mask = csg_mask(g, &self.meshes, cam)?;
                annotate_pattern(&mut mask, g, &self.transform, &self.rois, &self.texture.pattern_frame());
                Ok((mask, None))
            }
            Technique::Decal => {
                let list: Vec<(Projector, &DecalTexture)> = self.decals.iter().map(|(p, t)| (*p, t)).collect();
                Ok((apply_decals(g, &list, decal)?, None))
            }
            Technique::Pps => {
                let (mask, fetches) = pps_lookup_counted(g, &self.transform, &self.texture);
                Ok((mask, Some(fetches)))
            }
        }
    }
}

/// Texel rectangle `(i0, j0, w, h)` covering `bounds` plus one texel, or
/// `None` when it misses the texture.
fn texel_range(tex: &RoiTexture, bounds: &Rect) -> Option<(usize, usize, usize, usize)> {
    let ts = tex.texel_size();
    let w = &tex.crs_window;
    let lo_x = ((bounds.min.x - w.min.x) / ts.x).floor() as i64 - 1;
    let lo_y = ((bounds.min.y - w.min.y) / ts.y).floor() as i64 - 1;
    let hi_x = ((bounds.max.x - w.min.x) / ts.x).ceil() as i64 + 1;
    let hi_y = ((bounds.max.y - w.min.y) / ts.y).ceil() as i64 + 1;
    let (i0, j0) = (lo_x.max(0) as usize, lo_y.max(0) as usize);
    let (i1, j1) = (hi_x.min(tex.width as i64).max(0) as usize, hi_y.min(tex.height as i64).max(0) as usize);
    (i0 < i1 && j0 < j1).then(|| (i0, j0, i1 - i0, j1 - j0))
}
