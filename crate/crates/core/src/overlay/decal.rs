use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::OverlayMask;
use crate::bake::RoiTexture;
use crate::geo::{Rect, Vec2, WorldCrsTransform};
use crate::scene::camera::orthonormal_basis;
use crate::scene::{GBuffer, Layer, RgbaRaster, Vec3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectorMode {
    Perspective { fov_y_deg: f64, aspect: f64 },
    Orthographic { half_width: f64, half_height: f64 },
}

/// Auxiliary camera that maps world points onto a decal texture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projector {
    pub position: Vec3,
    pub forward: Vec3,
    pub up: Vec3,
    pub right: Vec3,
    pub mode: ProjectorMode,
    pub near: f64,
    pub far: f64,
}

impl Projector {
    pub fn new(position: Vec3, forward: Vec3, up: Vec3, mode: ProjectorMode, near: f64, far: f64) -> Result<Self> {
        match mode {
            ProjectorMode::Perspective { fov_y_deg, aspect } => {
                if !(fov_y_deg > 0.0 && fov_y_deg < 180.0 && aspect > 0.0) {
                    return Err(Error::InvalidInput(format!("bad projector frustum: fov {fov_y_deg}, aspect {aspect}")));
                }
                if !(near > 0.0 && near < far) {
                    return Err(Error::InvalidInput(format!("projector needs 0 < near < far, got {near}, {far}")));
                }
            }
            ProjectorMode::Orthographic { half_width, half_height } => {
                if !(half_width > 0.0 && half_height > 0.0) {
                    return Err(Error::InvalidInput("orthographic half-extents must be positive".into()));
                }
                if !(near < far) {
                    return Err(Error::InvalidInput(format!("projector needs near < far, got {near}, {far}")));
                }
            }
        }
        let (forward, up, right) = orthonormal_basis(forward, up)?;
        Ok(Self { position, forward, up, right, mode, near, far })
    }

    /// Vertical orthographic projector whose image is exactly the CRS
    /// rectangle `window`, with image `u` along CRS `u` and `v` along CRS `v`.
    ///
    /// `y_range` is the world height span the projector must enclose.
    pub fn fit(window: &Rect, t: &WorldCrsTransform, y_range: (f64, f64)) -> Result<Self> {
        let corner = t.world_from_crs(window.min);
        let eu = t.world_vector(Vec2::new(window.width(), 0.0));
        let ev = t.world_vector(Vec2::new(0.0, window.height()));
        if eu.dot(&ev).abs() > 1e-9 * eu.norm() * ev.norm() {
            return Err(Error::InvalidInput("decal projection needs a transform without shear".into()));
        }
        let right = Vec3::new(eu.x, 0.0, eu.y).normalize();
        let up = Vec3::new(ev.x, 0.0, ev.y).normalize();
        let forward = up.cross(&right);
        let center = corner + (eu + ev) * 0.5;
        let margin = 1.0 + 0.01 * (y_range.1 - y_range.0).abs();
        let y = if forward.y < 0.0 { y_range.1 + margin } else { y_range.0 - margin };
        let depth = (y_range.1 - y_range.0).abs() + 2.0 * margin;
        Self::new(
            Vec3::new(center.x, y, center.y),
            forward,
            up,
            ProjectorMode::Orthographic { half_width: eu.norm() * 0.5, half_height: ev.norm() * 0.5 },
            0.0,
            depth,
        )
    }
}

/// Image-plane coordinates of `p` in `[0, 1]²`, or `None` outside the frustum.
#[inline]
pub fn decal_uv(proj: &Projector, p: Vec3) -> Option<[f64; 2]> {
    let d = p - proj.position;
    let (x, y, z) = (d.dot(&proj.right), d.dot(&proj.up), d.dot(&proj.forward));
    if !(z >= proj.near && z <= proj.far) {
        return None;
    }
    let (nx, ny) = match proj.mode {
        ProjectorMode::Perspective { fov_y_deg, aspect } => {
            let th = (fov_y_deg.to_radians() * 0.5).tan();
            (x / (z * th * aspect), y / (z * th))
        }
        ProjectorMode::Orthographic { half_width, half_height } => (x / half_width, y / half_height),
    };
    let (u, v) = ((nx + 1.0) * 0.5, (ny + 1.0) * 0.5);
    ((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)).then_some([u, v])
}

/// Decal image in projector order: row 0 is the top edge (`v = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct DecalTexture {
    pub width: usize,
    pub height: usize,
    pub rgba: Vec<[f32; 4]>,
    pub ids: Vec<u32>,
}

impl DecalTexture {
    /// Flips a baked style texture (rows by ascending CRS `v`) into projector
    /// order, keeping only texels whose id is in `keep` (all when `None`).
    pub fn from_baked(roi: &RoiTexture, baked: &RgbaRaster, keep: Option<u32>) -> Result<Self> {
        if roi.width != baked.width || roi.height != baked.height {
            return Err(Error::DimensionMismatch(roi.width, roi.height, baked.width, baked.height));
        }
        let n = roi.width * roi.height;
        let mut rgba = Vec::with_capacity(n);
        let mut ids = Vec::with_capacity(n);
        for j in (0..roi.height).rev() {
            for i in 0..roi.width {
                let id = roi.id_at(i, j);
                if keep.is_none_or(|k| k == id) {
                    rgba.push(baked.at(i, j));
                    ids.push(id);
                } else {
                    rgba.push([0.0; 4]);
                    ids.push(0);
                }
            }
        }
        Ok(Self { width: roi.width, height: roi.height, rgba, ids })
    }

    #[inline]
    fn texel(&self, uv: [f64; 2]) -> usize {
        let i = ((uv[0] * self.width as f64) as usize).min(self.width - 1);
        let j = (((1.0 - uv[1]) * self.height as f64) as usize).min(self.height - 1);
        j * self.width + i
    }

    fn bilinear(&self, uv: [f64; 2]) -> [f32; 4] {
        let fx = (uv[0] * self.width as f64 - 0.5).clamp(0.0, (self.width - 1) as f64);
        let fy = ((1.0 - uv[1]) * self.height as f64 - 0.5).clamp(0.0, (self.height - 1) as f64);
        let (i0, j0) = (fx as usize, fy as usize);
        let (i1, j1) = ((i0 + 1).min(self.width - 1), (j0 + 1).min(self.height - 1));
        let (tx, ty) = ((fx - i0 as f64) as f32, (fy - j0 as f64) as f32);
        let at = |i: usize, j: usize| self.rgba[j * self.width + i];
        let (a, b, c, d) = (at(i0, j0), at(i1, j0), at(i0, j1), at(i1, j1));
        std::array::from_fn(|k| {
            let top = a[k] + (b[k] - a[k]) * tx;
            let bottom = c[k] + (d[k] - c[k]) * tx;
            top + (bottom - top) * ty
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerFilter {
    #[default]
    TerrainOnly,
    All,
}

impl LayerFilter {
    #[inline]
    fn accepts(self, layer: Layer) -> bool {
        match self {
            LayerFilter::TerrainOnly => layer == Layer::Terrain,
            LayerFilter::All => layer != Layer::Sky,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DecalOptions {
    pub filter: LayerFilter,
    /// Bilinear colour filtering; ids are always nearest.
    pub bilinear: bool,
}

/// One full-screen decal pass.
pub fn apply_decal(g: &GBuffer, proj: &Projector, tex: &DecalTexture, opts: DecalOptions) -> Result<OverlayMask> {
    apply_decals(g, &[(*proj, tex)], opts)
}

/// Runs one full-screen pass per projector, blending samples "over" the
/// accumulated result in list order.
///
/// A pixel takes the id of the texel it samples whenever that texel belongs
/// to a region, so ids give region membership while alpha carries pattern
/// and opacity.
pub fn apply_decals(g: &GBuffer, decals: &[(Projector, &DecalTexture)], opts: DecalOptions) -> Result<OverlayMask> {
    if decals.iter().any(|(_, t)| t.width == 0 || t.height == 0) {
        return Err(Error::InvalidInput("decal texture is empty".into()));
    }
    let w = g.width;
    let mut mask = OverlayMask::empty(w, g.height);
    let mut rgba = vec![[0.0f32; 4]; g.len()];
    for (proj, tex) in decals {
        mask.ids
            .par_chunks_mut(w)
            .zip(rgba.par_chunks_mut(w))
            .enumerate()
            .for_each(|(y, (ids, acc))| {
                for x in 0..w {
                    let i = y * w + x;
                    if !opts.filter.accepts(g.layer[i]) {
                        continue;
                    }
                    let Some(uv) = decal_uv(proj, g.position[i]) else { continue };
                    let k = tex.texel(uv);
                    if tex.ids[k] == 0 {
                        continue;
                    }
                    ids[x] = tex.ids[k];
                    let src = if opts.bilinear { tex.bilinear(uv) } else { tex.rgba[k] };
                    if src[3] > 0.0 {
                        acc[x] = over(src, acc[x]);
                    }
                }
            });
    }
    mask.rgba = Some(rgba);
    Ok(mask)
}

/// Straight-alpha "over".
#[inline]
fn over(src: [f32; 4], dst: [f32; 4]) -> [f32; 4] {
    if dst[3] == 0.0 {
        return src;
    }
    let a = src[3] + dst[3] * (1.0 - src[3]);
    let mix = |s: f32, d: f32| (s * src[3] + d * dst[3] * (1.0 - src[3])) / a;
    [mix(src[0], dst[0]), mix(src[1], dst[1]), mix(src[2], dst[2]), a]
}
