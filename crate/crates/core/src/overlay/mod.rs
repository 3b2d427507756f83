//! The three overlay-membership passes over a G-buffer.

mod assets;
mod csg;
mod decal;
mod pps;

use std::path::Path;

pub use assets::{OverlayAssets, Technique};
pub use csg::{annotate_pattern, csg_mask, csg_mask_segment};
pub use decal::{apply_decal, apply_decals, decal_uv, DecalOptions, DecalTexture, LayerFilter, Projector, ProjectorMode};
pub use pps::{pps_lookup, pps_lookup_counted};

use crate::{Error, Result};

/// Pattern lattice coordinate and signed boundary distance, in reference pixels.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PatternSample {
    pub coord: [f32; 2],
    pub dist: f32,
}

/// Per-pixel overlay result, laid out like the G-buffer it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayMask {
    pub width: usize,
    pub height: usize,
    /// Region id per pixel, 0 for none.
    pub ids: Vec<u32>,
    /// Pattern inputs for id pixels, used when `rgba` is absent.
    pub pattern: Option<Vec<PatternSample>>,
    /// Baked straight-alpha colour per pixel (decal).
    pub rgba: Option<Vec<[f32; 4]>>,
}

impl OverlayMask {
    pub fn new(width: usize, height: usize, ids: Vec<u32>) -> Self {
        assert_eq!(ids.len(), width * height, "mask size");
        Self { width, height, ids, pattern: None, rgba: None }
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![0; width * height])
    }

    pub fn covered(&self) -> usize {
        self.ids.iter().filter(|&&id| id > 0).count()
    }

    /// Overwrites this mask wherever `other` has an id.
    pub fn merge_over(&mut self, other: &OverlayMask) -> Result<()> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch(self.width, self.height, other.width, other.height));
        }
        let n = self.ids.len();
        if other.pattern.is_some() && self.pattern.is_none() {
            self.pattern = Some(vec![PatternSample::default(); n]);
        }
        if other.rgba.is_some() && self.rgba.is_none() {
            self.rgba = Some(vec![[0.0; 4]; n]);
        }
        for i in 0..n {
            if other.ids[i] == 0 {
                continue;
            }
            self.ids[i] = other.ids[i];
            if let (Some(dst), Some(src)) = (&mut self.pattern, &other.pattern) {
                dst[i] = src[i];
            }
            if let (Some(dst), Some(src)) = (&mut self.rgba, &other.rgba) {
                dst[i] = src[i];
            }
        }
        Ok(())
    }

    /// Writes the ids as a 16-bit grayscale PNG.
    pub fn write_png(&self, path: &Path) -> Result<()> {
        let pixels = self
            .ids
            .iter()
            .map(|&id| u16::try_from(id).map_err(|_| Error::InvalidInput(format!("region id {id} does not fit 16 bits"))))
            .collect::<Result<Vec<u16>>>()?;
        let img = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(self.width as u32, self.height as u32, pixels)
            .expect("buffer size matches dimensions");
        img.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }
}
