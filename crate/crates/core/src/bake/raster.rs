use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::edt::signed_distance_field;
use super::polygon::{crossing_x, straddles};
use crate::geo::{Rect, RoiSet, Vec2};
use crate::style::REFERENCE_WIDTH;
use crate::{Error, Result};

/// Region-id raster over an axis-aligned CRS window.
///
/// Row `j` holds CRS `v` ascending from `crs_window.min.y`; column `i` holds
/// `u` ascending from `crs_window.min.x`. Id 0 means "no region".
#[derive(Debug, Clone, PartialEq)]
pub struct RoiTexture {
    pub width: usize,
    pub height: usize,
    pub crs_window: Rect,
    pub id_grid: Vec<u32>,
    /// Signed distance to the nearest region boundary in texels, negative inside.
    pub dist_grid: Vec<f32>,
    /// Where this texture's texel (0, 0) sits in the pattern lattice.
    pub texel_origin: [i64; 2],
    /// Texels per reference-resolution pixel, used to scale pattern geometry.
    pub pattern_scale: f64,
}

impl RoiTexture {
    pub fn texel_size(&self) -> Vec2 {
        Vec2::new(self.crs_window.width() / self.width as f64, self.crs_window.height() / self.height as f64)
    }

    /// CRS position of the centre of texel `(i, j)`.
    pub fn texel_center(&self, i: usize, j: usize) -> Vec2 {
        texel_center(&self.crs_window, self.width, self.height, i, j)
    }

    /// Texel containing `q` (nearest texel centre), or `None` outside the
    /// half-open window.
    #[inline]
    pub fn texel_of(&self, q: Vec2) -> Option<(usize, usize)> {
        let w = &self.crs_window;
        let fx = (q.x - w.min.x) / w.width() * self.width as f64;
        let fy = (q.y - w.min.y) / w.height() * self.height as f64;
        if fx >= 0.0 && fy >= 0.0 && fx < self.width as f64 && fy < self.height as f64 {
            Some((fx as usize, fy as usize))
        } else {
            None
        }
    }

    #[inline]
    pub fn id_at(&self, i: usize, j: usize) -> u32 {
        self.id_grid[j * self.width + i]
    }

    #[inline]
    pub fn dist_at(&self, i: usize, j: usize) -> f32 {
        self.dist_grid[j * self.width + i]
    }

    /// Mapping from CRS points to pattern-lattice coordinates.
    pub fn pattern_frame(&self) -> PatternFrame {
        let ts = self.texel_size();
        PatternFrame {
            origin: self.crs_window.min,
            texel_size: ts,
            texel_origin: Vec2::new(self.texel_origin[0] as f64, self.texel_origin[1] as f64),
            pattern_scale: self.pattern_scale,
        }
    }

    /// Writes the id grid as a 16-bit grayscale PNG plus a JSON sidecar.
    pub fn write_png(&self, png: &Path, sidecar: &Path) -> Result<()> {
        let mut pixels = Vec::with_capacity(self.id_grid.len());
        for &id in &self.id_grid {
            pixels.push(u16::try_from(id).map_err(|_| {
                Error::InvalidInput(format!("region id {id} does not fit a 16-bit texture"))
            })?);
        }
        let img = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(self.width as u32, self.height as u32, pixels)
            .expect("buffer size matches dimensions");
        img.save_with_format(png, image::ImageFormat::Png)?;
        let header = TextureHeader {
            width: self.width,
            height: self.height,
            crs_window: [
                self.crs_window.min.x,
                self.crs_window.min.y,
                self.crs_window.max.x,
                self.crs_window.max.y,
            ],
            row_order: "v_ascending".into(),
            texel_origin: self.texel_origin,
            pattern_scale: self.pattern_scale,
        };
        std::fs::write(sidecar, serde_json::to_string_pretty(&header)? + "\n")?;
        Ok(())
    }

    /// Copy covering texels `[i0, i0 + w) × [j0, j0 + h)` with the pattern
    /// lattice kept aligned to this texture.
    pub fn sub_texture(&self, i0: usize, j0: usize, w: usize, h: usize) -> RoiTexture {
        let ts = self.texel_size();
        let min = self.crs_window.min + Vec2::new(i0 as f64 * ts.x, j0 as f64 * ts.y);
        let max = min + Vec2::new(w as f64 * ts.x, h as f64 * ts.y);
        let mut id_grid = Vec::with_capacity(w * h);
        let mut dist_grid = Vec::with_capacity(w * h);
        for j in j0..j0 + h {
            id_grid.extend_from_slice(&self.id_grid[j * self.width + i0..j * self.width + i0 + w]);
            dist_grid.extend_from_slice(&self.dist_grid[j * self.width + i0..j * self.width + i0 + w]);
        }
        RoiTexture {
            width: w,
            height: h,
            crs_window: Rect::new(min, max),
            id_grid,
            dist_grid,
            texel_origin: [self.texel_origin[0] + i0 as i64, self.texel_origin[1] + j0 as i64],
            pattern_scale: self.pattern_scale,
        }
    }
}

/// JSON sidecar stored next to an id-texture PNG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextureHeader {
    pub width: usize,
    pub height: usize,
    /// `[u_min, v_min, u_max, v_max]`
    pub crs_window: [f64; 4],
    pub row_order: String,
    pub texel_origin: [i64; 2],
    pub pattern_scale: f64,
}

/// Converts CRS positions into pattern coordinates (reference pixels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternFrame {
    pub origin: Vec2,
    pub texel_size: Vec2,
    pub texel_origin: Vec2,
    pub pattern_scale: f64,
}

impl PatternFrame {
    /// Continuous lattice position of `q`; texel centres land on `k + 0.5`.
    pub fn coord(&self, q: Vec2) -> Vec2 {
        let t = (q - self.origin).component_div(&self.texel_size) + self.texel_origin;
        t / self.pattern_scale
    }

    /// Converts a CRS length into reference pixels.
    pub fn length(&self, crs: f64) -> f64 {
        crs / (0.5 * (self.texel_size.x + self.texel_size.y)) / self.pattern_scale
    }
}

#[inline]
pub(crate) fn texel_center(window: &Rect, width: usize, height: usize, i: usize, j: usize) -> Vec2 {
    let du = window.width() / width as f64;
    let dv = window.height() / height as f64;
    Vec2::new(window.min.x + (i as f64 + 0.5) * du, window.min.y + (j as f64 + 0.5) * dv)
}

/// Rasterizes every region at texel centres with the even-odd rule.
///
/// Later regions overwrite earlier ones where they overlap. The distance
/// channel is the exact signed Euclidean distance to the id boundary.
pub fn rasterize_roi(set: &RoiSet, crs_window: Rect, width: usize, height: usize) -> Result<RoiTexture> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidInput(format!("texture size must be at least 1x1, got {width}x{height}")));
    }
    if crs_window.is_degenerate() {
        return Err(Error::InvalidInput("CRS window must have positive width and height".into()));
    }
    let du = crs_window.width() / width as f64;
    let u_at = |i: usize| crs_window.min.x + (i as f64 + 0.5) * du;
    // First column whose centre is >= x.
    let first_at_or_after = |x: f64| -> usize {
        let guess = ((x - crs_window.min.x) / du - 0.5).ceil();
        let mut i = guess.clamp(0.0, width as f64) as usize;
        while i > 0 && u_at(i - 1) >= x {
            i -= 1;
        }
        while i < width && u_at(i) < x {
            i += 1;
        }
        i
    };
    let bounds: Vec<Rect> = set.regions.iter().map(|r| r.bounds()).collect();

    let mut id_grid = vec![0u32; width * height];
    id_grid.par_chunks_mut(width).enumerate().for_each(|(j, row)| {
        let v = texel_center(&crs_window, width, height, 0, j).y;
        let mut xs = Vec::new();
        for (region, b) in set.regions.iter().zip(&bounds) {
            if v < b.min.y || v > b.max.y {
                continue;
            }
            xs.clear();
            for ring in region.rings() {
                let n = ring.len();
                for k in 0..n {
                    let (a, c) = (ring[k], ring[(k + 1) % n]);
                    if straddles(a, c, v) {
                        xs.push(crossing_x(a, c, v));
                    }
                }
            }
            xs.sort_by(f64::total_cmp);
            for span in xs.chunks_exact(2) {
                let (start, end) = (first_at_or_after(span[0]), first_at_or_after(span[1]));
                row[start..end.max(start)].fill(region.region_id);
            }
        }
    });
    let dist_grid = signed_distance_field(&id_grid, width, height);
    Ok(RoiTexture {
        width,
        height,
        crs_window,
        id_grid,
        dist_grid,
        texel_origin: [0, 0],
        pattern_scale: width as f64 / REFERENCE_WIDTH,
    })
}
