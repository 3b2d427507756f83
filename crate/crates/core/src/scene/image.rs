use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Linear RGB image, row-major with `y` down.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f32; 3]>,
}

#[inline]
fn to_u8(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

impl ColorImage {
    pub fn new(width: usize, height: usize, fill: [f32; 3]) -> Self {
        Self { width, height, data: vec![fill; width * height] }
    }

    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().flat_map(|p| p.map(to_u8)).collect()
    }

    /// Binary `P6` PPM.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        out.write_all(&self.to_rgb8())
    }

    /// Writes PPM or PNG depending on the extension of `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("ppm") => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                self.write_ppm(&mut f)?;
                f.flush()?;
                Ok(())
            }
            Some("png") => {
                image::save_buffer(path, &self.to_rgb8(), self.width as u32, self.height as u32, image::ExtendedColorType::Rgb8)?;
                Ok(())
            }
            _ => Err(Error::InvalidInput(format!("unsupported image extension: {}", path.display()))),
        }
    }
}

/// Straight-alpha RGBA raster; row 0 is the first row written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RgbaRaster {
    pub width: usize,
    pub height: usize,
    pub data: Vec<[f32; 4]>,
}

impl RgbaRaster {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![[0.0; 4]; width * height] }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> [f32; 4] {
        self.data[j * self.width + i]
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self.data.iter().flat_map(|p| p.map(to_u8)).collect();
        image::save_buffer(path, &bytes, self.width as u32, self.height as u32, image::ExtendedColorType::Rgba8)?;
        Ok(())
    }
}
