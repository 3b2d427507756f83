use std::path::Path;

use rand::{Rng, SeedableRng};

use super::Vec3;
use crate::geo::{Rect, Vec2};
use crate::{Error, Result};

/// Regular grid of elevations. Vertex `(i, k)` sits at
/// `(origin.x + i·cell_size, heights[k·nx + i], origin.y + k·cell_size)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Heightfield {
    pub nx: usize,
    pub nz: usize,
    pub cell_size: f64,
    pub origin: Vec2,
    pub heights: Vec<f64>,
}

impl Heightfield {
    pub fn new(nx: usize, nz: usize, cell_size: f64, origin: Vec2, heights: Vec<f64>) -> Result<Self> {
        if nx < 2 || nz < 2 {
            return Err(Error::InvalidInput(format!("heightfield needs at least 2x2 samples, got {nx}x{nz}")));
        }
        if heights.len() != nx * nz {
            return Err(Error::InvalidInput(format!("expected {} heights, got {}", nx * nz, heights.len())));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::InvalidInput(format!("cell size must be positive, got {cell_size}")));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::InvalidInput("heights must be finite".into()));
        }
        Ok(Self { nx, nz, cell_size, origin, heights })
    }

    pub fn flat(nx: usize, nz: usize, cell_size: f64, origin: Vec2, height: f64) -> Result<Self> {
        Self::new(nx, nz, cell_size, origin, vec![height; nx * nz])
    }

    /// Seeded multi-octave value noise scaled to `[-amplitude, amplitude]`.
    ///
    /// `feature_size` is the world-space wavelength of the lowest octave.
    pub fn procedural(
        seed: u64,
        nx: usize,
        nz: usize,
        cell_size: f64,
        origin: Vec2,
        amplitude: f64,
        feature_size: f64,
    ) -> Result<Self> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let extent = (nx.max(nz) as f64) * cell_size;
        let octaves = 4;
        let mut heights = vec![0.0; nx * nz];
        let mut amp = 1.0;
        let mut total = 0.0;
        let mut wavelength = feature_size.max(cell_size);
        for _ in 0..octaves {
            let cells = (extent / wavelength).ceil() as usize + 2;
            let lattice: Vec<f64> = (0..cells * cells).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for k in 0..nz {
                for i in 0..nx {
                    let fx = i as f64 * cell_size / wavelength;
                    let fz = k as f64 * cell_size / wavelength;
                    let (x0, z0) = (fx.floor() as usize, fz.floor() as usize);
                    let (tx, tz) = (smooth(fx.fract()), smooth(fz.fract()));
                    let at = |x: usize, z: usize| lattice[z * cells + x];
                    let top = at(x0, z0) * (1.0 - tx) + at(x0 + 1, z0) * tx;
                    let bottom = at(x0, z0 + 1) * (1.0 - tx) + at(x0 + 1, z0 + 1) * tx;
                    heights[k * nx + i] += amp * (top * (1.0 - tz) + bottom * tz);
                }
            }
            total += amp;
            amp *= 0.5;
            wavelength *= 0.5;
        }
        heights.iter_mut().for_each(|h| *h *= amplitude / total);
        Self::new(nx, nz, cell_size, origin, heights)
    }

    /// Loads a 16-bit grayscale PNG: `height = value / 65535 · scale + offset`.
    pub fn from_png(path: &Path, cell_size: f64, origin: Vec2, scale: f64, offset: f64) -> Result<Self> {
        if !path.exists() {
            return Err(Error::NoSuchInput(path.to_path_buf()));
        }
        let img = image::open(path)?.into_luma16();
        let (w, h) = img.dimensions();
        let heights = img.pixels().map(|p| p.0[0] as f64 / 65535.0 * scale + offset).collect();
        Self::new(w as usize, h as usize, cell_size, origin, heights)
    }

    #[inline]
    pub fn height(&self, i: usize, k: usize) -> f64 {
        self.heights[k * self.nx + i]
    }

    #[inline]
    pub fn position(&self, i: usize, k: usize) -> Vec3 {
        Vec3::new(
            self.origin.x + i as f64 * self.cell_size,
            self.height(i, k),
            self.origin.y + k as f64 * self.cell_size,
        )
    }

    /// Vertex normal from central differences (one-sided at the border).
    pub fn normal(&self, i: usize, k: usize) -> Vec3 {
        let (i0, i1) = (i.saturating_sub(1), (i + 1).min(self.nx - 1));
        let (k0, k1) = (k.saturating_sub(1), (k + 1).min(self.nz - 1));
        let dhdx = (self.height(i1, k) - self.height(i0, k)) / ((i1 - i0) as f64 * self.cell_size);
        let dhdz = (self.height(i, k1) - self.height(i, k0)) / ((k1 - k0) as f64 * self.cell_size);
        Vec3::new(-dhdx, 1.0, -dhdz).normalize()
    }

    pub fn max_abs_height(&self) -> f64 {
        self.heights.iter().fold(0.0, |m, h| m.max(h.abs()))
    }

    /// Ground-plane extent `(x, z)`.
    pub fn extent(&self) -> Rect {
        let size = Vec2::new((self.nx - 1) as f64, (self.nz - 1) as f64) * self.cell_size;
        Rect::new(self.origin, self.origin + size)
    }

    /// Two triangles per cell as vertex-index triples into the grid.
    pub(crate) fn triangles(&self) -> impl Iterator<Item = [(usize, usize); 3]> + '_ {
        (0..self.nz - 1).flat_map(move |k| {
            (0..self.nx - 1).flat_map(move |i| {
                [[(i, k), (i, k + 1), (i + 1, k)], [(i + 1, k), (i, k + 1), (i + 1, k + 1)]]
            })
        })
    }
}

fn smooth(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_normals_point_up() {
        let hf = Heightfield::flat(4, 3, 1.0, Vec2::zeros(), 2.0).unwrap();
        for k in 0..3 {
            for i in 0..4 {
                assert_eq!(hf.normal(i, k), Vec3::y());
            }
        }
        assert_eq!(hf.triangles().count(), 12);
    }

    #[test]
    fn slope_normal() {
        let heights = (0..9).map(|n| (n % 3) as f64).collect();
        let hf = Heightfield::new(3, 3, 1.0, Vec2::zeros(), heights).unwrap();
        let n = hf.normal(1, 1);
        let expected = Vec3::new(-1.0, 1.0, 0.0).normalize();
        assert!((n - expected).norm() < 1e-12);
    }

    #[test]
    fn procedural_is_seeded_and_bounded() {
        let a = Heightfield::procedural(7, 33, 33, 2.0, Vec2::zeros(), 10.0, 32.0).unwrap();
        let b = Heightfield::procedural(7, 33, 33, 2.0, Vec2::zeros(), 10.0, 32.0).unwrap();
        let c = Heightfield::procedural(8, 33, 33, 2.0, Vec2::zeros(), 10.0, 32.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.max_abs_height() <= 10.0 && a.max_abs_height() > 0.5);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Heightfield::flat(1, 3, 1.0, Vec2::zeros(), 0.0).is_err());
        assert!(Heightfield::new(2, 2, 1.0, Vec2::zeros(), vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
    }
}
