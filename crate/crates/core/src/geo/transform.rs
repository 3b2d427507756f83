use nalgebra::Matrix2;

use super::Vec2;
use crate::{Error, Result};

/// Affine map from the world ground plane `(x, z)` to CRS `(u, v)`:
/// `(u, v) = (a·x + b·z + tx, c·x + d·z + ty)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorldCrsTransform {
    linear: Matrix2<f64>,
    translation: Vec2,
    inverse: Matrix2<f64>,
}

impl WorldCrsTransform {
    pub fn new(a: f64, b: f64, c: f64, d: f64, tx: f64, ty: f64) -> Result<Self> {
        let linear = Matrix2::new(a, b, c, d);
        let det = linear.determinant();
        if !(det.abs() > 1e-12) || !det.is_finite() || !tx.is_finite() || !ty.is_finite() {
            return Err(Error::SingularTransform(det));
        }
        let inverse = Matrix2::new(d, -b, -c, a) / det;
        Ok(Self { linear, translation: Vec2::new(tx, ty), inverse })
    }

    /// From the six-number config form `[a, b, c, d, tx, ty]`.
    pub fn from_array(v: [f64; 6]) -> Result<Self> {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn identity() -> Self {
        Self::new(1.0, 0.0, 0.0, 1.0, 0.0, 0.0).unwrap()
    }

    /// Uniform scale followed by a translation.
    pub fn scale_translate(scale: f64, tx: f64, ty: f64) -> Result<Self> {
        Self::new(scale, 0.0, 0.0, scale, tx, ty)
    }

    pub fn to_array(&self) -> [f64; 6] {
        let m = &self.linear;
        [m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)], self.translation.x, self.translation.y]
    }

    pub fn linear(&self) -> Matrix2<f64> {
        self.linear
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }

    pub fn crs_from_world(&self, p: Vec2) -> Vec2 {
        self.linear * p + self.translation
    }

    pub fn world_from_crs(&self, q: Vec2) -> Vec2 {
        self.inverse * (q - self.translation)
    }

    /// World-space vector corresponding to a CRS displacement.
    pub fn world_vector(&self, dq: Vec2) -> Vec2 {
        self.inverse * dq
    }
}
