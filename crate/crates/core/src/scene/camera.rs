use super::Vec3;
use crate::{Error, Result};

/// Pinhole camera. `forward`, `up` and `right` form an orthonormal basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub position: Vec3,
    pub forward: Vec3,
    pub up: Vec3,
    pub right: Vec3,
    pub fov_y_deg: f64,
    pub aspect: f64,
    pub near: f64,
    pub far: f64,
    tan_half: f64,
}

/// Result of projecting a world point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    /// Pixel coordinates (origin top-left, `y` down) and depth along `forward`.
    Visible { x: f64, y: f64, depth: f64 },
    /// The point is closer than the near plane or behind the camera.
    Behind,
}

impl Camera {
    pub fn new(position: Vec3, forward: Vec3, up: Vec3, fov_y_deg: f64, aspect: f64, near: f64, far: f64) -> Result<Self> {
        if !(near > 0.0 && near < far) {
            return Err(Error::InvalidInput(format!("camera needs 0 < near < far, got near={near} far={far}")));
        }
        if !(fov_y_deg > 0.0 && fov_y_deg < 180.0) {
            return Err(Error::InvalidInput(format!("camera field of view must be in (0, 180), got {fov_y_deg}")));
        }
        if !(aspect > 0.0 && aspect.is_finite()) {
            return Err(Error::InvalidInput(format!("camera aspect must be positive, got {aspect}")));
        }
        let (forward, up, right) = orthonormal_basis(forward, up)?;
        Ok(Self {
            position,
            forward,
            up,
            right,
            fov_y_deg,
            aspect,
            near,
            far,
            tan_half: (fov_y_deg.to_radians() * 0.5).tan(),
        })
    }

    pub fn look_at(position: Vec3, target: Vec3, up: Vec3, fov_y_deg: f64, aspect: f64, near: f64, far: f64) -> Result<Self> {
        Self::new(position, target - position, up, fov_y_deg, aspect, near, far)
    }

    /// Camera-space coordinates: `x` right, `y` up, `z` depth along `forward`.
    #[inline]
    pub fn view(&self, p: Vec3) -> Vec3 {
        let d = p - self.position;
        Vec3::new(d.dot(&self.right), d.dot(&self.up), d.dot(&self.forward))
    }

    /// Pixel coordinates of a camera-space point with positive depth.
    #[inline]
    pub fn screen_of_view(&self, v: Vec3, width: usize, height: usize) -> (f64, f64) {
        let ndc_x = v.x / (v.z * self.tan_half * self.aspect);
        let ndc_y = v.y / (v.z * self.tan_half);
        ((ndc_x + 1.0) * 0.5 * width as f64, (1.0 - ndc_y) * 0.5 * height as f64)
    }

    pub fn project(&self, p: Vec3, width: usize, height: usize) -> Projection {
        let v = self.view(p);
        if !(v.z >= self.near) {
            return Projection::Behind;
        }
        let (x, y) = self.screen_of_view(v, width, height);
        Projection::Visible { x, y, depth: v.z }
    }

    /// World point at pixel `(x, y)` and camera depth `depth`.
    pub fn unproject(&self, x: f64, y: f64, depth: f64, width: usize, height: usize) -> Vec3 {
        let ndc_x = 2.0 * x / width as f64 - 1.0;
        let ndc_y = 1.0 - 2.0 * y / height as f64;
        let vx = ndc_x * depth * self.tan_half * self.aspect;
        let vy = ndc_y * depth * self.tan_half;
        self.position + self.right * vx + self.up * vy + self.forward * depth
    }

    /// World-space direction of the ray through pixel `(x, y)`, with unit depth.
    pub fn ray_direction(&self, x: f64, y: f64, width: usize, height: usize) -> Vec3 {
        self.unproject(x, y, 1.0, width, height) - self.position
    }
}

/// Normalizes `forward` and re-derives `up` perpendicular to it.
pub(crate) fn orthonormal_basis(forward: Vec3, up: Vec3) -> Result<(Vec3, Vec3, Vec3)> {
    let f = forward
        .try_normalize(1e-12)
        .ok_or_else(|| Error::InvalidInput("forward direction must be non-zero".into()))?;
    let r = f
        .cross(&up)
        .try_normalize(1e-9)
        .ok_or_else(|| Error::InvalidInput("up direction must not be parallel to forward".into()))?;
    let u = r.cross(&f);
    Ok((f, u, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn cam() -> Camera {
        Camera::look_at(Vec3::new(3.0, 10.0, -4.0), Vec3::zeros(), Vec3::y(), 60.0, 1.5, 0.1, 1000.0).unwrap()
    }

    #[test]
    fn optical_axis_hits_center() {
        let c = cam();
        let p = c.position + c.forward * 7.5;
        match c.project(p, 300, 200) {
            Projection::Visible { x, y, depth } => {
                assert!((x - 150.0).abs() < 1e-9 && (y - 100.0).abs() < 1e-9);
                assert!((depth - 7.5).abs() < 1e-12);
            }
            Projection::Behind => panic!("point in front of the camera"),
        }
    }

    #[test]
    fn behind_camera() {
        let c = cam();
        assert_eq!(c.project(c.position - c.forward, 300, 200), Projection::Behind);
    }

    #[test]
    fn unproject_inverts_project() {
        let c = cam();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let mut checked = 0;
        while checked < 1000 {
            let p = Vec3::new(rng.gen_range(-20.0..20.0), rng.gen_range(-5.0..5.0), rng.gen_range(-20.0..20.0));
            if let Projection::Visible { x, y, depth } = c.project(p, 640, 480) {
                if (0.0..640.0).contains(&x) && (0.0..480.0).contains(&y) {
                    assert!((c.unproject(x, y, depth, 640, 480) - p).norm() < 1e-6);
                    checked += 1;
                }
            }
        }
    }

    #[test]
    fn invalid_cameras() {
        let p = Vec3::zeros();
        assert!(Camera::new(p, Vec3::z(), Vec3::y(), 60.0, 1.0, 1.0, 0.5).is_err());
        assert!(Camera::new(p, Vec3::z(), Vec3::y(), 180.0, 1.0, 0.1, 5.0).is_err());
        assert!(Camera::new(p, Vec3::y(), Vec3::y(), 60.0, 1.0, 0.1, 5.0).is_err());
    }
}
