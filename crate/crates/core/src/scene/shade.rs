use super::{ColorImage, GBuffer, Vec3};

pub const SKY_COLOR: [f32; 3] = [0.62, 0.76, 0.92];

/// Directional light with an ambient term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sun {
    /// Unit direction the light travels in.
    pub direction: Vec3,
    pub intensity: f64,
    pub ambient: f64,
}

impl Default for Sun {
    fn default() -> Self {
        Self { direction: Vec3::new(-0.4, -1.0, 0.3).normalize(), intensity: 0.9, ambient: 0.25 }
    }
}

/// `albedo · (ambient + intensity · max(0, n·(−sun)))`, unclamped; sky is constant.
pub fn shade_base(g: &GBuffer, sun: &Sun) -> ColorImage {
    let data = (0..g.len())
        .map(|i| {
            if g.is_sky(i) {
                return SKY_COLOR;
            }
            let lambert = g.normal[i].dot(&-sun.direction).max(0.0);
            let k = (sun.ambient + sun.intensity * lambert) as f32;
            g.albedo[i].map(|a| a * k)
        })
        .collect();
    ColorImage { width: g.width, height: g.height, data }
}
