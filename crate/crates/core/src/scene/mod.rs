//! Deterministic software rasterization of the terrain scene into a G-buffer.

pub(crate) mod camera;
mod gbuffer;
mod heightfield;
mod image;
mod mesh;
pub(crate) mod raster;
mod shade;

pub use camera::{Camera, Projection};
pub use gbuffer::{rasterize_scene, rasterize_scene_with, GBuffer, Layer, SceneOptions};
pub use heightfield::Heightfield;
pub use image::{ColorImage, RgbaRaster};
pub use mesh::TriMesh;
pub use shade::{shade_base, Sun, SKY_COLOR};

/// World-space point or vector; `y` is up, the ground plane is `(x, z)`.
pub type Vec3 = nalgebra::Vector3<f64>;
