//! Offline conversion of regions into extruded meshes and id/distance textures.

mod edt;
mod extrude;
mod polygon;
mod raster;
mod style_texture;
mod triangulate;

pub use edt::{signed_distance_field, squared_edt};
#[cfg(test)]
pub(crate) use extrude::ray_triangle;
pub use extrude::{extrude_polygon, write_obj, ShapeMesh};
pub use polygon::{distance_to_boundary, point_in_polygon, signed_distance};
pub use raster::{rasterize_roi, PatternFrame, RoiTexture, TextureHeader};
pub use style_texture::bake_style_texture;
pub use triangulate::{triangulate_cap, triangulate_indices};
