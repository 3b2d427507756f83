//! Overlaying GeoJSON regions of interest onto a rendered 3D terrain.
//!
//! The crate renders a heightfield terrain (plus simple occluder primitives)
//! into a G-buffer with a deterministic software rasterizer, and then marks
//! the pixels that fall inside each region using one of three techniques:
//!
//! - **Image-space CSG** ([`overlay::csg_mask`]): every region is extruded
//!   into a closed prism, and a pixel is inside when the camera-to-fragment
//!   segment crosses the prism an odd number of times.
//! - **Decal projection** ([`overlay::apply_decal`]): every pixel's world
//!   position is pushed through a projector frustum and a pre-baked RGBA
//!   texture is sampled on the projector's image plane.
//! - **Post-process sampling** ([`overlay::pps_lookup`]): every pixel's world
//!   position is mapped through an affine world-to-CRS transform and looks up
//!   a single pre-baked region-ID texture.
//!
//! The [`style`] module evaluates the fill, stripe, dot and outline patterns
//! and blends them over the shaded base image; [`bench`] times the overlay
//! phase of each technique against the number of overlays.
//!
//! Runnable examples live in `crates/core/examples/`; the `roi-overlay`
//! binary exposes the `bake`, `render`, `bench` and `compare` commands.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bake;
pub mod bench;
pub mod cli;
mod error;
pub mod geo;
pub mod overlay;
pub mod scene;
pub mod style;

pub use error::{Error, Result};
