//! Bakes a GeoJSON file into extruded shapes, an id texture, its distance
//! field and a styled RGBA texture.
//!
//! cargo run --release --example bake_shapes -- [file.geojson] [out_dir]

use std::path::PathBuf;

use roi_overlay::bake::{bake_style_texture, extrude_polygon, rasterize_roi, write_obj, ShapeMesh};
use roi_overlay::geo::{parse_geojson, WorldCrsTransform};
use roi_overlay::style::{Density, OverlayStyle, Pattern, StyleSet};

fn main() -> roi_overlay::Result<()> {
    let mut args = std::env::args().skip(1);
    let input = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/regions.geojson").into());
    let out: PathBuf = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("roi-overlay-bake"));
    std::fs::create_dir_all(&out)?;

    let set = parse_geojson(&std::fs::read_to_string(&input)?)?;
    let t = WorldCrsTransform::new(1.5, 0.0, 0.0, 1.5, 512_000.0, 4_190_000.0)?;
    let meshes = set
        .regions
        .iter()
        .map(|p| extrude_polygon(p, &t, 40.0))
        .collect::<roi_overlay::Result<Vec<ShapeMesh>>>()?;
    for m in &meshes {
        println!(
            "region {:>3}: {:>4} vertices {:>4} triangles, open edges {}, volume {:.1}",
            m.region_id,
            m.vertices.len(),
            m.triangles.len(),
            m.open_edge_count(),
            m.signed_volume()
        );
    }
    write_obj(&meshes, std::io::BufWriter::new(std::fs::File::create(out.join("shapes.obj"))?))?;

    let window = set.crs_bounds.expect("regions present").squared().inflate(10.0);
    let roi = rasterize_roi(&set, window, 512, 512)?;
    let covered = roi.id_grid.iter().filter(|&&id| id > 0).count();
    let (lo, hi) = roi
        .dist_grid
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    println!("id texture 512x512: {covered} covered texels, distance range [{lo:.1}, {hi:.1}] texels");
    roi.write_png(&out.join("roi_ids.png"), &out.join("roi_ids.json"))?;

    let mut styles = StyleSet::new();
    let patterns = [Pattern::Stripes, Pattern::Dots, Pattern::Fill];
    for (k, r) in set.regions.iter().enumerate() {
        let style = OverlayStyle {
            pattern: patterns[k % 3],
            density: Density::High,
            outline: true,
            color: [0.9, 0.3 + 0.2 * k as f32, 0.2],
            opacity: 0.6,
            ..Default::default()
        };
        styles.insert(r.region_id, style);
    }
    bake_style_texture(&roi, &styles)?.write_png(&out.join("style.png"))?;
    println!("wrote shapes.obj, roi_ids.png, roi_ids.json, style.png to {}", out.display());
    Ok(())
}
