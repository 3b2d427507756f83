//! Parses a GeoJSON file and maps each region into world space.
//!
//! cargo run --example ingest_geojson -- [file.geojson]

use roi_overlay::geo::{parse_geojson, Rect, Vec2, WorldCrsTransform};

fn main() -> roi_overlay::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/regions.geojson").into());
    let set = parse_geojson(&std::fs::read_to_string(&path)?)?;
    // Same mapping as examples/data/scene.json.
    let t = WorldCrsTransform::new(1.5, 0.0, 0.0, 1.5, 512_000.0, 4_190_000.0)?;

    println!("{path}: {} regions, {} elevations ignored", set.len(), set.ignored_z);
    for r in &set.regions {
        let world: Vec<Vec2> = r.exterior.iter().map(|&q| t.world_from_crs(q)).collect();
        let round_trip = world
            .iter()
            .zip(&r.exterior)
            .map(|(&p, &q)| (t.crs_from_world(p) - q).norm())
            .fold(0.0, f64::max);
        let wb = Rect::enclosing(&world).expect("non-empty ring");
        println!(
            "  id {:>3}  vertices {:>3}  holes {}  area {:>9.1} crs^2  world x [{:.1}, {:.1}] z [{:.1}, {:.1}]  round trip {:.1e}",
            r.region_id,
            r.vertex_count(),
            r.holes.len(),
            r.area(),
            wb.min.x,
            wb.max.x,
            wb.min.y,
            wb.max.y,
            round_trip,
        );
    }
    if let Some(b) = set.crs_bounds {
        println!("crs bounds  u [{:.1}, {:.1}]  v [{:.1}, {:.1}]", b.min.x, b.max.x, b.min.y, b.max.y);
    }
    Ok(())
}
