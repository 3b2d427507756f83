//! Renders the sample scene with every overlay technique and compares the
//! resulting masks.
//!
//! cargo run --release --example render_techniques -- [scene.json] [out_dir]

use std::path::PathBuf;

use roi_overlay::cli::{compare_masks, diff_image, render_scene, SceneConfig};
use roi_overlay::overlay::Technique;

fn main() -> roi_overlay::Result<()> {
    let mut args = std::env::args().skip(1);
    let config: PathBuf = args
        .next()
        .map(Into::into)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scene.json").into());
    let out: PathBuf = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("roi-overlay-render"));
    std::fs::create_dir_all(&out)?;

    let scene = SceneConfig::load(&config)?;
    let mut rendered = Vec::new();
    for t in Technique::ALL {
        let r = render_scene(&scene, t, false)?;
        println!(
            "{t:<6} covered {:>6} px  overlay {:>7.2} ms  composite {:>6.2} ms",
            r.report.covered_pixels, r.report.overlay_ms, r.report.composite_ms
        );
        r.image.save(&out.join(format!("{t}.png")))?;
        rendered.push((t, r));
    }
    for w in scene.styles().clamp_warnings(&scene.policy) {
        println!("{w}");
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let (ta, a) = &rendered[i];
        let (tb, b) = &rendered[j];
        let cmp = compare_masks(&a.mask, &b.mask)?;
        println!(
            "{ta} vs {tb}: iou {:.4}, {} differing px, farthest {:.1} px from the boundary",
            cmp.iou, cmp.differing_pixels, cmp.max_boundary_distance
        );
        diff_image(&a.mask, &b.mask).save(&out.join(format!("diff_{ta}_{tb}.png")))?;
    }
    println!("images in {}", out.display());
    Ok(())
}
