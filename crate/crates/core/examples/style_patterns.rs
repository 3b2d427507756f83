//! Composites every pattern and density over a grey base and reports the
//! covered fraction of each swatch.
//!
//! cargo run --release --example style_patterns -- [out.png]

use roi_overlay::overlay::{OverlayMask, PatternSample};
use roi_overlay::scene::ColorImage;
use roi_overlay::style::{composite, Density, OpacityPolicy, OverlayStyle, Pattern, StyleSet};

// One full period of the coarsest pattern.
const SWATCH: usize = 480;

fn main() -> roi_overlay::Result<()> {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| std::env::temp_dir().join("roi-overlay-styles.png").display().to_string());
    let variants = [
        (Pattern::Fill, Density::Low, false),
        (Pattern::Stripes, Density::Low, false),
        (Pattern::Stripes, Density::High, false),
        (Pattern::Dots, Density::Low, false),
        (Pattern::Dots, Density::High, true),
    ];
    let (w, h) = (SWATCH * variants.len(), SWATCH);
    let base = ColorImage::new(w, h, [0.5, 0.5, 0.5]);

    let mut styles = StyleSet::new();
    for (k, &(pattern, density, outline)) in variants.iter().enumerate() {
        let color = [[0.9, 0.2, 0.2], [0.2, 0.5, 0.9], [0.2, 0.8, 0.3]][k % 3];
        styles.insert(k as u32 + 1, OverlayStyle { pattern, density, outline, color, opacity: 0.7, ..Default::default() });
    }

    // Each swatch is one square region, sampled at reference resolution so
    // one pixel is one pattern unit.
    let mut ids = vec![0; w * h];
    let mut samples = vec![PatternSample::default(); w * h];
    for y in 0..h {
        for x in 0..w {
            let k = x / SWATCH;
            let (lx, ly) = ((x % SWATCH) as f64 + 0.5, y as f64 + 0.5);
            let inside_dist = lx.min(ly).min(SWATCH as f64 - lx).min(SWATCH as f64 - ly);
            ids[y * w + x] = k as u32 + 1;
            samples[y * w + x] = PatternSample { coord: [x as f32 + 0.5, y as f32 + 0.5], dist: -inside_dist as f32 };
        }
    }
    let mut mask = OverlayMask::new(w, h, ids);
    mask.pattern = Some(samples);

    let policy = OpacityPolicy::default();
    let img = composite(&base, &mask, &styles, &policy)?;
    for (k, &(pattern, density, outline)) in variants.iter().enumerate() {
        let mut tinted = 0;
        for y in 0..h {
            for x in k * SWATCH..(k + 1) * SWATCH {
                tinted += usize::from(img.data[y * w + x] != base.data[y * w + x]);
            }
        }
        println!(
            "{pattern:?}/{density:?}{}: {:.3} of the swatch tinted",
            if outline { "+outline" } else { "" },
            tinted as f64 / (SWATCH * SWATCH) as f64,
        );
    }
    img.save(std::path::Path::new(&out))?;
    println!("wrote {out}");
    Ok(())
}
