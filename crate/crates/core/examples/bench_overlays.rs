//! Times the overlay phase of every technique and prints the slope table.
//!
//! cargo run --release --example bench_overlays -- [frames] [threads]

use roi_overlay::bench::{fit_slopes, format_slope_table, run_bench, BenchConfig};
use roi_overlay::overlay::Technique;

fn main() -> roi_overlay::Result<()> {
    let mut args = std::env::args().skip(1);
    let frames = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let threads = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let cfg = BenchConfig { frames, threads, ..Default::default() };
    let report = run_bench(&cfg)?;
    for t in Technique::ALL {
        let medians: Vec<String> = cfg
            .overlay_counts
            .iter()
            .map(|&n| format!("{n}:{:.3}", report.median_ms(t, n).unwrap_or(f64::NAN)))
            .collect();
        println!("{t:<6} {}", medians.join("  "));
    }
    let fits = fit_slopes(&report)?;
    print!("{}", format_slope_table(&fits));
    Ok(())
}
