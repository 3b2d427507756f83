use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::{cmd_bake, cmd_bench, cmd_compare, cmd_render, exit_code, BakeOptions, BenchFile, RenderOptions};
use crate::bench::BenchConfig;
use crate::overlay::Technique;
use crate::style::OverlayStyle;
use crate::{Error, Result};

const CONFIG_HELP: &str = "\
Scene config (JSON, \"schema\": 1). World units are scene units with y up and the
ground plane in (x, z); angles in degrees; colours linear RGB in [0, 1];
\"transform\": [a, b, c, d, tx, ty] maps world (x, z) to CRS (a·x + b·z + tx,
c·x + d·z + ty). Paths are relative to the config file.";

#[derive(Debug, Parser)]
#[command(name = "roi-overlay", version, about = "Render GeoJSON regions of interest over a 3D terrain", after_help = CONFIG_HELP)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bake a GeoJSON file into an OBJ of extruded shapes plus id and style textures.
    Bake {
        geojson: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// World→CRS transform "a,b,c,d,tx,ty".
        #[arg(long, value_parser = parse_transform, default_value = "1,0,0,1,0,0")]
        transform: [f64; 6],
        /// Texture size "N" or "WxH".
        #[arg(long, value_parser = parse_resolution, default_value = "1024")]
        resolution: (usize, usize),
        /// Extrusion half-height in world units.
        #[arg(long, default_value_t = 100.0)]
        half_height: f64,
        /// Style for every region as inline JSON.
        #[arg(long, value_parser = parse_style)]
        style: Option<OverlayStyle>,
    },
    /// Render a scene config with one overlay technique to PPM or PNG.
    Render {
        config: PathBuf,
        #[arg(long, value_parser = parse_technique)]
        technique: Technique,
        /// Output image (.ppm or .png).
        #[arg(long)]
        out: PathBuf,
        /// Render resolution "WxH", overriding the config.
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
        /// Disable opacity clamping.
        #[arg(long)]
        no_clamp: bool,
        /// Worker threads.
        #[arg(long, env = "OVERLAY_THREADS")]
        threads: Option<usize>,
        /// Also write the region-id mask as a 16-bit PNG.
        #[arg(long)]
        mask_out: Option<PathBuf>,
        /// Write the render report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Time the overlay phase of each technique against the number of overlays.
    Bench {
        /// Optional bench config (JSON, "schema": 1); flags take precedence.
        config: Option<PathBuf>,
        /// Output CSV; an environment sidecar is written next to it as .json.
        #[arg(long)]
        csv: PathBuf,
        /// Overlay counts, e.g. "1,2,4,8,16,32".
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        /// Timed frames per cell (at least 10).
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
        #[arg(long)]
        seed: Option<u64>,
        /// Techniques to run, e.g. "csg,pps".
        #[arg(long, value_delimiter = ',', value_parser = parse_technique)]
        technique: Option<Vec<Technique>>,
        #[arg(long, env = "OVERLAY_THREADS")]
        threads: Option<usize>,
        /// Also write the slope fits as CSV.
        #[arg(long)]
        slopes_csv: Option<PathBuf>,
    },
    /// Compare the region masks of two techniques on one scene.
    Compare {
        config: PathBuf,
        #[arg(value_parser = parse_technique)]
        a: Technique,
        #[arg(value_parser = parse_technique)]
        b: Technique,
        /// Write a diff image (.ppm or .png).
        #[arg(long)]
        diff: Option<PathBuf>,
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<(usize, usize)>,
        #[arg(long, env = "OVERLAY_THREADS")]
        threads: Option<usize>,
    },
}

fn parse_technique(s: &str) -> std::result::Result<Technique, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_resolution(s: &str) -> std::result::Result<(usize, usize), String> {
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| format!("bad resolution '{s}'"));
    let (w, h) = match s.split_once(['x', 'X']) {
        Some((w, h)) => (parse(w)?, parse(h)?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if w == 0 || h == 0 {
        return Err(format!("resolution must be positive, got '{s}'"));
    }
    Ok((w, h))
}

fn parse_transform(s: &str) -> std::result::Result<[f64; 6], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("bad transform component '{x}'")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|v: Vec<f64>| format!("transform needs 6 numbers, got {}", v.len()))
}

fn parse_style(s: &str) -> std::result::Result<OverlayStyle, String> {
    serde_json::from_str(s).map_err(|e| format!("bad style JSON: {e}"))
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Bake { geojson, out, transform, resolution, half_height, style } => {
            let opts = BakeOptions {
                transform,
                width: resolution.0,
                height: resolution.1,
                half_height,
                style: style.unwrap_or_default(),
            };
            for p in cmd_bake(&geojson, &out, &opts)? {
                println!("wrote {}", p.display());
            }
        }
        Command::Render { config, technique, out, resolution, no_clamp, threads, mask_out, report } => {
            let opts = RenderOptions { threads, no_clamp, resolution, mask_out };
            let r = cmd_render(&config, technique, &out, &opts)?;
            for w in &r.clamp_warnings {
                eprintln!("warning: {w}");
            }
            if r.ignored_z > 0 {
                eprintln!("warning: ignored {} third coordinates", r.ignored_z);
            }
            println!("{r}");
            if let Some(p) = report {
                std::fs::write(p, serde_json::to_string_pretty(&r)? + "\n")?;
            }
            println!("wrote {}", out.display());
        }
        Command::Bench { config, csv, counts, frames, resolution, seed, technique, threads, slopes_csv } => {
            let mut cfg = BenchConfig::default();
            if let Some(p) = config {
                BenchFile::load(&p)?.apply(&mut cfg);
            }
            if let Some(c) = counts {
                cfg.overlay_counts = c;
            }
            if let Some(f) = frames {
                cfg.frames = f;
            }
            if let Some((w, h)) = resolution {
                cfg.width = w;
                cfg.height = h;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = technique {
                cfg.techniques = t;
            }
            if let Some(t) = threads {
                cfg.threads = t;
            }
            let outcome = cmd_bench(&cfg, &csv, slopes_csv.as_deref())?;
            print!("{}", outcome.table);
            match outcome.ordering_holds {
                Some(true) => println!("ordering pps < csg < decal: holds"),
                Some(false) => println!("ordering pps < csg < decal: violated"),
                None => {}
            }
            println!("wrote {}", csv.display());
        }
        Command::Compare { config, a, b, diff, resolution, threads } => {
            let r = cmd_compare(&config, a, b, diff.as_deref(), threads, resolution)?;
            println!("{a} vs {b}");
            println!("{r}");
        }
    }
    Ok(())
}

/// Parses arguments and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert_eq!(parse_resolution("512x256"), Ok((512, 256)));
        assert_eq!(parse_resolution("64"), Ok((64, 64)));
        assert!(parse_resolution("0x4").is_err());
        assert_eq!(parse_transform("2,0,0,2,10,20"), Ok([2.0, 0.0, 0.0, 2.0, 10.0, 20.0]));
        assert!(parse_transform("1,2").is_err());
        assert!(parse_technique("foo").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["roi-overlay", "render", "x.json", "--technique", "foo", "--out", "a.ppm"]), 2);
        assert_eq!(run(["roi-overlay", "frobnicate"]), 2);
        assert_eq!(run(["roi-overlay", "bake", "/definitely/missing.geojson", "--out", "/tmp/x"]), 2);
    }

    #[test]
    fn counts_flag() {
        let cli = Cli::try_parse_from(["roi-overlay", "bench", "--csv", "a.csv", "--counts", "1,2,4"]).unwrap();
        match cli.command {
            Command::Bench { counts, .. } => assert_eq!(counts, Some(vec![1, 2, 4])),
            _ => unreachable!(),
        }
    }
}
