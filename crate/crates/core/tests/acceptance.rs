//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! cargo test --release --test acceptance

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roi_overlay::bake::{extrude_polygon, rasterize_roi, ShapeMesh};
use roi_overlay::bench::{fit_slopes, mask_iou, run_bench, BenchConfig};
use roi_overlay::cli::{cmd_bake, cmd_render, BakeOptions, RenderOptions};
use roi_overlay::geo::{Rect, RoiPolygon, RoiSet, Vec2, WorldCrsTransform};
use roi_overlay::overlay::{csg_mask, pps_lookup, DecalOptions, LayerFilter, OverlayAssets, OverlayMask, Technique};
use roi_overlay::scene::{rasterize_scene, Camera, ColorImage, GBuffer, Heightfield, TriMesh};
use roi_overlay::style::{
    composite, eval_pattern, Density, OpacityPolicy, OverlayStyle, Pattern, StyleSet, REFERENCE_WIDTH,
};
use roi_overlay::Error;

use common::{boundary_distance, pnpoly, rings_of, star};

type Vec3 = nalgebra::Vector3<f64>;
type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "oracle agreement", budget: Duration::from_secs(30), run: oracle_agreement },
        Criterion { name: "cross-technique equivalence", budget: Duration::from_secs(120), run: equivalence },
        Criterion { name: "performance ordering", budget: Duration::from_secs(600), run: performance_ordering },
        Criterion { name: "boundary quality", budget: Duration::from_secs(30), run: boundary_quality },
        Criterion { name: "parity robustness", budget: Duration::from_secs(30), run: parity_robustness },
        Criterion { name: "style system", budget: Duration::from_secs(30), run: style_system },
        Criterion { name: "determinism", budget: Duration::from_secs(60), run: determinism },
    ];
    let mut failed = 0;
    for (k, c) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = (c.run)();
        let elapsed = t0.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.budget => Err(format!("{detail}; over budget {:?}", c.budget)),
            other => other,
        };
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += usize::from(outcome.is_err());
        println!("{status} {} {:<28} {:>7.1} s  {detail}", k + 1, c.name, elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: roi_overlay::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ------------------------------------------------------------------ 1

fn oracle_agreement() -> Outcome {
    const N: usize = 256;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let window = Rect::new(Vec2::new(3000.0, -700.0), Vec2::new(3100.0, -600.0));
    let texel = window.width() / N as f64;
    let (mut agree, mut total, mut far_mismatch) = (0usize, 0usize, 0usize);
    for case in 0..50 {
        let center = window.center() + Vec2::new(rng.gen_range(-15.0..15.0), rng.gen_range(-15.0..15.0));
        let radius = rng.gen_range(10.0..35.0);
        let (ext, holes) = star(&mut rng, center, radius, case % 3 == 0);
        let poly = lib(RoiPolygon::from_rings(ext, holes, 1))?;
        let rings = rings_of(&poly);
        let tex = lib(rasterize_roi(&lib(RoiSet::new(vec![poly]))?, window, N, N))?;
        for j in 0..N {
            for i in 0..N {
                let q = window.min + Vec2::new(i as f64 + 0.5, j as f64 + 0.5) * texel;
                let expected = pnpoly(&rings, q);
                let got = tex.id_at(i, j) == 1;
                total += 1;
                if got == expected {
                    agree += 1;
                } else if boundary_distance(&rings, q) / texel > 1.0 {
                    far_mismatch += 1;
                }
            }
        }
    }
    let rate = agree as f64 / total as f64;
    let detail = format!("agreement {:.4}%, {far_mismatch} mismatches beyond 1 px", 100.0 * rate);
    check(rate >= 0.995 && far_mismatch == 0, || detail.clone())?;
    Ok(detail)
}

// ------------------------------------------------------------------ 2

struct EquivScene {
    terrain: Heightfield,
    objects: Vec<TriMesh>,
    camera: Camera,
    assets: OverlayAssets,
}

fn equivalence_scene(seed: u64, hilly: bool) -> Result<EquivScene, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terrain = if hilly {
        lib(Heightfield::procedural(rng.gen(), 129, 129, 2.0, Vec2::zeros(), 8.0, 80.0))?
    } else {
        lib(Heightfield::flat(129, 129, 2.0, Vec2::zeros(), 0.0))?
    };
    let ground = |x: f64, z: f64| terrain.height((x / 2.0).round() as usize, (z / 2.0).round() as usize);
    let objects: Vec<TriMesh> = (0..3)
        .map(|_| {
            let (x, z) = (rng.gen_range(40.0..216.0), rng.gen_range(40.0..216.0));
            TriMesh::cone(Vec3::new(x, ground(x, z) - 0.5, z), 3.0, rng.gen_range(6.0..12.0), 12, [0.2, 0.4, 0.2])
        })
        .collect();

    let (s, c) = rng.gen_range(-0.8f64..0.8).sin_cos();
    let k = rng.gen_range(0.5..3.0);
    let t = lib(WorldCrsTransform::new(k * c, -k * s, k * s, k * c, 600_000.0, 5_100_000.0))?;
    let mut regions = Vec::new();
    let mut styles = StyleSet::new();
    for id in 1..=4u32 {
        let center = Vec2::new(rng.gen_range(50.0..206.0), rng.gen_range(50.0..206.0));
        let radius = rng.gen_range(15.0..40.0);
        let (ext, holes) = star(&mut rng, center, radius, id == 2);
        let to_crs = |r: Vec<Vec2>| r.into_iter().map(|p| t.crs_from_world(p)).collect::<Vec<_>>();
        regions.push(lib(RoiPolygon::from_rings(to_crs(ext), holes.into_iter().map(to_crs).collect(), id))?);
        styles.insert(id, OverlayStyle::default());
    }
    let rois = lib(RoiSet::new(regions))?;
    let corners = [Vec2::new(0.0, 0.0), Vec2::new(256.0, 0.0), Vec2::new(256.0, 256.0), Vec2::new(0.0, 256.0)]
        .map(|p| t.crs_from_world(p));
    let window = Rect::enclosing(&corners).unwrap().squared();
    let top = objects.iter().flat_map(|m| m.vertices.iter().map(|v| v.y)).fold(terrain.max_abs_height(), f64::max);
    let half_height = 1.5 * top.max(1.0);
    let assets = lib(OverlayAssets::bake(rois, &styles, t, window, 1024, half_height, (-terrain.max_abs_height(), top)))?;

    let elevation = rng.gen_range(30f64..80.0).to_radians();
    let azimuth = rng.gen_range(0.0..std::f64::consts::TAU);
    let dist = 260.0;
    let target = Vec3::new(128.0, 0.0, 128.0);
    let eye = target + Vec3::new(azimuth.cos() * elevation.cos(), elevation.sin(), azimuth.sin() * elevation.cos()) * dist;
    let camera = lib(Camera::look_at(eye, target, Vec3::y(), 55.0, 1.0, 0.5, 2000.0))?;
    Ok(EquivScene { terrain, objects, camera, assets })
}

/// A disagreement is explained when the region boundary passes within 2 px
/// (some pixel centre in that disc lies on the other side of it) or when the
/// pixel's ground point is within one texel footprint of the boundary.
fn unexplained(a: &OverlayMask, b: &OverlayMask, g: &GBuffer, assets: &OverlayAssets) -> usize {
    let t = &assets.transform;
    let rings: Vec<Vec<Vec<Vec2>>> = assets.rois.regions.iter().map(rings_of).collect();
    let ts = assets.texture.texel_size();
    let footprint = ts.norm();
    let region_of = |p: Vec3| -> usize {
        let q = t.crs_from_world(Vec2::new(p.x, p.z));
        rings.iter().position(|r| pnpoly(r, q)).map_or(0, |k| k + 1)
    };
    let (w, h) = (g.width, g.height);
    let mut count = 0;
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if (a.ids[i] > 0) == (b.ids[i] > 0) {
                continue;
            }
            if g.is_sky(i) {
                count += 1;
                continue;
            }
            let q = t.crs_from_world(Vec2::new(g.position[i].x, g.position[i].z));
            if rings.iter().any(|r| boundary_distance(r, q) <= footprint) {
                continue;
            }
            let here = region_of(g.position[i]);
            let mut near = false;
            'disc: for dy in -2i64..=2 {
                for dx in -2i64..=2 {
                    let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                    if dx * dx + dy * dy > 4 || nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let n = ny as usize * w + nx as usize;
                    if g.is_sky(n) || region_of(g.position[n]) != here {
                        near = true;
                        break 'disc;
                    }
                }
            }
            count += usize::from(!near);
        }
    }
    count
}

fn equivalence() -> Outcome {
    const SIZE: usize = 512;
    let opts = DecalOptions { filter: LayerFilter::All, ..Default::default() };
    let mut worst_iou: f64 = 1.0;
    let mut disagreements = 0;
    for seed in 0..10u64 {
        let s = equivalence_scene(100 + seed, seed % 2 == 1)?;
        let g = lib(rasterize_scene(&s.terrain, &s.objects, &s.camera, SIZE, SIZE))?;
        let masks = Technique::ALL
            .iter()
            .map(|&t| lib(s.assets.mask(t, &g, &s.camera, opts)).map(|(m, _)| m))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let iou = lib(mask_iou(&masks[i], &masks[j]))?;
            worst_iou = worst_iou.min(iou);
            check(iou >= 0.95, || format!("scene {seed}: {} vs {} iou {iou:.4}", Technique::ALL[i], Technique::ALL[j]))?;
            let bad = unexplained(&masks[i], &masks[j], &g, &s.assets);
            check(bad == 0, || {
                format!("scene {seed}: {bad} {} vs {} pixels away from the boundary", Technique::ALL[i], Technique::ALL[j])
            })?;
            disagreements += masks[i].ids.iter().zip(&masks[j].ids).filter(|(a, b)| (**a > 0) != (**b > 0)).count();
        }
    }
    Ok(format!("min iou {worst_iou:.4}, {disagreements} boundary disagreements"))
}

// ------------------------------------------------------------------ 3

fn performance_ordering() -> Outcome {
    let cfg = BenchConfig::default();
    check(cfg.width == 512 && cfg.height == 512 && cfg.frames >= 20, || "bench defaults changed".into())?;
    check(cfg.overlay_counts == [1, 2, 4, 8, 16, 32], || "bench counts changed".into())?;
    let report = lib(run_bench(&cfg))?;
    let fits = lib(fit_slopes(&report))?;
    let slope = |t: Technique| fits.iter().find(|f| f.technique == t).map(|f| f.slope).unwrap_or(f64::NAN);
    let (csg, decal, pps) = (slope(Technique::Csg), slope(Technique::Decal), slope(Technique::Pps));
    let detail = format!("slopes ms/overlay pps {pps:.4} csg {csg:.4} decal {decal:.4}");
    check(pps < csg && csg < decal, || format!("{detail}: ordering violated"))?;
    check(pps < 0.10 * decal, || format!("{detail}: pps not below 10% of decal"))?;
    let pixels = (cfg.width * cfg.height) as u64;
    check(report.pps_fetches.len() == cfg.overlay_counts.len(), || "missing fetch records".into())?;
    for r in &report.pps_fetches {
        check(r.min == pixels && r.max == pixels, || format!("{} overlays: fetches {}..{}", r.overlays, r.min, r.max))?;
    }
    Ok(format!("{detail}, fetches {pixels}/frame"))
}

// ------------------------------------------------------------------ 4

fn boundary_quality() -> Outcome {
    const SIZE: usize = 512;
    let terrain = lib(Heightfield::flat(129, 129, 2.0, Vec2::zeros(), 0.0))?;
    let cam = lib(Camera::look_at(
        Vec3::new(128.0, 30.0, 128.0),
        Vec3::new(128.0, 0.0, 128.0),
        Vec3::z(),
        60.0,
        1.0,
        0.5,
        500.0,
    ))?;
    let t = WorldCrsTransform::identity();
    // only the slanted left edge is in view
    let (e0, e1) = (Vec2::new(120.0, 60.0), Vec2::new(135.0, 200.0));
    let ring = vec![e0, Vec2::new(220.0, 60.0), Vec2::new(220.0, 200.0), e1];
    let poly = lib(RoiPolygon::from_rings(ring, vec![], 1))?;
    let set = lib(RoiSet::new(vec![poly.clone()]))?;
    let tex = lib(rasterize_roi(&set, Rect::new(Vec2::zeros(), Vec2::repeat(256.0)), 256, 256))?;
    let mesh = lib(extrude_polygon(&poly, &t, 10.0))?;
    let g = lib(rasterize_scene(&terrain, &[], &cam, SIZE, SIZE))?;

    let screen = |p: Vec2| {
        let (x, y) = cam.screen_of_view(cam.view(Vec3::new(p.x, 0.0, p.y)), SIZE, SIZE);
        Vec2::new(x, y)
    };
    let texel_px = (screen(Vec2::new(128.0, 128.0)) - screen(Vec2::new(129.0, 128.0))).norm();
    check(texel_px >= 8.0, || format!("texel covers only {texel_px:.1} px"))?;
    let (s0, s1) = (screen(e0), screen(e1));

    let csg = lib(csg_mask(&g, &[mesh], &cam))?;
    let pps = pps_lookup(&g, &t, &tex);
    let deviation = |m: &OverlayMask| -> Result<f64, String> {
        let mut worst: f64 = 0.0;
        for y in 0..SIZE {
            let yc = y as f64 + 0.5;
            let x_edge = s0.x + (s1.x - s0.x) * (yc - s0.y) / (s1.y - s0.y);
            let row = &m.ids[y * SIZE..(y + 1) * SIZE];
            let flips: Vec<usize> = (1..SIZE).filter(|&x| (row[x] > 0) != (row[x - 1] > 0)).collect();
            if !(1.0..SIZE as f64 - 1.0).contains(&x_edge) {
                continue;
            }
            let Some(&x) = flips.iter().min_by(|a, b| (**a as f64 - x_edge).abs().total_cmp(&(**b as f64 - x_edge).abs()))
            else {
                return Err(format!("row {y}: no boundary"));
            };
            worst = worst.max((x as f64 - x_edge).abs());
        }
        Ok(worst)
    };
    let (dc, dp) = (deviation(&csg)?, deviation(&pps)?);
    let detail = format!("texel {texel_px:.1} px, csg deviation {dc:.2} px, pps deviation {dp:.2} px");
    check(dc <= 1.0 && dp >= 4.0, || detail.clone())?;
    Ok(detail)
}

// ------------------------------------------------------------------ 5

fn parity_robustness() -> Outcome {
    const SIZE: usize = 384;
    let terrain = lib(Heightfield::procedural(9, 129, 129, 2.0, Vec2::zeros(), 8.0, 64.0))?;
    let max_h = terrain.max_abs_height();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let t = lib(WorldCrsTransform::new(0.8, 0.6, -0.6, 0.8, 431_000.0, 5_370_000.0))?;
    let polys: Vec<RoiPolygon> = (1..=5u32)
        .map(|id| {
            let c = Vec2::new(rng.gen_range(50.0..206.0), rng.gen_range(50.0..206.0));
            let radius = rng.gen_range(15.0..35.0);
            let (ext, holes) = star(&mut rng, c, radius, id % 2 == 0);
            let crs = |r: Vec<Vec2>| r.into_iter().map(|p| t.crs_from_world(p)).collect::<Vec<_>>();
            RoiPolygon::from_rings(crs(ext), holes.into_iter().map(crs).collect(), id)
        })
        .collect::<roi_overlay::Result<_>>()
        .map_err(|e| e.to_string())?;
    let cam = lib(Camera::look_at(
        Vec3::new(-40.0, 190.0, -70.0),
        Vec3::new(128.0, 0.0, 128.0),
        Vec3::y(),
        50.0,
        1.0,
        0.5,
        2000.0,
    ))?;
    let g = lib(rasterize_scene(&terrain, &[], &cam, SIZE, SIZE))?;
    let mask_at = |scale: f64| -> Result<OverlayMask, String> {
        let meshes = polys.iter().map(|p| extrude_polygon(p, &t, scale * max_h)).collect::<roi_overlay::Result<Vec<_>>>();
        lib(csg_mask(&g, &lib(meshes)?, &cam))
    };
    let reference = mask_at(1.5)?;
    check(reference.covered() > 1000, || format!("only {} covered pixels", reference.covered()))?;
    for scale in [10.0, 100.0] {
        let m = mask_at(scale)?;
        let diff = m.ids.iter().zip(&reference.ids).filter(|(a, b)| a != b).count();
        check(diff == 0, || format!("{scale}x half-height differs on {diff} pixels"))?;
    }

    let mut broken: ShapeMesh = lib(extrude_polygon(&polys[0], &t, 10.0 * max_h))?;
    broken.triangles.remove(broken.triangles.len() / 2);
    check(broken.check_closed().is_err(), || "open mesh passes the manifold check".into())?;
    match csg_mask(&g, &[broken], &cam) {
        Err(Error::OpenMesh { .. }) => {}
        other => return Err(format!("open mesh gave {:?}", other.map(|m| m.covered()))),
    }
    Ok(format!("{} px identical at 1.5x/10x/100x, open mesh rejected", reference.covered()))
}

// ------------------------------------------------------------------ 6

fn ulp_diff(a: f32, b: f32) -> u32 {
    if a == b {
        0
    } else {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs() as u32
    }
}

fn style_system() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (w, h) = (64, 64);
    let base = ColorImage { width: w, height: h, data: (0..w * h).map(|_| rng.gen::<[f32; 3]>()).collect() };
    let mask = OverlayMask::new(w, h, vec![1; w * h]);
    let free = OpacityPolicy { clamp: false, ..Default::default() };
    let mut worst_ulp = 0;
    for trial in 0..200 {
        let color: [f32; 3] = rng.gen();
        let alpha: f32 = match trial {
            0 => 0.0,
            1 => 1.0,
            _ => rng.gen(),
        };
        let styles = StyleSet::uniform([1], OverlayStyle { color, opacity: alpha, ..Default::default() });
        let out = lib(composite(&base, &mask, &styles, &free))?;
        for (o, b) in out.data.iter().zip(&base.data) {
            for c in 0..3 {
                let expected = (1.0 - alpha) * b[c] + alpha * color[c];
                let (lo, hi) = (b[c].min(color[c]), b[c].max(color[c]));
                check(o[c] >= lo && o[c] <= hi, || format!("alpha {alpha}: {} outside [{lo}, {hi}]", o[c]))?;
                worst_ulp = worst_ulp.max(ulp_diff(o[c], expected));
                if alpha == 0.0 {
                    check(o[c] == b[c], || "alpha 0 changed the base".into())?;
                }
                if alpha == 1.0 {
                    check(o[c] == color[c], || "alpha 1 did not replace the base".into())?;
                }
            }
        }
    }
    check(worst_ulp <= 1, || format!("blend off by {worst_ulp} ulp"))?;

    // 4096 texels of a 1024-wide texture span a whole number of periods
    const N: usize = 4096;
    let scale = 1024.0 / REFERENCE_WIDTH;
    let fraction = |pattern: Pattern, density: Density| {
        let style = OverlayStyle { pattern, density, ..Default::default() };
        let mut on = 0usize;
        for j in 0..N {
            for i in 0..N {
                let p = Vec2::new(i as f64 + 0.5, j as f64 + 0.5) / scale;
                on += usize::from(eval_pattern(&style, p, -1e9));
            }
        }
        on as f64 / (N * N) as f64
    };
    let mut fractions = Vec::new();
    for density in [Density::Low, Density::High] {
        let s = fraction(Pattern::Stripes, density);
        let d = fraction(Pattern::Dots, density);
        check((s - 0.5).abs() <= 0.01 * 0.5, || format!("stripes {density:?} coverage {s:.4}"))?;
        check((d - PI / 16.0).abs() <= 0.01 * PI / 16.0, || format!("dots {density:?} coverage {d:.4}"))?;
        fractions.push(format!("{s:.4}/{d:.4}"));
    }

    let policy = OpacityPolicy::default();
    check(policy.min == 0.2 && policy.max == 0.7, || format!("policy range [{}, {}]", policy.min, policy.max))?;
    for (requested, applied) in [(0.05, 0.2), (0.2, 0.2), (0.45, 0.45), (0.7, 0.7), (0.95, 0.7)] {
        check(policy.apply(requested) == applied, || format!("opacity {requested} -> {}", policy.apply(requested)))?;
    }
    let styles = StyleSet::uniform([1], OverlayStyle { color: [1.0; 3], opacity: 0.95, ..Default::default() });
    let grey = ColorImage::new(w, h, [0.0; 3]);
    let out = lib(composite(&grey, &mask, &styles, &policy))?;
    check(out.data.iter().all(|p| p[0] == 0.7), || "composite ignored the clamp".into())?;
    check(styles.clamp_warnings(&policy).len() == 1, || "no clamp warning".into())?;

    Ok(format!("blend within {worst_ulp} ulp, stripes/dots low {} high {}", fractions[0], fractions[1]))
}

// ------------------------------------------------------------------ 7

fn determinism() -> Outcome {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
    let mut compared = 0;
    for technique in Technique::ALL {
        let mut outputs = Vec::new();
        for (run, threads) in [(0, 1), (1, 1), (2, 4)] {
            let out = dir.path().join(format!("{technique}_{run}.png"));
            let mask = dir.path().join(format!("{technique}_{run}_mask.png"));
            let opts = RenderOptions {
                threads: Some(threads),
                resolution: Some((320, 240)),
                mask_out: Some(mask.clone()),
                ..Default::default()
            };
            lib(cmd_render(&data.join("scene.json"), technique, &out, &opts))?;
            outputs.push((read(&out)?, read(&mask)?));
        }
        check(outputs[0] == outputs[1], || format!("{technique}: two runs differ"))?;
        check(outputs[0] == outputs[2], || format!("{technique}: 1 vs 4 threads differ"))?;
        compared += 2;
    }
    let opts = BakeOptions {
        transform: [1.5, 0.0, 0.0, 1.5, 512_000.0, 4_190_000.0],
        width: 512,
        height: 512,
        ..Default::default()
    };
    let a = lib(cmd_bake(&data.join("regions.geojson"), &dir.path().join("a"), &opts))?;
    let b = lib(cmd_bake(&data.join("regions.geojson"), &dir.path().join("b"), &opts))?;
    for (pa, pb) in a.iter().zip(&b) {
        check(read(pa)? == read(pb)?, || format!("bake output {} differs", pa.display()))?;
    }
    Ok(format!("{compared} render comparisons and {} bake files identical", a.len()))
}
