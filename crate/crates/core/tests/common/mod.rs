//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use rand::Rng;
use roi_overlay::geo::{RoiPolygon, Vec2};

/// Crossing-number test over every ring, written without the library's
/// scanline helpers.
pub fn pnpoly(rings: &[Vec<Vec2>], q: Vec2) -> bool {
    let mut inside = false;
    for ring in rings {
        let n = ring.len();
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (ring[i], ring[j]);
            if (a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x {
                inside = !inside;
            }
            j = i;
        }
    }
    inside
}

pub fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

pub fn boundary_distance(rings: &[Vec<Vec2>], p: Vec2) -> f64 {
    rings
        .iter()
        .flat_map(|r| (0..r.len()).map(move |i| (r[i], r[(i + 1) % r.len()])))
        .map(|(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

pub fn rings_of(p: &RoiPolygon) -> Vec<Vec<Vec2>> {
    p.rings().map(<[Vec2]>::to_vec).collect()
}

fn jittered_ring(rng: &mut impl Rng, center: Vec2, radius: f64, n: usize, lo: f64, hi: f64) -> Vec<Vec2> {
    (0..n)
        .map(|k| {
            let a = (k as f64 + rng.gen_range(0.0..0.5)) * TAU / n as f64;
            center + Vec2::new(a.cos(), a.sin()) * radius * rng.gen_range(lo..hi)
        })
        .collect()
}

/// Jittered star polygon around `center`. With `hole`, a smaller star sits
/// strictly inside the exterior's inner radius.
pub fn star(rng: &mut impl Rng, center: Vec2, radius: f64, hole: bool) -> (Vec<Vec2>, Vec<Vec<Vec2>>) {
    let n = rng.gen_range(if hole { 12..40 } else { 3..40 });
    let exterior = jittered_ring(rng, center, radius, n, 0.55, 1.0);
    let holes = if hole {
        let m = rng.gen_range(3..12);
        vec![jittered_ring(rng, center, radius, m, 0.15, 0.4)]
    } else {
        vec![]
    };
    (exterior, holes)
}
