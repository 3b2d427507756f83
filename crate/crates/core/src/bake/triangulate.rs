use crate::geo::{RoiPolygon, Vec2};
use crate::{Error, Result};

/// Splits a polygon with holes into counter-clockwise triangles.
///
/// Holes are bridged into the exterior loop, then the merged loop is
/// ear-clipped. The result always has `n + 2h - 2` triangles for `n`
/// vertices and `h` holes. Self-intersecting or touching rings fail.
pub fn triangulate_cap(poly: &RoiPolygon) -> Result<Vec<[Vec2; 3]>> {
    let pts: Vec<Vec2> = poly.rings().flatten().copied().collect();
    Ok(triangulate_indices(poly)?
        .into_iter()
        .map(|[a, b, c]| [pts[a], pts[b], pts[c]])
        .collect())
}

/// Same as [`triangulate_cap`] but returns indices into the flattened ring
/// vertices (exterior first, then each hole in order).
pub fn triangulate_indices(poly: &RoiPolygon) -> Result<Vec<[usize; 3]>> {
    let fail = |reason: &str| Error::TriangulationFailure { region_id: poly.region_id, reason: reason.into() };
    let pts: Vec<Vec2> = poly.rings().flatten().copied().collect();
    let mut ranges = Vec::new();
    let mut start = 0;
    for ring in poly.rings() {
        ranges.push(start..start + ring.len());
        start += ring.len();
    }
    if let Some(reason) = find_self_intersection(&pts, &ranges) {
        return Err(fail(&reason));
    }

    let mut outer: Vec<usize> = ranges[0].clone().collect();
    let mut holes: Vec<Vec<usize>> = ranges[1..].iter().map(|r| r.clone().collect()).collect();
    // Rightmost holes first so earlier bridges never cross later ones.
    holes.sort_by(|a, b| {
        let ax = a.iter().map(|&i| pts[i].x).fold(f64::NEG_INFINITY, f64::max);
        let bx = b.iter().map(|&i| pts[i].x).fold(f64::NEG_INFINITY, f64::max);
        bx.total_cmp(&ax)
    });
    for hole in &holes {
        bridge_hole(&pts, &mut outer, hole).ok_or_else(|| fail("no visible vertex to bridge a hole"))?;
    }
    ear_clip(&pts, &outer).ok_or_else(|| fail("ear clipping stalled"))
}

#[inline]
fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_touch(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

fn find_self_intersection(pts: &[Vec2], ranges: &[std::ops::Range<usize>]) -> Option<String> {
    // (start, end, ring index)
    let mut edges = Vec::new();
    for (r, range) in ranges.iter().enumerate() {
        let n = range.len();
        for k in 0..n {
            edges.push((range.start + k, range.start + (k + 1) % n, r));
        }
    }
    let bbox = |&(a, b, _): &(usize, usize, usize)| (pts[a].inf(&pts[b]), pts[a].sup(&pts[b]));
    let boxes: Vec<_> = edges.iter().map(bbox).collect();
    for i in 0..edges.len() {
        let (a, b, ri) = edges[i];
        for j in i + 1..edges.len() {
            let (c, d, rj) = edges[j];
            let (lo_i, hi_i) = boxes[i];
            let (lo_j, hi_j) = boxes[j];
            if lo_i.x > hi_j.x || lo_j.x > hi_i.x || lo_i.y > hi_j.y || lo_j.y > hi_i.y {
                continue;
            }
            let shares = ri == rj && (a == c || a == d || b == c || b == d);
            if shares {
                // Adjacent edges may only meet at their shared vertex.
                let (shared, p, q) = if b == c {
                    (b, a, d)
                } else if a == d {
                    (a, b, c)
                } else {
                    // Triangle ring: the two edges share both neighbours.
                    continue;
                };
                let s = pts[shared];
                let (u, w) = (pts[p] - s, pts[q] - s);
                if u.perp(&w) == 0.0 && u.dot(&w) > 0.0 {
                    return Some(format!("ring {ri} folds back on itself at vertex {shared}"));
                }
                continue;
            }
            if segments_touch(pts[a], pts[b], pts[c], pts[d]) {
                return Some(format!("edges of rings {ri} and {rj} intersect"));
            }
        }
    }
    None
}

/// Splices `hole` into `outer` through a mutually visible vertex pair.
fn bridge_hole(pts: &[Vec2], outer: &mut Vec<usize>, hole: &[usize]) -> Option<()> {
    let m_pos = (0..hole.len()).max_by(|&i, &j| {
        let (a, b) = (pts[hole[i]], pts[hole[j]]);
        a.x.total_cmp(&b.x).then(b.y.total_cmp(&a.y))
    })?;
    let m = pts[hole[m_pos]];
    let n = outer.len();

    // Closest upward edge hit by the ray from m towards +x.
    let mut hit: Option<(f64, usize)> = None;
    for k in 0..n {
        let a = pts[outer[k]];
        let b = pts[outer[(k + 1) % n]];
        if !(a.y <= m.y && b.y >= m.y && a.y != b.y) {
            continue;
        }
        let x = a.x + (m.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if x >= m.x && hit.is_none_or(|(best, _)| x < best) {
            hit = Some((x, k));
        }
    }
    let (hx, k) = hit?;
    let i_pt = Vec2::new(hx, m.y);
    let (a_idx, b_idx) = (outer[k], outer[(k + 1) % n]);
    let mut visible = if pts[a_idx] == i_pt {
        a_idx
    } else if pts[b_idx] == i_pt {
        b_idx
    } else if pts[a_idx].x > pts[b_idx].x {
        a_idx
    } else {
        b_idx
    };

    if pts[visible] != i_pt {
        // Any outer vertex inside triangle (m, i, p) blocks the view; take the
        // one with the smallest angle to the ray instead.
        let p = pts[visible];
        let (t0, t1, t2) = if orient(m, i_pt, p) >= 0.0 { (m, i_pt, p) } else { (m, p, i_pt) };
        let mut best: Option<(f64, f64, usize)> = None;
        for &idx in outer.iter() {
            let r = pts[idx];
            if idx == visible || r == m {
                continue;
            }
            if orient(t0, t1, r) >= 0.0 && orient(t1, t2, r) >= 0.0 && orient(t2, t0, r) >= 0.0 {
                let d = r - m;
                let tan = d.y.abs() / d.x.max(f64::MIN_POSITIVE);
                let dist = d.norm_squared();
                if best.is_none_or(|(bt, bd, _)| tan < bt || (tan == bt && dist < bd)) {
                    best = Some((tan, dist, idx));
                }
            }
        }
        if let Some((_, _, idx)) = best {
            visible = idx;
        }
    }

    // Pick the occurrence of `visible` whose interior wedge faces m.
    let positions: Vec<usize> = (0..n).filter(|&k| outer[k] == visible).collect();
    let pos = positions
        .iter()
        .copied()
        .find(|&k| {
            let prev = pts[outer[(k + n - 1) % n]];
            let v = pts[outer[k]];
            let next = pts[outer[(k + 1) % n]];
            if orient(prev, v, next) >= 0.0 {
                orient(prev, v, m) >= 0.0 && orient(v, next, m) >= 0.0
            } else {
                orient(prev, v, m) >= 0.0 || orient(v, next, m) >= 0.0
            }
        })
        .unwrap_or(positions[0]);

    let mut merged = Vec::with_capacity(n + hole.len() + 2);
    merged.extend_from_slice(&outer[..=pos]);
    merged.extend(hole[m_pos..].iter().chain(&hole[..m_pos]));
    merged.push(hole[m_pos]);
    merged.push(outer[pos]);
    merged.extend_from_slice(&outer[pos + 1..]);
    *outer = merged;
    Some(())
}

fn ear_clip(pts: &[Vec2], ring: &[usize]) -> Option<Vec<[usize; 3]>> {
    let n = ring.len();
    if n < 3 {
        return None;
    }
    let mut prev: Vec<usize> = (0..n).map(|i| (i + n - 1) % n).collect();
    let mut next: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut tris = Vec::with_capacity(n - 2);
    let mut remaining = n;
    let mut cur = 0;
    let mut stall = 0;
    let mut allow_flat = false;

    while remaining > 3 {
        let (p, nx) = (prev[cur], next[cur]);
        if is_ear(pts, ring, &next, p, cur, nx, allow_flat) {
            tris.push([ring[p], ring[cur], ring[nx]]);
            next[p] = nx;
            prev[nx] = p;
            remaining -= 1;
            cur = nx;
            stall = 0;
            allow_flat = false;
            continue;
        }
        cur = nx;
        stall += 1;
        if stall > remaining {
            if allow_flat {
                return None;
            }
            // Only collinear "ears" are left; clipping them adds zero-area triangles.
            allow_flat = true;
            stall = 0;
        }
    }
    tris.push([ring[prev[cur]], ring[cur], ring[next[cur]]]);
    Some(tris)
}

fn is_ear(pts: &[Vec2], ring: &[usize], next: &[usize], p: usize, cur: usize, nx: usize, allow_flat: bool) -> bool {
    let (a, b, c) = (pts[ring[p]], pts[ring[cur]], pts[ring[nx]]);
    let o = orient(a, b, c);
    if o < 0.0 || (o == 0.0 && !allow_flat) {
        return false;
    }
    let mut r = next[nx];
    while r != p {
        let q = pts[ring[r]];
        if q != a
            && q != b
            && q != c
            && orient(a, b, q) >= 0.0
            && orient(b, c, q) >= 0.0
            && orient(c, a, q) >= 0.0
        {
            return false;
        }
        r = next[r];
    }
    true
}
