use crate::geo::{RoiPolygon, Vec2};

/// Abscissa where the edge `a→b` crosses the horizontal line at `y`.
///
/// Shared by [`point_in_polygon`] and the scanline rasterizer so that both
/// agree bit-for-bit on which side of an edge a sample falls.
#[inline]
pub(crate) fn crossing_x(a: Vec2, b: Vec2, y: f64) -> f64 {
    a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y)
}

/// Whether the edge `a→b` straddles the line at `y` under the half-open rule.
#[inline]
pub(crate) fn straddles(a: Vec2, b: Vec2, y: f64) -> bool {
    (a.y > y) != (b.y > y)
}

/// Even-odd membership over the exterior and every hole.
///
/// Boundaries are half-open: bottom and left edges belong to the polygon,
/// top and right edges do not.
pub fn point_in_polygon(poly: &RoiPolygon, q: Vec2) -> bool {
    let mut inside = false;
    for ring in poly.rings() {
        let n = ring.len();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if straddles(a, b, q.y) && q.x < crossing_x(a, b, q.y) {
                inside = !inside;
            }
        }
    }
    inside
}

/// Euclidean distance from `q` to the nearest edge of any ring.
pub fn distance_to_boundary(poly: &RoiPolygon, q: Vec2) -> f64 {
    let mut best = f64::INFINITY;
    for ring in poly.rings() {
        let n = ring.len();
        for i in 0..n {
            best = best.min(segment_distance(ring[i], ring[(i + 1) % n], q));
        }
    }
    best
}

/// Signed distance to the polygon boundary, negative inside.
pub fn signed_distance(poly: &RoiPolygon, q: Vec2) -> f64 {
    let d = distance_to_boundary(poly, q);
    if point_in_polygon(poly, q) {
        -d
    } else {
        d
    }
}

fn segment_distance(a: Vec2, b: Vec2, q: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 { ((q - a).dot(&ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (a + ab * t - q).norm()
}
