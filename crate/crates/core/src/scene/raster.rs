//! Triangle setup and pixel-centre coverage shared by the G-buffer pass and
//! the parity pass.

use super::{Camera, Vec3};

/// Pixel-centre sample emitted by [`ScreenTri::rasterize_rows`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct Fragment {
    pub x: usize,
    pub y: usize,
    /// Camera depth, perspective-correct.
    pub depth: f64,
    /// Perspective-correct weights of the source triangle's vertices.
    pub weights: [f64; 3],
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    p0: [f64; 2],
    p1: [f64; 2],
    sign: f64,
    owned: bool,
}

impl Edge {
    /// Endpoints are put in lexicographic order before evaluation so two
    /// triangles sharing an edge get exactly opposite values.
    fn new(a: [f64; 2], b: [f64; 2], orientation: f64) -> Self {
        let (p0, p1, s) = if (a[0], a[1]) <= (b[0], b[1]) { (a, b, 1.0) } else { (b, a, -1.0) };
        let sign = s * orientation;
        // direction of travel once the triangle is counter-clockwise in value space
        let (dx, dy) = ((b[0] - a[0]) * orientation, (b[1] - a[1]) * orientation);
        Self { p0, p1, sign, owned: dy > 0.0 || (dy == 0.0 && dx < 0.0) }
    }

    #[inline]
    fn eval(&self, x: f64, y: f64) -> f64 {
        let e = (self.p1[0] - self.p0[0]) * (y - self.p0[1]) - (self.p1[1] - self.p0[1]) * (x - self.p0[0]);
        e * self.sign
    }

    #[inline]
    fn covers(&self, e: f64) -> bool {
        e > 0.0 || (e == 0.0 && self.owned)
    }
}

/// A near-clipped, screen-projected triangle ready for coverage tests.
#[derive(Debug, Clone)]
pub(crate) struct ScreenTri {
    /// Index of the source triangle in the caller's list.
    pub source: usize,
    /// `edges[i]` is opposite vertex `i`.
    edges: [Edge; 3],
    inv_z: [f64; 3],
    /// Weights of each clipped vertex with respect to the source vertices.
    bary: [[f64; 3]; 3],
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl ScreenTri {
    /// Clips the camera-space triangle against the near plane and projects
    /// the pieces. Returns at most two screen triangles.
    pub fn setup(source: usize, world: [Vec3; 3], cam: &Camera, width: usize, height: usize, out: &mut Vec<ScreenTri>) {
        let view = world.map(|p| cam.view(p));
        if view.iter().all(|v| v.z > cam.far) {
            return;
        }
        let identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let inside = view.map(|v| v.z >= cam.near);
        if inside.iter().all(|&b| b) {
            Self::push(source, view, identity, cam, width, height, out);
            return;
        }
        if !inside.iter().any(|&b| b) {
            return;
        }
        let mut poly: Vec<(Vec3, [f64; 3])> = Vec::with_capacity(4);
        for i in 0..3 {
            let j = (i + 1) % 3;
            if inside[i] {
                poly.push((view[i], identity[i]));
            }
            if inside[i] != inside[j] {
                poly.push(clip_near(view[i], identity[i], view[j], identity[j], cam.near));
            }
        }
        for k in 1..poly.len() - 1 {
            let (a, b, c) = (poly[0], poly[k], poly[k + 1]);
            Self::push(source, [a.0, b.0, c.0], [a.1, b.1, c.1], cam, width, height, out);
        }
    }

    fn push(
        source: usize,
        view: [Vec3; 3],
        bary: [[f64; 3]; 3],
        cam: &Camera,
        width: usize,
        height: usize,
        out: &mut Vec<ScreenTri>,
    ) {
        let s = view.map(|v| {
            let (x, y) = cam.screen_of_view(v, width, height);
            [x, y]
        });
        let area = (s[1][0] - s[0][0]) * (s[2][1] - s[0][1]) - (s[1][1] - s[0][1]) * (s[2][0] - s[0][0]);
        if !(area != 0.0 && area.is_finite()) {
            return;
        }
        let orientation = area.signum();
        let edges = [
            Edge::new(s[1], s[2], orientation),
            Edge::new(s[2], s[0], orientation),
            Edge::new(s[0], s[1], orientation),
        ];
        let min_x = s.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let max_x = s.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let min_y = s.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let max_y = s.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        let (x0, x1) = pixel_span(min_x, max_x, width);
        let (y0, y1) = pixel_span(min_y, max_y, height);
        if x0 >= x1 || y0 >= y1 {
            return;
        }
        out.push(ScreenTri { source, edges, inv_z: view.map(|v| 1.0 / v.z), bary, x0, x1, y0, y1 });
    }

    /// Visits covered pixel centres in rows `[row0, row1)`, row-major.
    #[inline]
    pub fn rasterize_rows(&self, row0: usize, row1: usize, mut f: impl FnMut(Fragment)) {
        for y in self.y0.max(row0)..self.y1.min(row1) {
            let py = y as f64 + 0.5;
            for x in self.x0..self.x1 {
                let px = x as f64 + 0.5;
                let e = [self.edges[0].eval(px, py), self.edges[1].eval(px, py), self.edges[2].eval(px, py)];
                if !(self.edges[0].covers(e[0]) && self.edges[1].covers(e[1]) && self.edges[2].covers(e[2])) {
                    continue;
                }
                let w = [e[0] * self.inv_z[0], e[1] * self.inv_z[1], e[2] * self.inv_z[2]];
                let sum = w[0] + w[1] + w[2];
                if !(sum > 0.0) {
                    continue;
                }
                let l = [w[0] / sum, w[1] / sum, w[2] / sum];
                let mut weights = [0.0; 3];
                for (k, b) in self.bary.iter().enumerate() {
                    for (wk, bk) in weights.iter_mut().zip(b) {
                        *wk += l[k] * bk;
                    }
                }
                let depth = (e[0] + e[1] + e[2]) / sum;
                f(Fragment { x, y, depth, weights });
            }
        }
    }
}

/// Intersection with `z = near`, computed from a canonical endpoint order so
/// neighbouring triangles clip a shared edge to the same point.
fn clip_near(a: Vec3, wa: [f64; 3], b: Vec3, wb: [f64; 3], near: f64) -> (Vec3, [f64; 3]) {
    let swap = (b.x, b.y, b.z) < (a.x, a.y, a.z);
    let (a, wa, b, wb) = if swap { (b, wb, a, wa) } else { (a, wa, b, wb) };
    let t = (near - a.z) / (b.z - a.z);
    let mut p = a + (b - a) * t;
    p.z = near;
    let w = [wa[0] + (wb[0] - wa[0]) * t, wa[1] + (wb[1] - wa[1]) * t, wa[2] + (wb[2] - wa[2]) * t];
    (p, w)
}

/// Pixels whose centres fall in `[lo, hi]`, clamped to `[0, n)`.
fn pixel_span(lo: f64, hi: f64, n: usize) -> (usize, usize) {
    let first = (lo - 0.5).ceil().max(0.0);
    let last = (hi - 0.5).floor().min(n as f64 - 1.0);
    if !(first <= last) {
        return (0, 0);
    }
    (first as usize, last as usize + 1)
}
