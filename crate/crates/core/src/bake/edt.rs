//! Exact Euclidean distance transform (lower envelope of parabolas, one
//! pass per axis) and the signed region-boundary field built on it.

use std::collections::BTreeMap;

/// Squared distance from every pixel centre to the nearest feature pixel
/// centre; `f64::INFINITY` when there is no feature at all.
pub fn squared_edt(features: &[bool], width: usize, height: usize) -> Vec<f64> {
    assert_eq!(features.len(), width * height);
    let mut grid: Vec<f64> = features.iter().map(|&f| if f { 0.0 } else { f64::INFINITY }).collect();
    let n = width.max(height);
    let mut scratch = Envelope::new(n);
    let mut line = vec![0.0; n];
    let mut out = vec![0.0; n];

    for x in 0..width {
        for y in 0..height {
            line[y] = grid[y * width + x];
        }
        scratch.transform(&line[..height], &mut out[..height]);
        for y in 0..height {
            grid[y * width + x] = out[y];
        }
    }
    for row in grid.chunks_mut(width) {
        line[..width].copy_from_slice(row);
        scratch.transform(&line[..width], row);
    }
    grid
}

struct Envelope {
    v: Vec<usize>,
    z: Vec<f64>,
}

impl Envelope {
    fn new(n: usize) -> Self {
        Self { v: vec![0; n], z: vec![0.0; n + 1] }
    }

    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        let (v, z) = (&mut self.v, &mut self.z);
        let mut k: isize = -1;
        for q in 0..f.len() {
            if !f[q].is_finite() {
                continue;
            }
            let qf = q as f64;
            loop {
                if k < 0 {
                    k = 0;
                    v[0] = q;
                    z[0] = f64::NEG_INFINITY;
                    z[1] = f64::INFINITY;
                    break;
                }
                let p = v[k as usize];
                let pf = p as f64;
                let s = ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf));
                if s <= z[k as usize] {
                    k -= 1;
                    continue;
                }
                k += 1;
                v[k as usize] = q;
                z[k as usize] = s;
                z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
        if k < 0 {
            out.iter_mut().for_each(|o| *o = f64::INFINITY);
            return;
        }
        let mut j = 0usize;
        for (q, o) in out.iter_mut().enumerate() {
            let qf = q as f64;
            while z[j + 1] < qf {
                j += 1;
            }
            let d = qf - v[j] as f64;
            *o = d * d + f[v[j]];
        }
    }
}

/// Signed distance to the nearest region boundary, in pixels.
///
/// Background pixels get `+(d - 0.5)` with `d` the distance to the nearest
/// labelled pixel; a pixel of region `r` gets `-(d - 0.5)` with `d` the
/// distance to the nearest pixel not labelled `r`. The half-pixel offset
/// places the boundary between pixel centres. Values are clamped to the grid
/// diagonal.
pub fn signed_distance_field(ids: &[u32], width: usize, height: usize) -> Vec<f32> {
    let diag = ((width * width + height * height) as f64).sqrt();
    let to_dist = |sq: f64| (sq.sqrt() - 0.5).min(diag);

    let labelled: Vec<bool> = ids.iter().map(|&id| id > 0).collect();
    let outside = squared_edt(&labelled, width, height);
    let mut out: Vec<f32> = ids
        .iter()
        .zip(&outside)
        .map(|(&id, &sq)| if id == 0 { to_dist(sq) as f32 } else { 0.0 })
        .collect();

    // Per region, only its bounding box grown by one pixel matters: clamping
    // any farther foreign pixel into that window yields a nearer foreign one.
    let mut boxes: BTreeMap<u32, [usize; 4]> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        let (x, y) = (i % width, i / width);
        let b = boxes.entry(id).or_insert([x, y, x, y]);
        b[0] = b[0].min(x);
        b[1] = b[1].min(y);
        b[2] = b[2].max(x);
        b[3] = b[3].max(y);
    }
    for (&id, b) in &boxes {
        let x0 = b[0].saturating_sub(1);
        let y0 = b[1].saturating_sub(1);
        let x1 = (b[2] + 1).min(width - 1);
        let y1 = (b[3] + 1).min(height - 1);
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut foreign = Vec::with_capacity(w * h);
        for y in y0..=y1 {
            foreign.extend(ids[y * width + x0..=y * width + x1].iter().map(|&v| v != id));
        }
        let sq = squared_edt(&foreign, w, h);
        for y in 0..h {
            for x in 0..w {
                let gi = (y + y0) * width + x + x0;
                if ids[gi] == id {
                    out[gi] = -(to_dist(sq[y * w + x]) as f32);
                }
            }
        }
    }
    out
}
