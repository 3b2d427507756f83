use std::collections::HashMap;
use std::io::Write;

use super::triangulate::triangulate_indices;
use crate::geo::{RoiPolygon, WorldCrsTransform};
use crate::scene::Vec3;
use crate::{Error, Result};

/// Closed prism swept from a region footprint along the world y axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeMesh {
    pub vertices: Vec<Vec3>,
    /// Outward-wound triangles (counter-clockwise seen from outside).
    pub triangles: Vec<[u32; 3]>,
    pub region_id: u32,
    pub half_height: f64,
}

/// Extrudes `poly` to `y ∈ [-half_height, +half_height]` in world space.
///
/// Vertex `2k` is the bottom copy and `2k + 1` the top copy of flattened
/// ring vertex `k`. Every ring edge contributes one side quad.
pub fn extrude_polygon(poly: &RoiPolygon, t: &WorldCrsTransform, half_height: f64) -> Result<ShapeMesh> {
    if !(half_height > 0.0) || !half_height.is_finite() {
        return Err(Error::InvalidInput(format!("extrusion half-height must be positive, got {half_height}")));
    }
    let cap = triangulate_indices(poly)?;
    let h = half_height;
    // A reflecting transform flips every winding when moving from CRS to world.
    let flip = t.determinant() < 0.0;

    let mut vertices = Vec::with_capacity(2 * poly.vertex_count());
    for q in poly.rings().flatten() {
        let w = t.world_from_crs(*q);
        vertices.push(Vec3::new(w.x, -h, w.y));
        vertices.push(Vec3::new(w.x, h, w.y));
    }
    let bot = |k: usize| (2 * k) as u32;
    let top = |k: usize| (2 * k + 1) as u32;

    let mut triangles = Vec::with_capacity(2 * cap.len() + 2 * poly.vertex_count());
    for &[a, b, c] in &cap {
        // Counter-clockwise in (x, z) faces -y.
        if flip {
            triangles.push([bot(a), bot(c), bot(b)]);
            triangles.push([top(a), top(b), top(c)]);
        } else {
            triangles.push([bot(a), bot(b), bot(c)]);
            triangles.push([top(a), top(c), top(b)]);
        }
    }
    let mut start = 0;
    for ring in poly.rings() {
        let n = ring.len();
        for i in 0..n {
            let (mut a, mut b) = (start + i, start + (i + 1) % n);
            if flip {
                std::mem::swap(&mut a, &mut b);
            }
            // The solid lies to the left of a→b in (x, z).
            triangles.push([bot(a), top(b), bot(b)]);
            triangles.push([bot(a), top(a), top(b)]);
        }
        start += n;
    }
    Ok(ShapeMesh { vertices, triangles, region_id: poly.region_id, half_height })
}

impl ShapeMesh {
    /// Number of undirected edges not shared by exactly two triangles.
    pub fn open_edge_count(&self) -> usize {
        let mut uses: HashMap<(u32, u32), u32> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        uses.values().filter(|&&n| n != 2).count()
    }

    /// Fails with [`Error::OpenMesh`] unless the mesh is a closed 2-manifold.
    pub fn check_closed(&self) -> Result<()> {
        match self.open_edge_count() {
            0 if !self.triangles.is_empty() => Ok(()),
            open_edges => Err(Error::OpenMesh { region_id: self.region_id, open_edges: open_edges.max(1) }),
        }
    }

    /// Signed enclosed volume; positive when triangles wind outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i as usize]);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        self.vertices.iter().fold(
            (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY)),
            |(lo, hi), v| (lo.inf(v), hi.sup(v)),
        )
    }

    /// Parity of crossings along the ray from `origin` in direction `dir`
    /// restricted to parameters `t ∈ (0, t_max]`.
    pub fn ray_crossings(&self, origin: Vec3, dir: Vec3, t_max: f64) -> usize {
        self.triangles
            .iter()
            .filter(|tri| {
                let [a, b, c] = tri.map(|i| self.vertices[i as usize]);
                ray_triangle(origin, dir, a, b, c).is_some_and(|t| t > 0.0 && t <= t_max)
            })
            .count()
    }

    /// Whether `p` is inside the closed solid (odd crossings to infinity).
    pub fn contains(&self, p: Vec3) -> bool {
        // An irrational-ish direction avoids grazing edges of axis-aligned prisms.
        let dir = Vec3::new(0.297_513_8, 0.841_470_9, 0.436_919_4);
        self.ray_crossings(p, dir, f64::INFINITY) % 2 == 1
    }
}

/// Möller–Trumbore intersection; returns the ray parameter of the hit.
pub(crate) fn ray_triangle(origin: Vec3, dir: Vec3, a: Vec3, b: Vec3, c: Vec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det == 0.0 {
        return None;
    }
    let inv = 1.0 / det;
    let tvec = origin - a;
    let u = tvec.dot(&pvec) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    Some(e2.dot(&qvec) * inv)
}

/// Writes meshes as Wavefront OBJ, one object per region.
pub fn write_obj<W: Write>(meshes: &[ShapeMesh], mut out: W) -> std::io::Result<()> {
    writeln!(out, "# extruded region meshes")?;
    let mut base = 1usize;
    for m in meshes {
        writeln!(out, "o region_{}", m.region_id)?;
        for v in &m.vertices {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for t in &m.triangles {
            writeln!(out, "f {} {} {}", t[0] as usize + base, t[1] as usize + base, t[2] as usize + base)?;
        }
        base += m.vertices.len();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Vec2;
    use std::collections::HashSet;

    fn square() -> RoiPolygon {
        let ring = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)];
        RoiPolygon::from_rings(ring, vec![], 1).unwrap()
    }

    fn directed_edges_pair_up(m: &ShapeMesh) -> bool {
        let mut directed = HashSet::new();
        for t in &m.triangles {
            for k in 0..3 {
                if !directed.insert((t[k], t[(k + 1) % 3])) {
                    return false;
                }
            }
        }
        directed.iter().all(|&(a, b)| directed.contains(&(b, a)))
    }

    #[test]
    fn square_prism_counts() {
        let m = extrude_polygon(&square(), &WorldCrsTransform::identity(), 50.0).unwrap();
        assert_eq!(m.vertices.len(), 8);
        assert_eq!(m.triangles.len(), 12);
        assert_eq!(m.open_edge_count(), 0);
        assert!((m.signed_volume() - 100.0).abs() < 1e-9);
        assert!(directed_edges_pair_up(&m));
        assert!(m.vertices.iter().all(|v| v.y == 50.0 || v.y == -50.0));
    }

    #[test]
    fn triangle_prism_counts() {
        let ring = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let p = RoiPolygon::from_rings(ring, vec![], 2).unwrap();
        let m = extrude_polygon(&p, &WorldCrsTransform::identity(), 50.0).unwrap();
        assert_eq!((m.vertices.len(), m.triangles.len()), (6, 8));
    }

    #[test]
    fn reflecting_transform_keeps_outward_winding() {
        let t = WorldCrsTransform::new(-2.0, 0.0, 0.0, 1.0, 5.0, 0.0).unwrap();
        let hole = vec![Vec2::new(0.2, 0.2), Vec2::new(0.2, 0.8), Vec2::new(0.8, 0.8), Vec2::new(0.8, 0.2)];
        let p = RoiPolygon::from_rings(square().exterior, vec![hole], 1).unwrap();
        let m = extrude_polygon(&p, &t, 3.0).unwrap();
        assert!(m.check_closed().is_ok());
        assert!(directed_edges_pair_up(&m));
        // CRS area 0.64 maps to world area 0.32; height 6.
        assert!((m.signed_volume() - 0.64 * 0.5 * 6.0).abs() < 1e-9);
        let at = |u: f64, v: f64| {
            let w = t.world_from_crs(Vec2::new(u, v));
            Vec3::new(w.x, 0.0, w.y)
        };
        assert!(m.contains(at(0.1, 0.5)));
        assert!(!m.contains(at(0.5, 0.5)), "inside the hole");
        assert!(!m.contains(at(1.5, 0.5)));
    }

    #[test]
    fn deleted_triangle_is_open() {
        let mut m = extrude_polygon(&square(), &WorldCrsTransform::identity(), 1.0).unwrap();
        m.triangles.remove(3);
        assert!(matches!(m.check_closed(), Err(Error::OpenMesh { open_edges: 3, .. })));
    }

    #[test]
    fn bad_half_height() {
        assert!(extrude_polygon(&square(), &WorldCrsTransform::identity(), 0.0).is_err());
    }
}
