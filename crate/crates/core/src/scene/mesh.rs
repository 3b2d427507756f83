use std::f64::consts::TAU;

use super::Vec3;

/// A closed occluder primitive with flat shading.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Vec3>,
    /// Outward-wound triangles.
    pub triangles: Vec<[u32; 3]>,
    pub albedo: [f32; 3],
}

impl TriMesh {
    /// Cone standing on `base` (its centre) with the apex `height` above.
    pub fn cone(base: Vec3, radius: f64, height: f64, segments: usize, albedo: [f32; 3]) -> Self {
        let segments = segments.max(3);
        let mut vertices: Vec<Vec3> = (0..segments)
            .map(|s| {
                let a = TAU * s as f64 / segments as f64;
                base + Vec3::new(radius * a.cos(), 0.0, radius * a.sin())
            })
            .collect();
        let apex = vertices.len() as u32;
        vertices.push(base + Vec3::new(0.0, height, 0.0));
        let center = vertices.len() as u32;
        vertices.push(base);
        let n = segments as u32;
        let mut triangles = Vec::with_capacity(2 * segments);
        for s in 0..n {
            let t = (s + 1) % n;
            triangles.push([s, apex, t]);
            triangles.push([s, t, center]);
        }
        Self { vertices, triangles, albedo }
    }

    /// Axis-aligned box.
    pub fn cuboid(center: Vec3, half: Vec3, albedo: [f32; 3]) -> Self {
        let vertices: Vec<Vec3> = (0..8)
            .map(|c| {
                let s = |bit: usize| if c & bit != 0 { 1.0 } else { -1.0 };
                center + Vec3::new(s(1) * half.x, s(2) * half.y, s(4) * half.z)
            })
            .collect();
        let faces: [[u32; 4]; 6] = [
            [0, 4, 6, 2], // -x
            [1, 3, 7, 5], // +x
            [0, 1, 5, 4], // -y
            [2, 6, 7, 3], // +y
            [0, 2, 3, 1], // -z
            [4, 5, 7, 6], // +z
        ];
        let triangles = faces.iter().flat_map(|f| [[f[0], f[1], f[2]], [f[0], f[2], f[3]]]).collect();
        Self { vertices, triangles, albedo }
    }

    pub fn face_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i as usize]);
        (b - a).cross(&(c - a)).normalize()
    }
}
