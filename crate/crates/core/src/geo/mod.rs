//! GeoJSON ingestion and the planar world/CRS mapping.

mod geojson;
mod transform;

pub use geojson::parse_geojson;
pub use transform::WorldCrsTransform;

use crate::{Error, Result};

/// A 2D point or vector. CRS points are `(u, v)`, world ground points `(x, z)`.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    /// Smallest rectangle containing every point, or `None` for an empty iterator.
    pub fn enclosing<'a>(points: impl IntoIterator<Item = &'a Vec2>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p)));
        Some(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn center(&self) -> Vec2 {
        (self.min + self.max) * 0.5
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0) || !self.width().is_finite() || !self.height().is_finite()
    }

    /// Grows every side by `margin`.
    pub fn inflate(&self, margin: f64) -> Self {
        Self {
            min: self.min - Vec2::repeat(margin),
            max: self.max + Vec2::repeat(margin),
        }
    }

    /// Expands the shorter side symmetrically so the rectangle becomes square.
    pub fn squared(&self) -> Self {
        let side = self.width().max(self.height());
        let c = self.center();
        Self {
            min: c - Vec2::repeat(side * 0.5),
            max: c + Vec2::repeat(side * 0.5),
        }
    }
}

/// Shoelace signed area; positive for counter-clockwise rings.
pub fn signed_area(ring: &[Vec2]) -> f64 {
    let n = ring.len();
    let mut twice = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    twice * 0.5
}

/// One region of interest: an exterior ring with optional holes.
///
/// Rings are stored open (no repeated closing vertex), the exterior
/// counter-clockwise and every hole clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiPolygon {
    pub exterior: Vec<Vec2>,
    pub holes: Vec<Vec<Vec2>>,
    pub region_id: u32,
}

impl RoiPolygon {
    /// Builds a normalized polygon from open rings.
    ///
    /// Consecutive duplicate vertices are collapsed and ring orientation is
    /// fixed rather than rejected. `polygon` only labels errors.
    pub fn from_rings(exterior: Vec<Vec2>, holes: Vec<Vec<Vec2>>, region_id: u32) -> Result<Self> {
        Self::normalize(exterior, holes, region_id, 0)
    }

    pub(crate) fn normalize(
        exterior: Vec<Vec2>,
        holes: Vec<Vec<Vec2>>,
        region_id: u32,
        polygon: usize,
    ) -> Result<Self> {
        if region_id == 0 {
            return Err(Error::InvalidRegionId("0".into()));
        }
        let exterior = normalize_ring(exterior, true).ok_or(Error::DegenerateRing { polygon, ring: 0 })?;
        let holes = holes
            .into_iter()
            .enumerate()
            .map(|(i, h)| normalize_ring(h, false).ok_or(Error::DegenerateRing { polygon, ring: i + 1 }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { exterior, holes, region_id })
    }

    /// Exterior followed by every hole.
    pub fn rings(&self) -> impl Iterator<Item = &[Vec2]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }

    pub fn vertex_count(&self) -> usize {
        self.rings().map(<[Vec2]>::len).sum()
    }

    /// Area of the exterior minus the holes.
    pub fn area(&self) -> f64 {
        self.rings().map(signed_area).sum()
    }

    pub fn bounds(&self) -> Rect {
        Rect::enclosing(&self.exterior).expect("normalized rings are non-empty")
    }
}

fn normalize_ring(ring: Vec<Vec2>, ccw: bool) -> Option<Vec<Vec2>> {
    let mut out: Vec<Vec2> = Vec::with_capacity(ring.len());
    for p in ring {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    if out.len() < 3 {
        return None;
    }
    let area = signed_area(&out);
    if area == 0.0 || !area.is_finite() {
        return None;
    }
    if (area > 0.0) != ccw {
        out.reverse();
    }
    Some(out)
}

/// A parsed collection of regions sharing one CRS.
#[derive(Debug, Clone, PartialEq)]
pub struct RoiSet {
    pub regions: Vec<RoiPolygon>,
    /// Tight bounds over every vertex; `None` when the set is empty.
    pub crs_bounds: Option<Rect>,
    /// Number of coordinates whose third (elevation) element was dropped.
    pub ignored_z: usize,
}

impl RoiSet {
    /// Builds a set from already-normalized polygons, checking id uniqueness.
    pub fn new(regions: Vec<RoiPolygon>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for r in &regions {
            if r.region_id == 0 {
                return Err(Error::InvalidRegionId("0".into()));
            }
            if !seen.insert(r.region_id) {
                return Err(Error::DuplicateRegionId(r.region_id));
            }
        }
        let crs_bounds = Rect::enclosing(regions.iter().flat_map(|r| r.rings().flatten()));
        Ok(Self { regions, crs_bounds, ignored_z: 0 })
    }

    pub fn empty() -> Self {
        Self { regions: Vec::new(), crs_bounds: None, ignored_z: 0 }
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn get(&self, region_id: u32) -> Option<&RoiPolygon> {
        self.regions.iter().find(|r| r.region_id == region_id)
    }
}
