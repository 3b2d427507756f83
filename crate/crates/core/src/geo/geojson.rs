use serde_json::Value;

use super::{RoiPolygon, RoiSet, Vec2};
use crate::{Error, Result};

/// Parses a GeoJSON `Polygon`, `MultiPolygon`, `Feature` or `FeatureCollection`.
///
/// Region ids are 1-based document positions unless a feature carries a
/// positive integer `properties.id`, which then applies to every polygon of
/// that feature. Rings must be explicitly closed; the closing vertex is
/// dropped and orientation is normalized.
pub fn parse_geojson(text: &str) -> Result<RoiSet> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut parser = Parser::default();
    parser.object(&doc, None)?;
    let mut set = RoiSet::new(parser.regions)?;
    set.ignored_z = parser.ignored_z;
    Ok(set)
}

#[derive(Default)]
struct Parser {
    regions: Vec<RoiPolygon>,
    ignored_z: usize,
}

impl Parser {
    fn object(&mut self, v: &Value, id: Option<u32>) -> Result<()> {
        match type_of(v)? {
            "FeatureCollection" => {
                let features = v
                    .get("features")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("FeatureCollection without a `features` array".into()))?;
                for f in features {
                    if type_of(f)? != "Feature" {
                        return Err(Error::Parse("FeatureCollection member is not a Feature".into()));
                    }
                    self.object(f, None)?;
                }
                Ok(())
            }
            "Feature" => {
                let id = feature_id(v)?;
                match v.get("geometry") {
                    Some(g) if !g.is_null() => self.object(g, id),
                    _ => Err(Error::UnsupportedGeometry("null".into())),
                }
            }
            "Polygon" => {
                let rings = coordinates(v)?;
                self.polygon(rings, id)
            }
            "MultiPolygon" => {
                let polys = coordinates(v)?
                    .as_array()
                    .ok_or_else(|| Error::Parse("MultiPolygon coordinates must be an array".into()))?;
                for p in polys {
                    self.polygon(p, id)?;
                }
                Ok(())
            }
            other => Err(Error::UnsupportedGeometry(other.to_string())),
        }
    }

    fn polygon(&mut self, rings: &Value, id: Option<u32>) -> Result<()> {
        let index = self.regions.len();
        let rings = rings
            .as_array()
            .filter(|r| !r.is_empty())
            .ok_or_else(|| Error::Parse(format!("polygon {index} needs a non-empty array of rings")))?;
        let mut parsed = Vec::with_capacity(rings.len());
        for (r, ring) in rings.iter().enumerate() {
            let mut pts = self.ring(ring)?;
            if pts.len() >= 2 && pts.first() != pts.last() {
                return Err(Error::UnclosedRing { polygon: index, ring: r });
            }
            pts.pop();
            parsed.push(pts);
        }
        let exterior = parsed.remove(0);
        let region_id = match id {
            Some(id) => id,
            None => u32::try_from(index + 1).map_err(|_| Error::InvalidRegionId((index + 1).to_string()))?,
        };
        let poly = RoiPolygon::normalize(exterior, parsed, region_id, index)?;
        self.regions.push(poly);
        Ok(())
    }

    fn ring(&mut self, ring: &Value) -> Result<Vec<Vec2>> {
        let positions = ring
            .as_array()
            .ok_or_else(|| Error::Parse("ring must be an array of positions".into()))?;
        positions
            .iter()
            .map(|pos| {
                let coords = pos
                    .as_array()
                    .filter(|c| c.len() >= 2)
                    .ok_or_else(|| Error::Parse("position must hold at least two numbers".into()))?;
                let num = |v: &Value| {
                    v.as_f64()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Parse(format!("non-numeric coordinate {v}")))
                };
                if coords.len() > 2 {
                    self.ignored_z += 1;
                }
                Ok(Vec2::new(num(&coords[0])?, num(&coords[1])?))
            })
            .collect()
    }
}

fn type_of(v: &Value) -> Result<&str> {
    v.get("type")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("object without a string `type` member".into()))
}

fn coordinates(v: &Value) -> Result<&Value> {
    v.get("coordinates")
        .ok_or_else(|| Error::Parse("geometry without `coordinates`".into()))
}

fn feature_id(feature: &Value) -> Result<Option<u32>> {
    let Some(id) = feature.get("properties").and_then(|p| p.get("id")) else {
        return Ok(None);
    };
    match id.as_u64() {
        Some(n) if n > 0 && n <= u32::MAX as u64 => Ok(Some(n as u32)),
        _ => Err(Error::InvalidRegionId(id.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::signed_area;

    #[test]
    fn unit_square_polygon() {
        let set = parse_geojson(r#"{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}"#).unwrap();
        assert_eq!(set.len(), 1);
        let r = &set.regions[0];
        assert_eq!(r.exterior.len(), 4);
        assert_eq!(r.region_id, 1);
        let b = set.crs_bounds.unwrap();
        assert_eq!((b.min.x, b.min.y, b.max.x, b.max.y), (0.0, 0.0, 1.0, 1.0));
    }

    #[test]
    fn feature_collection_assigns_sequential_ids() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
            {"type":"Feature","properties":null,"geometry":{"type":"Polygon","coordinates":[[[2,0],[3,0],[3,1],[2,0]]]}}
        ]}"#;
        let set = parse_geojson(text).unwrap();
        let ids: Vec<u32> = set.regions.iter().map(|r| r.region_id).collect();
        assert_eq!(ids, vec![1, 2]);
    }

    #[test]
    fn property_id_overrides() {
        let text = r#"{"type":"Feature","properties":{"id":7},
            "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}"#;
        assert_eq!(parse_geojson(text).unwrap().regions[0].region_id, 7);
        let bad = text.replace("7", "-3");
        assert!(matches!(parse_geojson(&bad), Err(Error::InvalidRegionId(_))));
    }

    #[test]
    fn missing_closing_vertex_is_rejected() {
        let r = parse_geojson(r#"{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1]]]}"#);
        assert!(matches!(r, Err(Error::UnclosedRing { polygon: 0, ring: 0 })));
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(parse_geojson("{not json"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_geojson(r#"{"type":"LineString","coordinates":[[0,0],[1,1]]}"#),
            Err(Error::UnsupportedGeometry(t)) if t == "LineString"
        ));
        assert!(matches!(
            parse_geojson(r#"{"type":"Polygon","coordinates":[[[0,0],[1,0],[0,0]]]}"#),
            Err(Error::DegenerateRing { .. })
        ));
        assert!(matches!(
            parse_geojson(r#"{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,0],[0,0]]]}"#),
            Err(Error::DegenerateRing { .. })
        ));
    }

    #[test]
    fn multipolygon_with_holes_and_z() {
        let text = r#"{"type":"MultiPolygon","coordinates":[
            [[[0,0,5],[0,4,5],[4,4,5],[4,0,5],[0,0,5]], [[1,1],[3,1],[3,3],[1,3],[1,1]]],
            [[[10,10],[11,10],[11,11],[10,10]]]
        ]}"#;
        let set = parse_geojson(text).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.ignored_z, 5);
        let r = &set.regions[0];
        assert!(signed_area(&r.exterior) > 0.0, "clockwise input is re-oriented");
        assert!(signed_area(&r.holes[0]) < 0.0, "counter-clockwise hole is re-oriented");
        assert_eq!(set.regions[1].region_id, 2);
    }

    #[test]
    fn parsing_is_deterministic() {
        let text = r#"{"type":"Polygon","coordinates":[[[0.1,0.2],[5.5,0.25],[3.3,9.1],[0.1,0.2]]]}"#;
        assert_eq!(parse_geojson(text).unwrap(), parse_geojson(text).unwrap());
    }
}
