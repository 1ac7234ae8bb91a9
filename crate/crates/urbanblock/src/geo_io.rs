//! GeoJSON feature collections to [`RawFeature`]s.
//!
//! Features are decoded one at a time so that one broken geometry becomes a
//! per-feature error instead of rejecting the whole document.

use std::path::Path;

use geojson::{Feature, GeometryValue, Position};
use serde_json::Value;
use urbanblock_core::ingest::{Coord, PropValue, RawFeature, RawGeometry};

use crate::error::{Error, Result};

pub fn read_geojson(path: &Path) -> Result<Vec<RawFeature>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_geojson(&text, path)
}

/// `origin` only labels errors.
pub fn parse_geojson(text: &str, origin: &Path) -> Result<Vec<RawFeature>> {
    let doc: Value = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_path_buf(),
        source,
    })?;
    let features = match doc.get("type").and_then(Value::as_str) {
        Some("FeatureCollection") => doc
            .get("features")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::format(origin, "FeatureCollection without a features array"))?
            .as_slice(),
        Some("Feature") => std::slice::from_ref(&doc),
        other => {
            return Err(Error::format(
                origin,
                format!("expected a FeatureCollection, found type {other:?}"),
            ))
        }
    };
    Ok(features.iter().map(convert_feature).collect())
}

fn convert_feature(v: &Value) -> RawFeature {
    let properties = v
        .get("properties")
        .and_then(Value::as_object)
        .map(|o| o.iter().map(|(k, v)| (k.clone(), prop(v))).collect())
        .unwrap_or_default();
    let geometry = match serde_json::from_value::<Feature>(v.clone()) {
        Ok(f) => f.geometry.map(|g| convert_geometry(&g.value)),
        Err(e) => Some(RawGeometry::Malformed(e.to_string())),
    };
    RawFeature { geometry, properties }
}

fn prop(v: &Value) -> PropValue {
    match v {
        Value::Null => PropValue::Null,
        Value::Bool(b) => PropValue::Bool(*b),
        Value::Number(n) => n.as_f64().map_or(PropValue::Null, PropValue::Num),
        Value::String(s) => PropValue::Str(s.clone()),
        other => PropValue::Str(other.to_string()),
    }
}

fn coord(p: &Position) -> std::result::Result<Coord, String> {
    match p.as_slice() {
        [x, y, ..] => Ok([*x, *y]),
        s => Err(format!("position with {} ordinates", s.len())),
    }
}

fn line(ps: &[Position]) -> std::result::Result<Vec<Coord>, String> {
    ps.iter().map(coord).collect()
}

fn rings(rs: &[Vec<Position>]) -> std::result::Result<Vec<Vec<Coord>>, String> {
    rs.iter().map(|r| line(r)).collect()
}

fn convert_geometry(g: &GeometryValue) -> RawGeometry {
    let r = match g {
        GeometryValue::Polygon { coordinates } => rings(coordinates).map(RawGeometry::Polygon),
        GeometryValue::MultiPolygon { coordinates } => coordinates
            .iter()
            .map(|p| rings(p))
            .collect::<std::result::Result<_, _>>()
            .map(RawGeometry::MultiPolygon),
        GeometryValue::LineString { coordinates } => line(coordinates).map(RawGeometry::LineString),
        GeometryValue::MultiLineString { coordinates } => coordinates
            .iter()
            .map(|l| line(l))
            .collect::<std::result::Result<_, _>>()
            .map(RawGeometry::MultiLineString),
        other => Ok(RawGeometry::Unsupported(other.type_name().to_string())),
    };
    r.unwrap_or_else(RawGeometry::Malformed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn broken_feature_does_not_poison_collection() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","properties":{"building":"yes","height":"12 m"},
             "geometry":{"type":"Polygon","coordinates":[[[0,0],[10,0],[10,10],[0,10],[0,0]]]}},
            {"type":"Feature","properties":{"building":"yes"},
             "geometry":{"type":"Polygon","coordinates":"oops"}},
            {"type":"Feature","properties":{"amenity":"bench"},
             "geometry":{"type":"Point","coordinates":[1,2]}},
            {"type":"Feature","properties":{"highway":"residential"},"geometry":null}
        ]}"#;
        let f = parse_geojson(text, Path::new("t.geojson")).unwrap();
        assert_eq!(f.len(), 4);
        assert!(matches!(f[0].geometry, Some(RawGeometry::Polygon(ref r)) if r[0].len() == 5));
        assert_eq!(f[0].properties["height"], PropValue::Str("12 m".into()));
        assert!(matches!(f[1].geometry, Some(RawGeometry::Malformed(_))));
        assert_eq!(f[1].properties["building"], PropValue::Str("yes".into()));
        assert_eq!(f[2].geometry, Some(RawGeometry::Unsupported("Point".into())));
        assert_eq!(f[3].geometry, None);
    }

    #[test]
    fn non_collection_is_rejected() {
        assert!(parse_geojson(r#"{"type":"Point","coordinates":[0,0]}"#, Path::new("x")).is_err());
        assert!(parse_geojson("not json", Path::new("x")).is_err());
    }
}
