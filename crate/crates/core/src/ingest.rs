//! Classification of raw vector features into a [`ParsedScene`].
//!
//! This module knows nothing about the text format. A reader turns each
//! feature of a geo-feature document into a [`RawFeature`] (coordinates plus
//! a property bag) and [`parse_features`] does the rest: classify, validate,
//! reproject into a local planar frame in meters.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::IngestError;
use crate::geom::{Point, Polygon, Polyline};
use crate::scene::{BuildingFeature, GeoOrigin, Landuse, ParsedScene, Road, RoadClass};

/// Mean Earth radius (IUGG), meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Clone, Debug, PartialEq)]
pub enum PropValue {
    Str(String),
    Num(f64),
    Bool(bool),
    Null,
}

impl PropValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            PropValue::Str(s) => Some(s.as_str()),
            _ => None,
        }
    }
}

pub type Coord = [f64; 2];

#[derive(Clone, Debug, PartialEq)]
pub enum RawGeometry {
    Polygon(Vec<Vec<Coord>>),
    MultiPolygon(Vec<Vec<Vec<Coord>>>),
    LineString(Vec<Coord>),
    MultiLineString(Vec<Vec<Coord>>),
    /// Any geometry this pipeline has no use for (points, collections).
    Unsupported(String),
    /// The reader could not decode the geometry.
    Malformed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RawFeature {
    pub geometry: Option<RawGeometry>,
    pub properties: BTreeMap<String, PropValue>,
}

impl RawFeature {
    pub fn new(geometry: RawGeometry) -> Self {
        Self {
            geometry: Some(geometry),
            properties: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: PropValue) -> Self {
        self.properties.insert(key.to_string(), value);
        self
    }

    pub fn tag(self, key: &str, value: &str) -> Self {
        self.with(key, PropValue::Str(value.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CoordinateMode {
    /// Longitude/latitude in degrees, reprojected equirectangularly.
    Geographic,
    /// Already planar meters; only recentered.
    Projected,
    /// Geographic if every coordinate is within lon/lat range.
    #[default]
    Auto,
}

/// Property keys and tag vocabularies used to classify features.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TagMapping {
    pub height_key: String,
    pub building_key: String,
    /// Treat every polygonal feature as a building (portal layers that
    /// only contain footprints carry no building tag).
    pub all_polygons_are_buildings: bool,
    /// Keys probed in order for a landuse value.
    pub landuse_keys: Vec<String>,
    pub landuse_table: BTreeMap<String, Landuse>,
    pub road_key: String,
    /// Road tag values that never bound a block.
    pub road_exclude: Vec<String>,
    pub primary_road_values: Vec<String>,
    pub railway_key: String,
    pub railway_values: Vec<String>,
    pub coordinates: CoordinateMode,
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

impl Default for TagMapping {
    fn default() -> Self {
        let mut table = BTreeMap::new();
        for v in [
            "residential",
            "apartments",
            "house",
            "detached",
            "semidetached_house",
            "terrace",
            "dormitory",
            "bungalow",
        ] {
            table.insert(v.to_string(), Landuse::Residential);
        }
        for v in ["mixed", "mixed_use", "mixed-use", "residential;commercial"] {
            table.insert(v.to_string(), Landuse::Mixed);
        }
        for v in [
            "industrial",
            "warehouse",
            "factory",
            "manufacture",
            "industry",
            "works",
        ] {
            table.insert(v.to_string(), Landuse::Industrial);
        }
        for v in [
            "commercial",
            "retail",
            "office",
            "school",
            "church",
            "hospital",
            "public",
            "civic",
            "garage",
            "garages",
            "shed",
        ] {
            table.insert(v.to_string(), Landuse::Other);
        }
        Self {
            height_key: "height".to_string(),
            building_key: "building".to_string(),
            all_polygons_are_buildings: false,
            landuse_keys: strings(&["building:use", "building", "landuse"]),
            landuse_table: table,
            road_key: "highway".to_string(),
            road_exclude: strings(&[
                "footway",
                "path",
                "cycleway",
                "steps",
                "bridleway",
                "corridor",
                "elevator",
                "platform",
                "proposed",
                "construction",
                "track",
            ]),
            primary_road_values: strings(&[
                "motorway",
                "motorway_link",
                "trunk",
                "trunk_link",
                "primary",
                "primary_link",
                "secondary",
                "secondary_link",
            ]),
            railway_key: "railway".to_string(),
            railway_values: strings(&[
                "rail",
                "light_rail",
                "subway",
                "tram",
                "narrow_gauge",
                "monorail",
            ]),
            coordinates: CoordinateMode::Auto,
        }
    }
}

impl TagMapping {
    /// OSM vocabulary plus the portal vocabulary of the given city.
    ///
    /// The industrial entries are a best-effort mapping.
    pub fn for_city(city: &str) -> Self {
        let mut m = Self::default();
        let extra: &[(&str, Landuse)] = match city.to_ascii_lowercase().as_str() {
            "amsterdam" => &[
                ("woonfunctie", Landuse::Residential),
                ("industriefunctie", Landuse::Industrial),
                ("winkelfunctie", Landuse::Other),
                ("kantoorfunctie", Landuse::Other),
            ],
            "milan" | "milano" | "turin" | "torino" => &[
                ("residenziale", Landuse::Residential),
                ("misto", Landuse::Mixed),
                ("industriale", Landuse::Industrial),
                ("produttivo", Landuse::Industrial),
                ("commerciale", Landuse::Other),
            ],
            "tallinn" => &[
                ("elamu", Landuse::Residential),
                ("tootmishoone", Landuse::Industrial),
                ("tööstushoone", Landuse::Industrial),
            ],
            _ => &[],
        };
        for (k, v) in extra {
            m.landuse_table.insert(k.to_string(), *v);
        }
        m
    }

    fn landuse_of(&self, props: &BTreeMap<String, PropValue>) -> Landuse {
        for key in &self.landuse_keys {
            if let Some(v) = props.get(key).and_then(PropValue::as_text) {
                let v = v.trim().to_ascii_lowercase();
                if let Some(l) = self.landuse_table.get(&v) {
                    return *l;
                }
            }
        }
        Landuse::Unknown
    }

    fn is_building(&self, props: &BTreeMap<String, PropValue>) -> bool {
        if self.all_polygons_are_buildings {
            return true;
        }
        match props.get(&self.building_key) {
            Some(PropValue::Str(s)) => s != "no",
            Some(PropValue::Bool(b)) => *b,
            Some(PropValue::Num(_)) => true,
            _ => false,
        }
    }

    fn road_class(&self, props: &BTreeMap<String, PropValue>) -> Option<RoadClass> {
        let v = props.get(&self.road_key).and_then(PropValue::as_text)?;
        if self.road_exclude.iter().any(|e| e == v) {
            return None;
        }
        if self.primary_road_values.iter().any(|e| e == v) {
            Some(RoadClass::Primary)
        } else {
            Some(RoadClass::Other)
        }
    }

    fn is_railway(&self, props: &BTreeMap<String, PropValue>) -> bool {
        props
            .get(&self.railway_key)
            .and_then(PropValue::as_text)
            .is_some_and(|v| self.railway_values.iter().any(|e| e == v))
    }
}

/// Parses a height value in meters: plain numbers or text such as
/// `"12"`, `"12.5 m"`, `"12,5"`.
pub fn parse_height(v: &PropValue) -> Option<f64> {
    let h = match v {
        PropValue::Num(n) => *n,
        PropValue::Str(s) => {
            let s = s.trim();
            let end = s
                .char_indices()
                .find(|(_, c)| !(c.is_ascii_digit() || *c == '.' || *c == ',' || *c == '-'))
                .map_or(s.len(), |(i, _)| i);
            let num = s[..end].replace(',', ".");
            num.parse::<f64>().ok()?
        }
        _ => return None,
    };
    (h.is_finite() && h >= 0.0).then_some(h)
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeatureErrorKind {
    MalformedGeometry(String),
    SelfIntersection,
    ZeroArea,
    NonFiniteCoordinate,
    TooFewPoints,
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureError {
    pub index: usize,
    pub kind: FeatureErrorKind,
}

/// Bookkeeping of one ingestion run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IngestReport {
    pub features_in: usize,
    /// Building polygons seen (multipolygon parts counted separately).
    pub buildings_in: usize,
    pub buildings_out: usize,
    pub buildings_skipped: usize,
    pub roads_out: usize,
    pub railways_out: usize,
    pub unknown_skipped: usize,
    /// Height values present but unusable (negative, non-numeric).
    pub invalid_heights: usize,
    pub missing_heights: usize,
    pub errors: Vec<FeatureError>,
}

enum Pending {
    Building {
        index: usize,
        rings: Vec<Vec<Coord>>,
        height_m: Option<f64>,
        landuse: Landuse,
    },
    Line {
        index: usize,
        coords: Vec<Coord>,
        road: Option<RoadClass>,
    },
}

fn all_finite(c: &[Coord]) -> bool {
    c.iter().all(|p| p[0].is_finite() && p[1].is_finite())
}

/// Classifies and reprojects `features` into a [`ParsedScene`].
///
/// Bad features are recorded in the report and skipped; only a scene
/// without any usable building is fatal.
pub fn parse_features(
    city: &str,
    features: &[RawFeature],
    mapping: &TagMapping,
) -> Result<(ParsedScene, IngestReport), IngestError> {
    let mut report = IngestReport {
        features_in: features.len(),
        ..IngestReport::default()
    };
    let mut pending = Vec::new();

    for (index, f) in features.iter().enumerate() {
        let props = &f.properties;
        let Some(geom) = &f.geometry else {
            report.unknown_skipped += 1;
            continue;
        };
        let building = mapping.is_building(props);
        let road = mapping.road_class(props);
        let rail = mapping.is_railway(props);
        match geom {
            RawGeometry::Malformed(msg) => {
                if building {
                    report.buildings_in += 1;
                    report.buildings_skipped += 1;
                }
                report.errors.push(FeatureError {
                    index,
                    kind: FeatureErrorKind::MalformedGeometry(msg.clone()),
                });
            }
            RawGeometry::Polygon(_) | RawGeometry::MultiPolygon(_) if building => {
                let parts: Vec<&Vec<Vec<Coord>>> = match geom {
                    RawGeometry::Polygon(r) => vec![r],
                    RawGeometry::MultiPolygon(ps) => ps.iter().collect(),
                    _ => unreachable!(),
                };
                let height_m = match props.get(&mapping.height_key) {
                    None | Some(PropValue::Null) => {
                        report.missing_heights += parts.len();
                        None
                    }
                    Some(v) => {
                        let h = parse_height(v);
                        if h.is_none() {
                            report.invalid_heights += parts.len();
                            report.missing_heights += parts.len();
                        }
                        h
                    }
                };
                let landuse = mapping.landuse_of(props);
                for rings in parts {
                    report.buildings_in += 1;
                    pending.push(Pending::Building {
                        index,
                        rings: rings.clone(),
                        height_m,
                        landuse,
                    });
                }
            }
            RawGeometry::LineString(_) | RawGeometry::MultiLineString(_) if road.is_some() || rail => {
                let lines: Vec<&Vec<Coord>> = match geom {
                    RawGeometry::LineString(l) => vec![l],
                    RawGeometry::MultiLineString(ls) => ls.iter().collect(),
                    _ => unreachable!(),
                };
                for l in lines {
                    pending.push(Pending::Line {
                        index,
                        coords: l.clone(),
                        road,
                    });
                }
            }
            _ => report.unknown_skipped += 1,
        }
    }

    // frame origin from every finite coordinate of classified features
    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    let mut visit = |c: &Coord| {
        if c[0].is_finite() && c[1].is_finite() {
            for k in 0..2 {
                min[k] = min[k].min(c[k]);
                max[k] = max[k].max(c[k]);
            }
        }
    };
    for p in &pending {
        match p {
            Pending::Building { rings, .. } => rings.iter().flatten().for_each(&mut visit),
            Pending::Line { coords, .. } => coords.iter().for_each(&mut visit),
        }
    }
    let have_coords = min[0] <= max[0];
    let geographic = match mapping.coordinates {
        CoordinateMode::Geographic => true,
        CoordinateMode::Projected => false,
        CoordinateMode::Auto => {
            have_coords && min[0] >= -180.0 && max[0] <= 180.0 && min[1] >= -90.0 && max[1] <= 90.0
        }
    };
    let center = if have_coords {
        [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])]
    } else {
        [0.0, 0.0]
    };
    let frame = LocalFrame::new(center, geographic);

    let mut buildings = Vec::new();
    let mut roads = Vec::new();
    let mut railways = Vec::new();
    for p in pending {
        match p {
            Pending::Building {
                index,
                rings,
                height_m,
                landuse,
            } => match frame.polygon(&rings) {
                Ok(footprint) => buildings.push(BuildingFeature {
                    footprint,
                    height_m,
                    landuse,
                }),
                Err(kind) => {
                    report.buildings_skipped += 1;
                    report.errors.push(FeatureError { index, kind });
                }
            },
            Pending::Line { index, coords, road } => {
                if !all_finite(&coords) {
                    report.errors.push(FeatureError {
                        index,
                        kind: FeatureErrorKind::NonFiniteCoordinate,
                    });
                    continue;
                }
                let mut pts: Vec<Point> = coords.iter().map(|c| frame.project(*c)).collect();
                pts.dedup();
                if pts.len() < 2 {
                    report.errors.push(FeatureError {
                        index,
                        kind: FeatureErrorKind::TooFewPoints,
                    });
                    continue;
                }
                match road {
                    Some(class) => roads.push(Road {
                        line: Polyline(pts),
                        class,
                    }),
                    None => railways.push(Polyline(pts)),
                }
            }
        }
    }
    report.buildings_out = buildings.len();
    report.roads_out = roads.len();
    report.railways_out = railways.len();

    if buildings.is_empty() {
        return Err(IngestError::EmptyScene);
    }

    let (crs_note, origin) = if geographic {
        (
            format!(
                "local equirectangular frame in meters centered at lon {:.6}, lat {:.6}",
                center[0], center[1]
            ),
            Some(GeoOrigin {
                lon: center[0],
                lat: center[1],
            }),
        )
    } else {
        (
            format!(
                "source planar coordinates recentered by ({:.3}, {:.3})",
                center[0], center[1]
            ),
            None,
        )
    };

    Ok((
        ParsedScene {
            city: city.to_string(),
            buildings,
            roads,
            railways,
            crs_note,
            origin,
        },
        report,
    ))
}

/// Local planar frame centered on the scene bounding box.
#[derive(Clone, Copy, Debug)]
pub struct LocalFrame {
    center: Coord,
    geographic: bool,
    cos_lat: f64,
}

impl LocalFrame {
    pub fn new(center: Coord, geographic: bool) -> Self {
        Self {
            center,
            geographic,
            cos_lat: libm::cos(center[1] * core::f64::consts::PI / 180.0),
        }
    }

    pub fn project(&self, c: Coord) -> Point {
        if self.geographic {
            let k = EARTH_RADIUS_M * core::f64::consts::PI / 180.0;
            Point::new(
                (c[0] - self.center[0]) * k * self.cos_lat,
                (c[1] - self.center[1]) * k,
            )
        } else {
            Point::new(c[0] - self.center[0], c[1] - self.center[1])
        }
    }

    fn polygon(&self, rings: &[Vec<Coord>]) -> Result<Polygon, FeatureErrorKind> {
        let Some((ext, holes)) = rings.split_first() else {
            return Err(FeatureErrorKind::TooFewPoints);
        };
        if !rings.iter().all(|r| all_finite(r)) {
            return Err(FeatureErrorKind::NonFiniteCoordinate);
        }
        let ring = |r: &Vec<Coord>| r.iter().map(|c| self.project(*c)).collect::<Vec<_>>();
        let poly = Polygon::new(ring(ext), holes.iter().map(ring).collect());
        if poly.exterior.len() < 3 {
            return Err(FeatureErrorKind::TooFewPoints);
        }
        if poly.area() <= 0.0 {
            return Err(FeatureErrorKind::ZeroArea);
        }
        if poly.has_self_intersection() {
            return Err(FeatureErrorKind::SelfIntersection);
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64) -> RawGeometry {
        RawGeometry::Polygon(vec![vec![
            [x, y],
            [x + s, y],
            [x + s, y + s],
            [x, y + s],
            [x, y],
        ]])
    }

    fn line(a: Coord, b: Coord) -> RawGeometry {
        RawGeometry::LineString(vec![a, b])
    }

    #[test]
    fn counts_are_preserved() {
        let feats = vec![
            RawFeature::new(square(0.0, 0.0, 10.0)).tag("building", "yes"),
            RawFeature::new(square(20.0, 0.0, 10.0)).tag("building", "residential"),
            RawFeature::new(square(40.0, 0.0, 10.0)).tag("building", "industrial"),
            RawFeature::new(line([-10.0, -5.0], [60.0, -5.0])).tag("highway", "residential"),
            RawFeature::new(line([-10.0, 15.0], [60.0, 15.0])).tag("highway", "primary"),
        ];
        let mapping = TagMapping {
            coordinates: CoordinateMode::Projected,
            ..TagMapping::default()
        };
        let (scene, report) = parse_features("test", &feats, &mapping).unwrap();
        assert_eq!(scene.buildings.len(), 3);
        assert_eq!(scene.roads.len(), 2);
        assert_eq!(scene.railways.len(), 0);
        assert_eq!(scene.roads[1].class, RoadClass::Primary);
        assert_eq!(scene.buildings[1].landuse, Landuse::Residential);
        assert_eq!(scene.buildings[2].landuse, Landuse::Industrial);
        assert_eq!(scene.buildings[0].landuse, Landuse::Unknown);
        assert_eq!(report.missing_heights, 3);
        assert!(scene.buildings.iter().all(|b| b.height_m.is_none()));
    }

    #[test]
    fn self_intersecting_footprint_is_skipped() {
        let bowtie = RawGeometry::Polygon(vec![vec![
            [0.0, 0.0],
            [10.0, 10.0],
            [10.0, 0.0],
            [0.0, 10.0],
            [0.0, 0.0],
        ]]);
        let feats = vec![
            RawFeature::new(square(0.0, 0.0, 10.0)).tag("building", "yes"),
            RawFeature::new(bowtie).tag("building", "yes"),
            RawFeature::new(square(30.0, 0.0, 5.0)).tag("building", "yes"),
        ];
        let (scene, report) = parse_features("t", &feats, &TagMapping::default()).unwrap();
        assert_eq!(scene.buildings.len(), 2);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].index, 1);
        assert_eq!(report.errors[0].kind, FeatureErrorKind::SelfIntersection);
        assert_eq!(report.buildings_in, report.buildings_out + report.buildings_skipped);
    }

    #[test]
    fn empty_scene_is_fatal() {
        let feats = vec![RawFeature::new(line([0.0, 0.0], [1.0, 1.0])).tag("highway", "primary")];
        assert_eq!(
            parse_features("t", &feats, &TagMapping::default()).unwrap_err(),
            IngestError::EmptyScene
        );
    }

    #[test]
    fn unknown_and_malformed_features() {
        let feats = vec![
            RawFeature::new(square(0.0, 0.0, 10.0)).tag("building", "yes"),
            RawFeature::new(square(0.0, 0.0, 10.0)).tag("leisure", "park"),
            RawFeature::new(RawGeometry::Unsupported("Point".into())).tag("amenity", "bench"),
            RawFeature::new(RawGeometry::Malformed("ring not closed".into())).tag("building", "yes"),
            RawFeature::new(line([0.0, 0.0], [1.0, 1.0])).tag("highway", "footway"),
        ];
        let (scene, report) = parse_features("t", &feats, &TagMapping::default()).unwrap();
        assert_eq!(scene.buildings.len(), 1);
        assert_eq!(report.unknown_skipped, 3);
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.buildings_in, 2);
        assert_eq!(report.buildings_skipped, 1);
    }

    #[test]
    fn geographic_reprojection_is_metric() {
        // 0.001 deg of latitude ~ 111.2 m
        let feats = vec![
            RawFeature::new(RawGeometry::Polygon(vec![vec![
                [9.19, 45.464],
                [9.191, 45.464],
                [9.191, 45.465],
                [9.19, 45.465],
            ]]))
            .tag("building", "yes"),
        ];
        let (scene, _) = parse_features("milan", &feats, &TagMapping::default()).unwrap();
        let bb = scene.buildings[0].footprint.bbox();
        assert!((bb.height() - 111.195).abs() < 0.01, "{}", bb.height());
        let expect_w = 111.195 * libm::cos(45.4645 * core::f64::consts::PI / 180.0);
        assert!((bb.width() - expect_w).abs() < 0.01);
        assert!(bb.center().norm() < 1e-6);
        assert!(scene.origin.is_some());
    }

    #[test]
    fn heights_parse_variants() {
        assert_eq!(parse_height(&PropValue::Num(12.0)), Some(12.0));
        assert_eq!(parse_height(&PropValue::Str("12.5 m".into())), Some(12.5));
        assert_eq!(parse_height(&PropValue::Str("7,5".into())), Some(7.5));
        assert_eq!(parse_height(&PropValue::Str("-3".into())), None);
        assert_eq!(parse_height(&PropValue::Str("tall".into())), None);
        assert_eq!(parse_height(&PropValue::Num(f64::NAN)), None);
    }

    #[test]
    fn city_tables_extend_defaults() {
        let m = TagMapping::for_city("Amsterdam");
        assert_eq!(m.landuse_table.get("industriefunctie"), Some(&Landuse::Industrial));
        assert_eq!(m.landuse_table.get("industrial"), Some(&Landuse::Industrial));
    }
}
