//! Normalized city scene: buildings with height classes, roads, railways.

use alloc::string::String;
use alloc::vec::Vec;

use crate::geom::{Aabb, Polygon, Polyline};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Landuse {
    Residential,
    Mixed,
    Industrial,
    Other,
    Unknown,
}

/// Height range of a building; ordered `Low < Medium < High`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum HeightClass {
    Low,
    Medium,
    High,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildingFeature {
    pub footprint: Polygon,
    pub height_m: Option<f64>,
    pub landuse: Landuse,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Building {
    pub feature: BuildingFeature,
    pub height_class: HeightClass,
    /// The height was missing in the source and replaced by the city mean.
    #[cfg_attr(feature = "serde", serde(default))]
    pub height_imputed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RoadClass {
    Primary,
    Other,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Road {
    pub line: Polyline,
    pub class: RoadClass,
}

/// Full corridor widths used both to carve blocks out of the road
/// arrangement and to stroke roads when rendering.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoadWidths {
    pub primary_m: f64,
    pub other_m: f64,
    pub railway_m: f64,
}

impl Default for RoadWidths {
    fn default() -> Self {
        Self {
            primary_m: 8.0,
            other_m: 5.0,
            railway_m: 5.0,
        }
    }
}

impl RoadWidths {
    pub fn road(&self, class: RoadClass) -> f64 {
        match class {
            RoadClass::Primary => self.primary_m,
            RoadClass::Other => self.other_m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeightStats {
    pub mean_m: f64,
    pub threshold_low_m: f64,
    pub threshold_high_m: f64,
    pub known_count: usize,
}

/// Geographic origin of the local planar frame (degrees).
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GeoOrigin {
    pub lon: f64,
    pub lat: f64,
}

/// Scene straight out of ingestion, before heights are imputed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ParsedScene {
    pub city: String,
    pub buildings: Vec<BuildingFeature>,
    pub roads: Vec<Road>,
    pub railways: Vec<Polyline>,
    pub crs_note: String,
    pub origin: Option<GeoOrigin>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CityScene {
    pub city: String,
    pub buildings: Vec<Building>,
    pub roads: Vec<Road>,
    pub railways: Vec<Polyline>,
    pub crs_note: String,
    pub origin: Option<GeoOrigin>,
    pub height_stats: HeightStats,
}

impl CityScene {
    pub fn bbox(&self) -> Aabb {
        let mut b = Aabb::EMPTY;
        for bl in &self.buildings {
            b = b.union(&bl.feature.footprint.bbox());
        }
        for r in &self.roads {
            b = b.union(&r.line.bbox());
        }
        for r in &self.railways {
            b = b.union(&r.bbox());
        }
        b
    }
}
