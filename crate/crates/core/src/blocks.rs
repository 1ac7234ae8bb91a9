//! Urban blocks: extraction from the road arrangement, building assignment,
//! occupancy, and the per-city inclusion filter.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::arrangement::{bounded_faces, inset_face, Segment};
use crate::city::City;
use crate::clip::intersection_area;
use crate::geom::{Polygon, Polyline};
use crate::scene::{CityScene, Landuse, RoadWidths};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct BlockConfig {
    pub widths: RoadWidths,
    pub min_area_m2: f64,
    pub snap_tolerance_m: f64,
    pub railways_bound_blocks: bool,
}

impl Default for BlockConfig {
    fn default() -> Self {
        Self {
            widths: RoadWidths::default(),
            min_area_m2: 400.0,
            snap_tolerance_m: 0.5,
            railways_bound_blocks: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockPolygon {
    pub id: String,
    pub polygon: Polygon,
    /// The corridor inset failed; `polygon` is the raw face.
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BlockWarning {
    NoRoads,
    NoBoundedFace,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockExtraction {
    pub blocks: Vec<BlockPolygon>,
    pub warning: Option<BlockWarning>,
    /// Faces dropped for being smaller than the minimum block area.
    pub discarded_small: usize,
}

/// Blocks bounded by the scene's roads (and railways, when configured).
pub fn extract_blocks(scene: &CityScene, cfg: &BlockConfig) -> BlockExtraction {
    let mut lines: Vec<(&Polyline, f64)> = scene
        .roads
        .iter()
        .map(|r| (&r.line, cfg.widths.road(r.class)))
        .collect();
    if lines.is_empty() {
        return BlockExtraction {
            warning: Some(BlockWarning::NoRoads),
            ..BlockExtraction::default()
        };
    }
    if cfg.railways_bound_blocks {
        lines.extend(scene.railways.iter().map(|r| (r, cfg.widths.railway_m)));
    }
    extract_blocks_from_lines(&lines, cfg)
}

pub fn extract_blocks_from_lines(lines: &[(&Polyline, f64)], cfg: &BlockConfig) -> BlockExtraction {
    let segments: Vec<Segment> = lines
        .iter()
        .flat_map(|(l, w)| l.segments().map(move |(a, b)| Segment { a, b, width: *w }))
        .collect();
    let faces = bounded_faces(&segments, cfg.snap_tolerance_m);
    if faces.is_empty() {
        return BlockExtraction {
            warning: Some(BlockWarning::NoBoundedFace),
            ..BlockExtraction::default()
        };
    }
    let mut discarded_small = 0;
    let mut blocks: Vec<(Polygon, bool)> = Vec::new();
    for face in &faces {
        let (poly, degenerate) = match inset_face(face) {
            Some(ring) => (Polygon::from_exterior(ring), false),
            None => (Polygon::from_exterior(face.ring.clone()), true),
        };
        // a collapsed face is a sliver between parallel corridors
        if poly.area() < cfg.min_area_m2 || (degenerate && face.area() < 4.0 * cfg.min_area_m2) {
            discarded_small += 1;
            continue;
        }
        blocks.push((poly, degenerate));
    }
    // reading order: north to south, then west to east
    blocks.sort_by(|a, b| {
        let (ca, cb) = (a.0.centroid(), b.0.centroid());
        cb.y.total_cmp(&ca.y).then(ca.x.total_cmp(&cb.x))
    });
    let blocks: Vec<BlockPolygon> = blocks
        .into_iter()
        .enumerate()
        .map(|(i, (polygon, degenerate))| BlockPolygon {
            id: format!("b{i:04}"),
            polygon,
            degenerate,
        })
        .collect();
    let warning = blocks.is_empty().then_some(BlockWarning::NoBoundedFace);
    BlockExtraction {
        blocks,
        warning,
        discarded_small,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ExclusionReason {
    LowOccupancy,
    TooFewBuildings,
    IndustrialOnly,
    DegenerateGeometry,
}

impl ExclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            ExclusionReason::LowOccupancy => "low_occupancy",
            ExclusionReason::TooFewBuildings => "too_few_buildings",
            ExclusionReason::IndustrialOnly => "industrial_only",
            ExclusionReason::DegenerateGeometry => "degenerate_geometry",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockRecord {
    pub block_id: String,
    pub polygon: Polygon,
    pub area_m2: f64,
    /// Indices into the scene's building list.
    pub buildings: Vec<usize>,
    pub occupancy: f64,
    pub building_count: usize,
    pub industrial_only: bool,
    pub degenerate: bool,
    pub included: bool,
    pub exclusion_reason: Option<ExclusionReason>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub records: Vec<BlockRecord>,
    /// Buildings that overlap no block at all.
    pub spillover: usize,
}

/// Assigns each building to the block holding the larger share of its
/// footprint and measures block occupancy from clipped areas.
pub fn assign_and_measure(blocks: &[BlockPolygon], scene: &CityScene) -> Assignment {
    let boxes: Vec<_> = blocks.iter().map(|b| b.polygon.bbox()).collect();
    let mut covered = alloc::vec![0.0f64; blocks.len()];
    let mut members: Vec<Vec<usize>> = alloc::vec![Vec::new(); blocks.len()];
    let mut spillover = 0;
    for (bi, building) in scene.buildings.iter().enumerate() {
        let fp = &building.feature.footprint;
        let fb = fp.bbox();
        let mut best: Option<(f64, usize)> = None;
        for (k, block) in blocks.iter().enumerate() {
            if !boxes[k].intersects(&fb) {
                continue;
            }
            let a = intersection_area(&block.polygon, fp);
            if a <= 0.0 {
                continue;
            }
            covered[k] += a;
            if best.is_none_or(|(ba, _)| a > ba) {
                best = Some((a, k));
            }
        }
        match best {
            Some((_, k)) => members[k].push(bi),
            None => spillover += 1,
        }
    }
    let records = blocks
        .iter()
        .zip(members)
        .zip(covered)
        .map(|((block, buildings), covered)| {
            let area_m2 = block.polygon.area();
            let occupancy = if area_m2 > 0.0 {
                (covered / area_m2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let industrial_only = !buildings.is_empty()
                && buildings
                    .iter()
                    .all(|&i| scene.buildings[i].feature.landuse == Landuse::Industrial);
            BlockRecord {
                block_id: block.id.clone(),
                polygon: block.polygon.clone(),
                area_m2,
                building_count: buildings.len(),
                buildings,
                occupancy,
                industrial_only,
                degenerate: block.degenerate,
                included: !block.degenerate,
                exclusion_reason: block.degenerate.then_some(ExclusionReason::DegenerateGeometry),
            }
        })
        .collect();
    Assignment { records, spillover }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FilterPolicy {
    /// Occupancy must be strictly greater than this.
    pub min_occupancy: f64,
    pub min_building_count: usize,
    pub exclude_industrial_only: bool,
}

impl FilterPolicy {
    pub const MILAN: FilterPolicy = FilterPolicy {
        min_occupancy: 0.12,
        min_building_count: 0,
        exclude_industrial_only: true,
    };

    /// "More than 8 buildings" reads as at least 9.
    pub const TALLINN: FilterPolicy = FilterPolicy {
        min_occupancy: 0.12,
        min_building_count: 9,
        exclude_industrial_only: true,
    };

    pub fn for_city(city: City) -> Self {
        match city {
            City::Milan | City::Amsterdam | City::Turin => Self::MILAN,
            City::Tallinn | City::Bengaluru => Self::TALLINN,
        }
    }

    /// First failing rule, checked in the order degenerate geometry,
    /// occupancy, building count, industrial.
    pub fn verdict(
        &self,
        occupancy: f64,
        building_count: usize,
        industrial_only: bool,
        degenerate: bool,
    ) -> Option<ExclusionReason> {
        if degenerate {
            Some(ExclusionReason::DegenerateGeometry)
        } else if !(occupancy > self.min_occupancy) {
            Some(ExclusionReason::LowOccupancy)
        } else if building_count < self.min_building_count {
            Some(ExclusionReason::TooFewBuildings)
        } else if self.exclude_industrial_only && industrial_only {
            Some(ExclusionReason::IndustrialOnly)
        } else {
            None
        }
    }
}

impl Default for FilterPolicy {
    fn default() -> Self {
        Self::MILAN
    }
}

pub fn apply_filter(mut records: Vec<BlockRecord>, policy: &FilterPolicy) -> Vec<BlockRecord> {
    for r in &mut records {
        r.exclusion_reason =
            policy.verdict(r.occupancy, r.building_count, r.industrial_only, r.degenerate);
        r.included = r.exclusion_reason.is_none();
    }
    records
}
