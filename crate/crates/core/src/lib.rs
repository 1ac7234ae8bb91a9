//! Geometry, rasterization and morphology metrics for building paired
//! urban-block image datasets from vector city data.
//!
//! The crate is `no_std` and does no IO. Coordinates are planar meters,
//! raster row 0 is north.

#![no_std]

extern crate alloc;

pub mod arrangement;
pub mod blocks;
pub mod city;
pub mod clip;
pub mod error;
pub mod geom;
pub mod heights;
pub mod ingest;
pub mod morpho;
pub mod raster;
pub mod render;
pub mod scene;
pub mod summary;
pub mod validate;

pub use blocks::{
    apply_filter, assign_and_measure, extract_blocks, BlockConfig, BlockExtraction, BlockPolygon, BlockRecord,
    ExclusionReason, FilterPolicy,
};
pub use city::City;
pub use error::{IngestError, MetricsError, RasterError, ValidateError};
pub use geom::{Point, Polygon, Polyline};
pub use heights::{impute_and_classify_heights, HeightRanges};
pub use ingest::{parse_features, RawFeature, RawGeometry, TagMapping};
pub use morpho::{measure_block, BlockMetrics, BuildingRegion, MetricConfig};
pub use raster::{downsample, BitMask, Raster, Rgb};
pub use render::{render_pair, DiagramPair, RenderSpec, RenderStyle, Window};
pub use scene::{Building, BuildingFeature, CityScene, HeightClass, Landuse, ParsedScene, Road, RoadClass};
pub use summary::{compare, summarize, CompareConfig, ComparisonReport, MorphoSummary, Source};
pub use validate::{crosscity_grid, validate_proportion, ProportionConfig};
