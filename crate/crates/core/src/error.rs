use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IngestError {
    #[error("empty scene: no usable building footprints")]
    EmptyScene,
    #[error("cannot impute: no building carries a known height")]
    CannotImpute,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RasterError {
    #[error("expected a {expected}x{expected} raster, got {width}x{height}")]
    WrongSize {
        expected: u32,
        width: u32,
        height: u32,
    },
    #[error("block not visible: polygon lies outside the window")]
    BlockNotVisible,
    #[error("invalid style: {0}")]
    InvalidStyle(String),
    #[error("scale denominator must be positive")]
    InvalidScale,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("cannot summarize an empty sample")]
    EmptySample,
    #[error("city mismatch: real summary is for {real}, generated for {generated}")]
    CityMismatch { real: String, generated: String },
    #[error("mask size {mask_w}x{mask_h} does not match image {img_w}x{img_h}")]
    MaskMismatch {
        mask_w: u32,
        mask_h: u32,
        img_w: u32,
        img_h: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValidateError {
    #[error("no block to design: image has no mask-colored pixels")]
    NoBlock,
    #[error("duplicate city in cross-city list: {0}")]
    DuplicateCity(String),
    #[error("cross-city grid needs at least one city")]
    NoCities,
}
