//! Versioned JSON documents, TOML config files and the block inventory table.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use urbanblock_core::blocks::{BlockConfig, BlockRecord, BlockWarning, FilterPolicy};
use urbanblock_core::ingest::IngestReport;
use urbanblock_core::CityScene;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub schema_version: u32,
    pub scene: CityScene,
    pub ingest: IngestReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlocksFile {
    pub schema_version: u32,
    pub city: String,
    pub policy: FilterPolicy,
    pub config: BlockConfig,
    pub warning: Option<BlockWarning>,
    pub discarded_small: usize,
    /// Buildings overlapping no block.
    pub spillover: usize,
    pub records: Vec<BlockRecord>,
}

impl BlocksFile {
    pub fn included(&self) -> impl Iterator<Item = &BlockRecord> {
        self.records.iter().filter(|r| r.included)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_bytes(path, &to_json(value))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_slice(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a document carrying a top-level `schema_version`, rejecting
/// unknown versions before decoding the rest.
pub fn read_versioned<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let v: serde_json::Value = read_json(path)?;
    let found = v
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::format(path, "missing schema_version"))? as u32;
    if found != SCHEMA_VERSION {
        return Err(Error::Schema {
            path: path.to_path_buf(),
            found,
            expected: SCHEMA_VERSION,
        });
    }
    serde_json::from_value(v).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|source| Error::Toml {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct InventoryRow<'a> {
    block_id: &'a str,
    area_m2: f64,
    occupancy: f64,
    building_count: usize,
    industrial_only: bool,
    degenerate: bool,
    included: bool,
    reason: &'a str,
}

/// One CSV row per block for audit.
pub fn inventory_csv(records: &[BlockRecord]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(InventoryRow {
            block_id: &r.block_id,
            area_m2: (r.area_m2 * 100.0).round() / 100.0,
            occupancy: (r.occupancy * 1e4).round() / 1e4,
            building_count: r.building_count,
            industrial_only: r.industrial_only,
            degenerate: r.degenerate,
            included: r.included,
            reason: r.exclusion_reason.map_or("", |e| e.as_str()),
        })
        .expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}
