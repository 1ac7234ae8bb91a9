//! Morphology metrics over a directory of diagram images.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use urbanblock_core::morpho::{mask_from_image_a, measure_block, BlockMetrics, MetricConfig};
use urbanblock_core::raster::BitMask;
use urbanblock_core::summary::{summarize, MorphoSummary, Source};
use urbanblock_core::City;

use crate::error::{Error, Result};
use crate::formats::SCHEMA_VERSION;
use crate::image_io::{read_mask_png, read_png};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub image: String,
    pub key: String,
    pub mask: String,
    pub metrics: BlockMetrics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub city: String,
    pub source: Source,
    pub config: MetricConfig,
    pub rows: Vec<MetricsRow>,
    pub summary: MorphoSummary,
}

/// Image name to its pairing key: `X_B.png` and `X_gen.png` both give `X`.
pub fn image_key(name: &str) -> Option<(&str, Source)> {
    let stem = name.strip_suffix(".png")?;
    if let Some(k) = stem.strip_suffix("_gen") {
        Some((k, Source::Generated))
    } else {
        stem.strip_suffix("_B").map(|k| (k, Source::RealDataset))
    }
}

fn list_png(dir: &Path) -> Result<Vec<String>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_ok_and(|t| t.is_file()))
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".png"))
        .collect();
    names.sort();
    Ok(names)
}

enum MaskFile {
    Binary(PathBuf),
    FromA(PathBuf),
}

/// Mask for `key`: `{key}_mask.png`, else `{key}_A.png`, else the unique
/// `*_{key}_mask.png` / `*_{key}_A.png` (generated images drop the city prefix).
fn find_mask(key: &str, names: &[String], dir: &Path) -> Option<MaskFile> {
    let exact_mask = format!("{key}_mask.png");
    let exact_a = format!("{key}_A.png");
    if names.contains(&exact_mask) {
        return Some(MaskFile::Binary(dir.join(exact_mask)));
    }
    if names.contains(&exact_a) {
        return Some(MaskFile::FromA(dir.join(exact_a)));
    }
    let (tm, ta) = (format!("_{exact_mask}"), format!("_{exact_a}"));
    let hits: Vec<&String> = names.iter().filter(|n| n.ends_with(&tm) || n.ends_with(&ta)).collect();
    match hits.as_slice() {
        [one] if one.ends_with(&tm) => Some(MaskFile::Binary(dir.join(one))),
        [one] => Some(MaskFile::FromA(dir.join(one))),
        _ => None,
    }
}

fn infer_city(keys: &[&str]) -> Option<String> {
    let mut cities = keys
        .iter()
        .map(|k| k.split('_').next().and_then(|p| p.parse::<City>().ok()));
    let first = cities.next()??;
    cities.all(|c| c == Some(first)).then(|| first.name().to_string())
}

fn display_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Measures every `*_B.png` / `*_gen.png` under `images`, pairing each
/// with a block mask from `masks` (or `images` itself).
pub fn measure_directory(
    images: &Path,
    masks: Option<&Path>,
    city: Option<&str>,
    source: Option<Source>,
    cfg: &MetricConfig,
) -> Result<MetricsReport> {
    let names = list_png(images)?;
    let targets: Vec<(&String, &str, Source)> = names
        .iter()
        .filter_map(|n| image_key(n).map(|(k, s)| (n, k, s)))
        .collect();
    if targets.is_empty() {
        return Err(Error::format(images, "no *_B.png or *_gen.png images"));
    }
    let mask_dir = masks.unwrap_or(images);
    let mask_names = if mask_dir == images { names.clone() } else { list_png(mask_dir)? };

    let source = source.unwrap_or(if targets.iter().any(|t| t.2 == Source::Generated) {
        Source::Generated
    } else {
        Source::RealDataset
    });
    let keys: Vec<&str> = targets.iter().map(|t| t.1).collect();
    let city = match city {
        Some(c) => c.to_string(),
        None => infer_city(&keys).ok_or_else(|| {
            Error::Config("cannot infer the city from image names; pass --city".into())
        })?,
    };

    let rows: Vec<Result<MetricsRow>> = targets
        .par_iter()
        .map(|&(name, key, _)| {
            let img_path = images.join(name);
            let mask_file = find_mask(key, &mask_names, mask_dir).ok_or_else(|| {
                Error::format(&img_path, format!("no block mask found in {}", mask_dir.display()))
            })?;
            let image = read_png(&img_path)?;
            let (mask, mask_path): (BitMask, PathBuf) = match mask_file {
                MaskFile::Binary(p) => (read_mask_png(&p)?, p),
                MaskFile::FromA(p) => (mask_from_image_a(&read_png(&p)?, cfg.mask), p),
            };
            if mask.is_empty() {
                return Err(Error::format(&mask_path, "block mask is empty"));
            }
            let metrics = measure_block(&image, &mask, cfg).map_err(|e| Error::format(&img_path, e.to_string()))?;
            Ok(MetricsRow {
                image: name.clone(),
                key: key.to_string(),
                mask: display_name(&mask_path),
                metrics,
            })
        })
        .collect();
    let rows: Vec<MetricsRow> = rows.into_iter().collect::<Result<_>>()?;
    let samples: Vec<BlockMetrics> = rows.iter().map(|r| r.metrics.clone()).collect();
    let summary = summarize(&samples, &city, source)?;
    Ok(MetricsReport {
        schema_version: SCHEMA_VERSION,
        city,
        source,
        config: *cfg,
        rows,
        summary,
    })
}
