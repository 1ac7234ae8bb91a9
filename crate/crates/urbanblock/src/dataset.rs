//! Paired A/B image datasets from filtered blocks.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use urbanblock_core::blocks::BlockRecord;
use urbanblock_core::render::{render_pair, RenderSpec, RenderStyle};
use urbanblock_core::CityScene;

use crate::error::{Error, Result};
use crate::formats::{to_json, write_bytes, SCHEMA_VERSION};
use crate::image_io::encode_png;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetConfig {
    pub scale_denominator: u32,
    pub spec: RenderSpec,
    pub style: RenderStyle,
    /// Pairs whose block covers more of the image than this are flagged.
    pub max_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            scale_denominator: 3000,
            spec: RenderSpec::default(),
            style: RenderStyle::default(),
            max_fraction: 0.30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub block_id: String,
    /// File names relative to the manifest.
    pub image_a: String,
    pub image_b: String,
    pub block_pixel_fraction: f64,
    pub over_proportion: bool,
    pub occupancy: f64,
    pub building_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub city: String,
    pub scale_denominator: u32,
    pub render_spec: RenderSpec,
    pub style: RenderStyle,
    pub style_fingerprint: String,
    pub max_fraction: f64,
    pub pairs: Vec<ManifestRow>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of everything that determines pixel values besides the scene.
pub fn style_fingerprint(cfg: &DatasetConfig) -> String {
    sha256_hex(&to_json(&(&cfg.style, &cfg.spec, cfg.scale_denominator)))
}

pub fn pair_names(city: &str, block_id: &str) -> (String, String) {
    (format!("{city}_{block_id}_A.png"), format!("{city}_{block_id}_B.png"))
}

struct Rendered {
    row: ManifestRow,
    a: Vec<u8>,
    b: Vec<u8>,
}

/// Renders one pair per included record into `out_dir`, then writes the
/// manifest. Rows are ordered by block id. On any write failure the files
/// written so far are removed.
pub fn build_dataset(
    scene: &CityScene,
    records: &[BlockRecord],
    cfg: &DatasetConfig,
    out_dir: &Path,
) -> Result<Manifest> {
    cfg.style.validate()?;
    let mut included: Vec<&BlockRecord> = records.iter().filter(|r| r.included).collect();
    included.sort_by(|a, b| a.block_id.cmp(&b.block_id));

    let rendered: Vec<Result<Rendered>> = included
        .par_iter()
        .map(|r| {
            let pair = render_pair(
                scene,
                &r.polygon,
                &r.block_id,
                cfg.scale_denominator,
                &cfg.spec,
                &cfg.style,
            )?;
            let (image_a, image_b) = pair_names(&scene.city, &r.block_id);
            Ok(Rendered {
                row: ManifestRow {
                    block_id: r.block_id.clone(),
                    image_a,
                    image_b,
                    block_pixel_fraction: pair.block_pixel_fraction,
                    over_proportion: pair.block_pixel_fraction > cfg.max_fraction,
                    occupancy: r.occupancy,
                    building_count: r.building_count,
                },
                a: encode_png(&pair.image_a),
                b: encode_png(&pair.image_b),
            })
        })
        .collect();
    let rendered: Vec<Rendered> = rendered.into_iter().collect::<Result<_>>()?;

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written: Vec<PathBuf> = Vec::new();
    let result = (|| {
        let mut pairs = Vec::with_capacity(rendered.len());
        for r in rendered {
            for (name, bytes) in [(&r.row.image_a, &r.a), (&r.row.image_b, &r.b)] {
                let p = out_dir.join(name);
                written.push(p.clone());
                write_bytes(&p, bytes)?;
            }
            if r.row.over_proportion {
                log::warn!(
                    "{}: block covers {:.1}% of the image",
                    r.row.block_id,
                    100.0 * r.row.block_pixel_fraction
                );
            }
            pairs.push(r.row);
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            city: scene.city.clone(),
            scale_denominator: cfg.scale_denominator,
            render_spec: cfg.spec,
            style: cfg.style,
            style_fingerprint: style_fingerprint(cfg),
            max_fraction: cfg.max_fraction,
            pairs,
        };
        let p = out_dir.join(MANIFEST_NAME);
        written.push(p.clone());
        write_bytes(&p, &to_json(&manifest))?;
        Ok(manifest)
    })();
    if result.is_err() {
        for p in &written {
            let _ = std::fs::remove_file(p);
        }
    }
    result
}
