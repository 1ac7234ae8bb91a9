//! Subcommands, their execution, and replayable run logs.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use urbanblock_core::blocks::{apply_filter, assign_and_measure, extract_blocks, BlockConfig, FilterPolicy};
use urbanblock_core::heights::{impute_and_classify_heights, HeightRanges};
use urbanblock_core::ingest::{parse_features, TagMapping};
use urbanblock_core::morpho::{Connectivity, MetricConfig};
use urbanblock_core::render::RenderStyle;
use urbanblock_core::summary::{compare, CompareConfig, Source};
use urbanblock_core::validate::{crosscity_grid, validate_proportion, CrossCityTask, ProportionConfig};
use urbanblock_core::City;

use crate::dataset::{build_dataset, sha256_hex, DatasetConfig, MANIFEST_NAME};
use crate::error::{Error, Result};
use crate::formats::{
    inventory_csv, read_json, read_toml, read_versioned, to_json, write_bytes, write_json, BlocksFile, SceneFile,
    SCHEMA_VERSION,
};
use crate::geo_io::read_geojson;
use crate::image_io::read_png;
use crate::metrics_run::{measure_directory, MetricsReport};
use crate::report::{render_tables, CompareFile};

#[derive(Debug, Parser)]
#[command(name = "urbanblock", version, about = "Urban block diagram datasets and morphology metrics")]
pub struct Cli {
    /// Where to write the run log (default: next to the primary output).
    #[arg(long, global = true)]
    pub log: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// GeoJSON extract to a normalized scene.
    Ingest(IngestArgs),
    /// Blocks, occupancy and inclusion verdicts for a scene.
    Blocks(BlocksArgs),
    /// A/B image pairs for the included blocks.
    Dataset(DatasetArgs),
    /// Block proportion and surroundings check of an A-image.
    Validate(ValidateArgs),
    /// Morphology metrics over a directory of images.
    Metrics(MetricsArgs),
    /// Real versus generated metric summaries.
    Compare(CompareArgs),
    /// Task grid of models by urban contexts.
    CrosscityManifest(CrossCityArgs),
    /// Re-executes the command recorded in a run log.
    Rerun(RerunArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct IngestArgs {
    #[arg(long)]
    pub geojson: PathBuf,
    /// TOML tag mapping; defaults to the city's built-in vocabulary.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    #[arg(long)]
    pub city: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    Milan,
    Tallinn,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct BlocksArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// Defaults to the policy of the scene's city.
    #[arg(long, value_enum)]
    pub policy: Option<PolicyChoice>,
    #[arg(long)]
    pub min_occupancy: Option<f64>,
    #[arg(long)]
    pub min_buildings: Option<usize>,
    #[arg(long)]
    pub keep_industrial: bool,
    /// TOML block extraction settings (widths, minimum area, snapping).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// CSV inventory path (default: `<out>` with a .csv extension).
    #[arg(long)]
    pub inventory: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct DatasetArgs {
    #[arg(long)]
    pub scene: PathBuf,
    #[arg(long)]
    pub blocks: PathBuf,
    #[arg(long, default_value_t = 3000)]
    pub scale: u32,
    #[arg(long, default_value_t = 300.0)]
    pub dpi: f64,
    /// TOML render style.
    #[arg(long)]
    pub style: Option<PathBuf>,
    #[arg(long, default_value_t = 0.30)]
    pub max_fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 0.30)]
    pub max_fraction: f64,
    #[arg(long, default_value_t = 0.02)]
    pub min_surroundings: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceChoice {
    Real,
    Generated,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct MetricsArgs {
    #[arg(long)]
    pub images: PathBuf,
    /// Directory with `{key}_mask.png` or `{key}_A.png` files.
    #[arg(long)]
    pub masks: Option<PathBuf>,
    #[arg(long)]
    pub city: Option<String>,
    #[arg(long, value_enum)]
    pub source: Option<SourceChoice>,
    /// Per-channel color tolerance for building and road pixels.
    #[arg(long, default_value_t = 24)]
    pub tolerance: u8,
    #[arg(long, default_value_t = 4)]
    pub min_area: usize,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(4..=8))]
    pub connectivity: u8,
    /// TOML render style, when the images use a non-default palette.
    #[arg(long)]
    pub style: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    /// Metrics reports of real datasets, paired in order with --gen.
    #[arg(long, required = true, num_args = 1..)]
    pub real: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub gen: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.35)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CrossCityArgs {
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub cities: Vec<String>,
    /// Root holding one dataset directory per city.
    #[arg(long, default_value = "datasets")]
    pub datasets: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct RerunArgs {
    #[arg(long = "from")]
    pub from: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub schema_version: u32,
    pub tool_version: String,
    /// Hash of the command with all of its settings.
    pub config_fingerprint: String,
    pub command: Command,
    pub status: String,
    pub message: Option<String>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCityManifest {
    pub schema_version: u32,
    /// Row order: urban contexts. Column order: trained models.
    pub cities: Vec<String>,
    pub tasks: Vec<CrossCityEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCityEntry {
    #[serde(flatten)]
    pub task: CrossCityTask,
    /// Dataset whose A-images provide the context.
    pub context_manifest: PathBuf,
    /// Where the trained model's outputs for this cell go.
    pub output_dir: PathBuf,
}

/// Result of one command: files written and a human-readable summary.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

pub fn config_fingerprint(cmd: &Command) -> String {
    sha256_hex(&to_json(cmd))
}

/// Run log location: explicit, else `<primary output>.log.json`, else the
/// working directory.
pub fn default_log_path(cmd: &Command) -> PathBuf {
    let out = match cmd {
        Command::Ingest(a) => Some(&a.out),
        Command::Blocks(a) => Some(&a.out),
        Command::Dataset(a) => Some(&a.out),
        Command::Validate(a) => a.out.as_ref(),
        Command::Metrics(a) => Some(&a.out),
        Command::Compare(a) => a.out.as_ref(),
        Command::CrosscityManifest(a) => Some(&a.out),
        Command::Rerun(a) => Some(&a.from),
    };
    match out {
        Some(p) => {
            let mut s = p.clone().into_os_string();
            s.push(".log.json");
            PathBuf::from(s)
        }
        None => PathBuf::from("urbanblock-run.log.json"),
    }
}

fn city_of(name: &str) -> Option<City> {
    name.parse().ok()
}

fn ingest(a: &IngestArgs) -> Result<Outcome> {
    let features = read_geojson(&a.geojson)?;
    let mapping = match &a.mapping {
        Some(p) => read_toml::<TagMapping>(p)?,
        None => TagMapping::for_city(&a.city),
    };
    let city = city_of(&a.city).map_or_else(|| a.city.clone(), |c| c.name().to_string());
    let (parsed, report) = parse_features(&city, &features, &mapping)?;
    for e in &report.errors {
        log::warn!("feature {}: {:?}", e.index, e.kind);
    }
    let scene = impute_and_classify_heights(parsed, &HeightRanges::default())?;
    let summary = format!(
        "{}: {} buildings ({} skipped, {} heights imputed), {} roads, {} railways",
        scene.city,
        report.buildings_out,
        report.buildings_skipped,
        report.missing_heights,
        report.roads_out,
        report.railways_out
    );
    write_json(
        &a.out,
        &SceneFile {
            schema_version: SCHEMA_VERSION,
            scene,
            ingest: report,
        },
    )?;
    Ok(Outcome {
        artifacts: vec![a.out.clone()],
        summary,
    })
}

fn resolve_policy(a: &BlocksArgs, city: &str) -> FilterPolicy {
    let mut p = match a.policy {
        Some(PolicyChoice::Milan) | Some(PolicyChoice::Custom) => FilterPolicy::MILAN,
        Some(PolicyChoice::Tallinn) => FilterPolicy::TALLINN,
        None => city_of(city).map_or(FilterPolicy::MILAN, FilterPolicy::for_city),
    };
    if let Some(v) = a.min_occupancy {
        p.min_occupancy = v;
    }
    if let Some(v) = a.min_buildings {
        p.min_building_count = v;
    }
    if a.keep_industrial {
        p.exclude_industrial_only = false;
    }
    p
}

fn blocks(a: &BlocksArgs) -> Result<Outcome> {
    let scene: SceneFile = read_versioned(&a.scene)?;
    let scene = scene.scene;
    let cfg = match &a.config {
        Some(p) => read_toml::<BlockConfig>(p)?,
        None => BlockConfig::default(),
    };
    let policy = resolve_policy(a, &scene.city);
    let extraction = extract_blocks(&scene, &cfg);
    if let Some(w) = extraction.warning {
        log::warn!("{}: {:?}", scene.city, w);
    }
    let assignment = assign_and_measure(&extraction.blocks, &scene);
    let records = apply_filter(assignment.records, &policy);
    let included = records.iter().filter(|r| r.included).count();
    let file = BlocksFile {
        schema_version: SCHEMA_VERSION,
        city: scene.city.clone(),
        policy,
        config: cfg,
        warning: extraction.warning,
        discarded_small: extraction.discarded_small,
        spillover: assignment.spillover,
        records,
    };
    let inventory = a.inventory.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    write_json(&a.out, &file)?;
    write_bytes(&inventory, &inventory_csv(&file.records))?;
    Ok(Outcome {
        artifacts: vec![a.out.clone(), inventory],
        summary: format!("{}: {} blocks, {} included", file.city, file.records.len(), included),
    })
}

fn dataset(a: &DatasetArgs) -> Result<Outcome> {
    let scene: SceneFile = read_versioned(&a.scene)?;
    let blocks: BlocksFile = read_versioned(&a.blocks)?;
    if !blocks.city.eq_ignore_ascii_case(&scene.scene.city) {
        return Err(Error::Config(format!(
            "blocks are for {}, scene is {}",
            blocks.city, scene.scene.city
        )));
    }
    let style = match &a.style {
        Some(p) => read_toml::<RenderStyle>(p)?,
        None => RenderStyle::default(),
    };
    let mut cfg = DatasetConfig {
        scale_denominator: a.scale,
        style,
        max_fraction: a.max_fraction,
        ..DatasetConfig::default()
    };
    cfg.spec.dpi = a.dpi;
    let manifest = build_dataset(&scene.scene, &blocks.records, &cfg, &a.out)?;
    let mut artifacts = Vec::new();
    for r in &manifest.pairs {
        artifacts.push(a.out.join(&r.image_a));
        artifacts.push(a.out.join(&r.image_b));
    }
    artifacts.push(a.out.join(MANIFEST_NAME));
    let flagged = manifest.pairs.iter().filter(|r| r.over_proportion).count();
    Ok(Outcome {
        artifacts,
        summary: format!(
            "{}: {} pairs written to {} ({} over proportion)",
            manifest.city,
            manifest.pairs.len(),
            a.out.display(),
            flagged
        ),
    })
}

#[derive(Serialize)]
struct ValidateDoc<'a> {
    schema_version: u32,
    image: &'a Path,
    status: &'static str,
    #[serde(flatten)]
    check: &'a urbanblock_core::validate::ProportionCheck,
}

fn validate(a: &ValidateArgs) -> Result<Outcome> {
    let img = read_png(&a.image)?;
    let cfg = ProportionConfig {
        max_fraction: a.max_fraction,
        min_surroundings: a.min_surroundings,
        ..ProportionConfig::default()
    };
    let check = validate_proportion(&img, &cfg).map_err(|e| Error::format(&a.image, e.to_string()))?;
    let status = if check.is_ok() { "ok" } else { "warn" };
    let doc = ValidateDoc {
        schema_version: SCHEMA_VERSION,
        image: &a.image,
        status,
        check: &check,
    };
    let mut artifacts = Vec::new();
    if let Some(out) = &a.out {
        write_json(out, &doc)?;
        artifacts.push(out.clone());
    }
    let summary = String::from_utf8(to_json(&doc)).expect("utf8 json");
    Ok(Outcome { artifacts, summary })
}

fn metrics(a: &MetricsArgs) -> Result<Outcome> {
    let style = match &a.style {
        Some(p) => read_toml::<RenderStyle>(p)?,
        None => RenderStyle::default(),
    };
    if a.connectivity != 4 && a.connectivity != 8 {
        return Err(Error::Config(format!("connectivity must be 4 or 8, got {}", a.connectivity)));
    }
    let cfg = MetricConfig {
        building_tolerance: a.tolerance,
        road_tolerance: a.tolerance,
        min_area_px: a.min_area,
        connectivity: if a.connectivity == 8 { Connectivity::Eight } else { Connectivity::Four },
        ..MetricConfig::from_style(&style)
    };
    let source = a.source.map(|s| match s {
        SourceChoice::Real => Source::RealDataset,
        SourceChoice::Generated => Source::Generated,
    });
    let report = measure_directory(&a.images, a.masks.as_deref(), a.city.as_deref(), source, &cfg)?;
    write_json(&a.out, &report)?;
    let s = &report.summary;
    Ok(Outcome {
        artifacts: vec![a.out.clone()],
        summary: format!(
            "{} ({:?}, {} images): density {:?}, area {:?} px, street {:?} px, adjacent {:?} px",
            s.city,
            s.source,
            s.sample_count,
            s.median_density,
            s.median_building_area_px,
            s.median_street_distance_px,
            s.median_adjacent_distance_px
        ),
    })
}

fn compare_cmd(a: &CompareArgs) -> Result<Outcome> {
    if a.real.len() != a.gen.len() {
        return Err(Error::Config(format!(
            "{} real reports but {} generated ones",
            a.real.len(),
            a.gen.len()
        )));
    }
    let cfg = CompareConfig {
        rel_threshold: a.threshold,
    };
    let mut reports = Vec::new();
    for (r, g) in a.real.iter().zip(&a.gen) {
        let real: MetricsReport = read_versioned(r)?;
        let gen: MetricsReport = read_versioned(g)?;
        reports.push(compare(&real.summary, &gen.summary, &cfg)?);
    }
    let mut artifacts = Vec::new();
    let tables = render_tables(&reports);
    if let Some(out) = &a.out {
        write_json(
            out,
            &CompareFile {
                schema_version: SCHEMA_VERSION,
                reports,
            },
        )?;
        let txt = out.with_extension("txt");
        write_bytes(&txt, tables.as_bytes())?;
        artifacts.extend([out.clone(), txt]);
    }
    Ok(Outcome {
        artifacts,
        summary: tables,
    })
}

fn crosscity(a: &CrossCityArgs) -> Result<Outcome> {
    let cities: Vec<String> = a
        .cities
        .iter()
        .map(|c| city_of(c).map_or_else(|| c.trim().to_string(), |c| c.name().to_string()))
        .collect();
    let tasks = crosscity_grid(&cities)?
        .into_iter()
        .map(|task| CrossCityEntry {
            context_manifest: a.datasets.join(&task.context_city).join(MANIFEST_NAME),
            output_dir: PathBuf::from(format!("{}_in_{}", task.model_city, task.context_city)),
            task,
        })
        .collect::<Vec<_>>();
    let n = tasks.len();
    write_json(
        &a.out,
        &CrossCityManifest {
            schema_version: SCHEMA_VERSION,
            cities,
            tasks,
        },
    )?;
    Ok(Outcome {
        artifacts: vec![a.out.clone()],
        summary: format!("{n} cross-city tasks"),
    })
}

/// Executes one command without writing a run log.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Ingest(a) => ingest(a),
        Command::Blocks(a) => blocks(a),
        Command::Dataset(a) => dataset(a),
        Command::Validate(a) => validate(a),
        Command::Metrics(a) => metrics(a),
        Command::Compare(a) => compare_cmd(a),
        Command::CrosscityManifest(a) => crosscity(a),
        Command::Rerun(a) => {
            let log: RunLog = read_json(&a.from)?;
            if log.schema_version != SCHEMA_VERSION {
                return Err(Error::Schema {
                    path: a.from.clone(),
                    found: log.schema_version,
                    expected: SCHEMA_VERSION,
                });
            }
            if matches!(log.command, Command::Rerun(_)) {
                return Err(Error::Config("a rerun log cannot be replayed".into()));
            }
            execute(&log.command)
        }
    }
}

/// Executes `cmd` and records the run log at `log_path`; the log is
/// written whether or not the command succeeds.
pub fn run(cmd: &Command, log_path: Option<&Path>) -> (Result<Outcome>, PathBuf) {
    let result = execute(cmd);
    let log_path = log_path.map_or_else(|| default_log_path(cmd), Path::to_path_buf);
    let (status, message, artifacts) = match &result {
        Ok(o) => {
            let arts = o
                .artifacts
                .iter()
                .map(|p| Artifact {
                    path: p.clone(),
                    sha256: std::fs::read(p).map(|b| sha256_hex(&b)).unwrap_or_default(),
                })
                .collect();
            ("ok", None, arts)
        }
        Err(e) => ("error", Some(e.to_string()), Vec::new()),
    };
    let log = RunLog {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_fingerprint: config_fingerprint(cmd),
        command: cmd.clone(),
        status: status.to_string(),
        message,
        artifacts,
    };
    let result = match (result, write_json(&log_path, &log)) {
        (Ok(_), Err(e)) => Err(e),
        (r, _) => r,
    };
    (result, log_path)
}
