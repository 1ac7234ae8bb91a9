mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;

use urbanblock::cli::{
    run, BlocksArgs, Command, CompareArgs, CrossCityArgs, CrossCityManifest, DatasetArgs, IngestArgs, MetricsArgs,
    RerunArgs, RunLog, ValidateArgs,
};
use urbanblock::dataset::Manifest;
use urbanblock::formats::{read_json, BlocksFile};
use urbanblock::metrics_run::MetricsReport;
use urbanblock::report::CompareFile;
use urbanblock_core::blocks::ExclusionReason;

fn ok(cmd: Command) -> urbanblock::cli::Outcome {
    let (res, log) = run(&cmd, None);
    assert!(log.exists(), "run log {} missing", log.display());
    res.unwrap_or_else(|e| panic!("{cmd:?} failed: {e}"))
}

struct Built {
    _dir: tempfile::TempDir,
    root: PathBuf,
}

fn ingest_and_blocks(city: &str) -> Built {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    fs::write(root.join("city.geojson"), common::city_geojson()).unwrap();
    ok(Command::Ingest(IngestArgs {
        geojson: root.join("city.geojson"),
        mapping: None,
        city: city.into(),
        out: root.join("scene.json"),
    }));
    ok(Command::Blocks(BlocksArgs {
        scene: root.join("scene.json"),
        policy: None,
        min_occupancy: None,
        min_buildings: None,
        keep_industrial: false,
        config: None,
        out: root.join("blocks.json"),
        inventory: None,
    }));
    Built { _dir: dir, root }
}

fn dataset_cmd(root: &Path, out: &str) -> Command {
    Command::Dataset(DatasetArgs {
        scene: root.join("scene.json"),
        blocks: root.join("blocks.json"),
        scale: 3000,
        dpi: 300.0,
        style: None,
        max_fraction: 0.30,
        out: root.join(out),
    })
}

fn metrics_cmd(images: PathBuf, masks: Option<PathBuf>, out: PathBuf) -> Command {
    Command::Metrics(MetricsArgs {
        images,
        masks,
        city: None,
        source: None,
        tolerance: 24,
        min_area: 4,
        connectivity: 4,
        style: None,
        out,
    })
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.to_string_lossy().ends_with(".log.json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn end_to_end_pipeline() {
    let b = ingest_and_blocks("Milan");
    let root = &b.root;

    let blocks: BlocksFile = read_json(&root.join("blocks.json")).unwrap();
    assert_eq!(blocks.records.len(), 15);
    assert_eq!(blocks.included().count(), 10);
    let reasons: Vec<_> = blocks.records.iter().filter_map(|r| r.exclusion_reason).collect();
    assert_eq!(reasons.iter().filter(|r| **r == ExclusionReason::LowOccupancy).count(), 3);
    assert_eq!(reasons.iter().filter(|r| **r == ExclusionReason::IndustrialOnly).count(), 2);
    for r in blocks.included() {
        assert!((r.area_m2 - 95.0 * 95.0).abs() < 1e-6, "{} area {}", r.block_id, r.area_m2);
        assert!((r.occupancy - 2916.0 / 9025.0).abs() < 1e-9);
        assert_eq!(r.building_count, 9);
    }
    let csv = fs::read_to_string(root.join("blocks.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
    assert!(csv.starts_with("block_id,area_m2,occupancy"));

    ok(dataset_cmd(root, "ds"));
    let ds = root.join("ds");
    let manifest: Manifest = read_json(&ds.join("manifest.json")).unwrap();
    assert_eq!(manifest.pairs.len(), 10);
    assert!(manifest.pairs.iter().all(|p| !p.over_proportion));

    let first = &manifest.pairs[0];
    let v = ok(Command::Validate(ValidateArgs {
        image: ds.join(&first.image_a),
        max_fraction: 0.30,
        min_surroundings: 0.02,
        out: Some(root.join("validate.json")),
    }));
    assert!(v.summary.contains("\"status\": \"ok\""), "{}", v.summary);

    ok(metrics_cmd(ds.clone(), None, root.join("real.json")));
    let real: MetricsReport = read_json(&root.join("real.json")).unwrap();
    assert_eq!(real.city, "Milan");
    assert_eq!(real.rows.len(), 10);
    assert_eq!(real.summary.sample_count, 10);
    assert!(real.rows.iter().all(|r| r.metrics.areas_px.len() == 9), "{:?}", real.rows[0].metrics);

    // stand-in generator output: the real B-images under the generated naming
    let gen = root.join("gen");
    fs::create_dir_all(&gen).unwrap();
    for p in &manifest.pairs {
        fs::copy(ds.join(&p.image_b), gen.join(format!("{}_gen.png", p.block_id))).unwrap();
    }
    let mut gen_cmd = metrics_cmd(gen, Some(ds.clone()), root.join("gen.json"));
    if let Command::Metrics(a) = &mut gen_cmd {
        a.city = Some("milan".into());
    }
    ok(gen_cmd);
    let genr: MetricsReport = read_json(&root.join("gen.json")).unwrap();
    assert_eq!(genr.summary.median_density, real.summary.median_density);

    let out = ok(Command::Compare(CompareArgs {
        real: vec![root.join("real.json")],
        gen: vec![root.join("gen.json")],
        threshold: 0.35,
        out: Some(root.join("compare.json")),
    }));
    let cmp: CompareFile = read_json(&root.join("compare.json")).unwrap();
    assert!(cmp.reports[0].coherent);
    assert!(out.summary.contains("Median Density"));
    assert!(root.join("compare.txt").exists());

    ok(Command::CrosscityManifest(CrossCityArgs {
        cities: ["Milan", "Tallinn", "Amsterdam", "Bengaluru", "Turin"].map(String::from).to_vec(),
        datasets: root.join("datasets"),
        out: root.join("crosscity.json"),
    }));
    let cc: CrossCityManifest = read_json(&root.join("crosscity.json")).unwrap();
    assert_eq!(cc.tasks.len(), 25);
    let t = &cc.tasks[7];
    assert_eq!((t.task.row, t.task.col), (1, 2));
    assert_eq!(t.task.context_city, "Tallinn");
    assert_eq!(t.task.model_city, "Amsterdam");
    assert_eq!(t.output_dir, PathBuf::from("Amsterdam_in_Tallinn"));
}

#[test]
fn tallinn_policy_counts_buildings() {
    let b = ingest_and_blocks("Tallinn");
    let blocks: BlocksFile = read_json(&b.root.join("blocks.json")).unwrap();
    // nine houses meet "more than eight"
    assert_eq!(blocks.included().count(), 10);
    assert_eq!(blocks.policy.min_building_count, 9);
}

#[test]
fn rerun_reproduces_artifacts() {
    let b = ingest_and_blocks("Milan");
    let root = &b.root;
    let (res, log_path) = run(&dataset_cmd(root, "ds"), None);
    res.unwrap();
    let log: RunLog = read_json(&log_path).unwrap();
    assert_eq!(log.status, "ok");
    assert_eq!(log.artifacts.len(), 21);
    let before = dir_bytes(&root.join("ds"));
    fs::remove_dir_all(root.join("ds")).unwrap();
    ok(Command::Rerun(RerunArgs { from: log_path }));
    assert_eq!(dir_bytes(&root.join("ds")), before);
    for a in &log.artifacts {
        assert_eq!(urbanblock::dataset::sha256_hex(&fs::read(&a.path).unwrap()), a.sha256);
    }
}

#[test]
fn unreadable_image_is_named() {
    let b = ingest_and_blocks("Milan");
    let root = &b.root;
    ok(dataset_cmd(root, "ds"));
    let ds = root.join("ds");
    let manifest: Manifest = read_json(&ds.join("manifest.json")).unwrap();
    let victim = &manifest.pairs[3].image_b;
    fs::write(ds.join(victim), b"not a png").unwrap();
    let (res, log_path) = run(&metrics_cmd(ds, None, root.join("m.json")), None);
    let err = res.unwrap_err().to_string();
    assert!(err.contains(victim.as_str()), "{err}");
    let log: RunLog = read_json(&log_path).unwrap();
    assert_eq!(log.status, "error");
    assert!(log.message.unwrap().contains(victim.as_str()));
}

#[test]
fn missing_input_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nowhere.geojson");
    let (res, _) = run(
        &Command::Ingest(IngestArgs {
            geojson: missing.clone(),
            mapping: None,
            city: "Turin".into(),
            out: dir.path().join("s.json"),
        }),
        None,
    );
    assert!(res.unwrap_err().to_string().contains("nowhere.geojson"));
}

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_urbanblock"))
}

#[test]
fn binary_worker_count_does_not_change_output() {
    let b = ingest_and_blocks("Milan");
    let root = &b.root;
    let mut outs = Vec::new();
    for (workers, dir) in [("1", "w1"), ("3", "w3")] {
        let st = bin()
            .env("URBANBLOCK_WORKERS", workers)
            .args(["dataset", "--scene"])
            .arg(root.join("scene.json"))
            .arg("--blocks")
            .arg(root.join("blocks.json"))
            .arg("--out")
            .arg(root.join(dir))
            .output()
            .unwrap();
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        outs.push(dir_bytes(&root.join(dir)));
    }
    assert_eq!(outs[0], outs[1]);

    let bad = bin()
        .env("URBANBLOCK_WORKERS", "zero")
        .args(["crosscity-manifest", "--cities", "Milan,Turin", "--out"])
        .arg(root.join("cc.json"))
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("URBANBLOCK_WORKERS"));
}

#[test]
fn binary_rejects_duplicate_cities() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["crosscity-manifest", "--cities", "Milan,milan", "--out"])
        .arg(dir.path().join("cc.json"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    let log: RunLog = read_json(&dir.path().join("cc.json.log.json")).unwrap();
    assert_eq!(log.status, "error");
}

#[test]
fn binary_validate_warns_without_failing() {
    use urbanblock_core::{Raster, Rgb};
    let dir = tempfile::tempdir().unwrap();
    let mut img = Raster::new(256, 256, Rgb([0, 0, 0]));
    for y in 0..160 {
        for x in 0..160 {
            img.set(x, y, Rgb([255, 255, 255]));
        }
    }
    let p = dir.path().join("big_A.png");
    urbanblock::image_io::write_png(&p, &img).unwrap();
    let o = bin().args(["validate", "--image"]).arg(&p).output().unwrap();
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout);
    assert!(s.contains("\"status\": \"warn\"") && s.contains("block_too_large"), "{s}");
}
