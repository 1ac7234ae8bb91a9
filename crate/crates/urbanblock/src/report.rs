//! Comparison documents and their text tables.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use urbanblock_core::summary::{ComparisonReport, Metric};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareFile {
    pub schema_version: u32,
    pub reports: Vec<ComparisonReport>,
}

fn cell(v: Option<f64>, decimals: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.decimals$}"))
}

fn table(out: &mut String, title: &str, header: &[&str], rows: &[Vec<String>]) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "| {} |", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for r in rows {
        let _ = writeln!(out, "| {} |", r.join(" | "));
    }
    out.push('\n');
}

/// Block metrics, street distance and adjacent distance tables, one row
/// per city, then the deltas with their verdicts.
pub fn render_tables(reports: &[ComparisonReport]) -> String {
    let mut out = String::new();
    let pick = |r: &ComparisonReport, m: Metric, d: usize| {
        let row = r.row(m);
        [cell(row.real, d), cell(row.generated, d)]
    };
    let block_rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let mut v = vec![r.city.clone()];
            v.extend(pick(r, Metric::Density, 3));
            v.extend(pick(r, Metric::BuildingArea, 0));
            v
        })
        .collect();
    table(
        &mut out,
        "Block metrics",
        &[
            "City",
            "City Dataset: Median Density",
            "Generated Blocks: Median Density",
            "City Dataset: Median Building Area, px",
            "Generated Blocks: Median Building Area, px",
        ],
        &block_rows,
    );
    let two = |m: Metric, d: usize| -> Vec<Vec<String>> {
        reports
            .iter()
            .map(|r| {
                let mut v = vec![r.city.clone()];
                v.extend(pick(r, m, d));
                v
            })
            .collect()
    };
    table(
        &mut out,
        "Distance from the street",
        &[
            "City",
            "City Dataset: Median Distance Between the Buildings and the Street, px",
            "Generated Blocks: Median Distance Between the Buildings and the Street, px",
        ],
        &two(Metric::StreetDistance, 3),
    );
    table(
        &mut out,
        "Distance between adjacent buildings",
        &[
            "City",
            "City Dataset: Median Distance Between the Adjacent Buildings",
            "Generated Blocks: Median Distance Between the Adjacent Buildings",
        ],
        &two(Metric::AdjacentDistance, 3),
    );
    let mut delta_rows = Vec::new();
    for r in reports {
        for row in &r.rows {
            delta_rows.push(vec![
                r.city.clone(),
                row.metric.as_str().to_string(),
                cell(row.abs_delta, 3),
                row.rel_delta.map_or("-".into(), |d| format!("{:+.1}%", 100.0 * d)),
                match row.coherent {
                    Some(true) => "coherent".into(),
                    Some(false) => "not coherent".into(),
                    None => "-".into(),
                },
            ]);
        }
    }
    let threshold = reports.first().map_or(0.35, |r| r.rel_threshold);
    table(
        &mut out,
        &format!("Deltas (generated - dataset), coherence threshold {:.0}%", 100.0 * threshold),
        &["City", "Metric", "Delta", "Relative", "Verdict"],
        &delta_rows,
    );
    out
}
