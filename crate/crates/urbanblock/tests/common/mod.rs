#![allow(dead_code)]

use serde_json::{json, Value};

/// Street grid of 5 x 3 cells, 100 m apart, streets running 20 m past the
/// outer lines. Every cell gets a 3 x 3 array of 18 m houses (occupancy
/// 2916 / 9025 after the 5 m corridors) except:
/// cells 2 and 7 hold two houses (below 12%), 4 and 11 are industrial,
/// 13 is empty. Ten blocks pass the default filter.
pub const EXCLUDED_LOW: [usize; 2] = [2, 7];
pub const EXCLUDED_INDUSTRIAL: [usize; 2] = [4, 11];
pub const EXCLUDED_EMPTY: usize = 13;

fn square(x: f64, y: f64, s: f64) -> Value {
    json!([[[x, y], [x + s, y], [x + s, y + s], [x, y + s], [x, y]]])
}

pub fn city_features() -> Vec<Value> {
    let mut feats = Vec::new();
    for i in 0..=5 {
        let x = i as f64 * 100.0;
        let class = "residential";
        feats.push(json!({"type": "Feature", "properties": {"highway": class},
            "geometry": {"type": "LineString", "coordinates": [[x, -20.0], [x, 320.0]]}}));
    }
    for j in 0..=3 {
        let y = j as f64 * 100.0;
        feats.push(json!({"type": "Feature", "properties": {"highway": "residential"},
            "geometry": {"type": "LineString", "coordinates": [[-20.0, y], [520.0, y]]}}));
    }
    // a footpath never bounds a block
    feats.push(json!({"type": "Feature", "properties": {"highway": "footway"},
        "geometry": {"type": "LineString", "coordinates": [[50.0, 0.0], [50.0, 100.0]]}}));
    for cell in 0..15 {
        if cell == EXCLUDED_EMPTY {
            continue;
        }
        let (col, row) = (cell % 5, cell / 5);
        let (x0, y0) = (col as f64 * 100.0 + 8.0, row as f64 * 100.0 + 8.0);
        let landuse = if EXCLUDED_INDUSTRIAL.contains(&cell) { "industrial" } else { "residential" };
        let n = if EXCLUDED_LOW.contains(&cell) { 2 } else { 9 };
        for k in 0..n {
            let (kx, ky) = (k % 3, k / 3);
            let h = 6.0 + ((cell * 7 + k * 5) % 30) as f64;
            let mut props = json!({"building": landuse});
            // every fifth house lacks a height and gets the mean
            if k % 5 != 4 {
                props["height"] = json!(format!("{h} m"));
            }
            feats.push(json!({"type": "Feature", "properties": props,
                "geometry": {"type": "Polygon",
                    "coordinates": square(x0 + kx as f64 * 30.0, y0 + ky as f64 * 30.0, 18.0)}}));
        }
    }
    feats.push(json!({"type": "Feature", "properties": {"railway": "rail"},
        "geometry": {"type": "LineString", "coordinates": [[-20.0, 340.0], [520.0, 340.0]]}}));
    feats
}

pub fn city_geojson() -> String {
    serde_json::to_string(&json!({"type": "FeatureCollection", "features": city_features()})).unwrap()
}
