//! City-level medians of block metrics and real-vs-generated comparison.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::MetricsError;
use crate::morpho::BlockMetrics;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Source {
    RealDataset,
    Generated,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricCounts {
    pub density: usize,
    pub building_area: usize,
    pub street_distance: usize,
    pub adjacent_distance: usize,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MorphoSummary {
    pub city: String,
    pub source: Source,
    pub median_density: Option<f64>,
    pub median_building_area_px: Option<f64>,
    pub median_street_distance_px: Option<f64>,
    pub median_adjacent_distance_px: Option<f64>,
    pub sample_count: usize,
    pub counts: MetricCounts,
}

/// Median with the lower element taken for even counts.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

/// Per-metric medians; samples lacking a metric are left out of that
/// metric only.
pub fn summarize(samples: &[BlockMetrics], city: &str, source: Source) -> Result<MorphoSummary, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let density: Vec<f64> = samples.iter().map(|s| s.density).collect();
    let area: Vec<f64> = samples.iter().filter_map(|s| s.mean_area_px()).collect();
    let street: Vec<f64> = samples.iter().filter_map(|s| s.street_distance_px).collect();
    let adjacent: Vec<f64> = samples.iter().filter_map(|s| s.adjacent_distance_px).collect();
    Ok(MorphoSummary {
        city: city.into(),
        source,
        median_density: lower_median(&density),
        median_building_area_px: lower_median(&area),
        median_street_distance_px: lower_median(&street),
        median_adjacent_distance_px: lower_median(&adjacent),
        sample_count: samples.len(),
        counts: MetricCounts {
            density: density.len(),
            building_area: area.len(),
            street_distance: street.len(),
            adjacent_distance: adjacent.len(),
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Metric {
    Density,
    BuildingArea,
    StreetDistance,
    AdjacentDistance,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::Density,
        Metric::BuildingArea,
        Metric::StreetDistance,
        Metric::AdjacentDistance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Density => "density",
            Metric::BuildingArea => "building_area_px",
            Metric::StreetDistance => "street_distance_px",
            Metric::AdjacentDistance => "adjacent_distance_px",
        }
    }

    /// Whether a coherence verdict is issued. Street offset is dictated by
    /// the input context, so it is only reported.
    pub fn has_verdict(self) -> bool {
        matches!(self, Metric::Density | Metric::BuildingArea)
    }

    pub fn of(self, s: &MorphoSummary) -> Option<f64> {
        match self {
            Metric::Density => s.median_density,
            Metric::BuildingArea => s.median_building_area_px,
            Metric::StreetDistance => s.median_street_distance_px,
            Metric::AdjacentDistance => s.median_adjacent_distance_px,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct CompareConfig {
    pub rel_threshold: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { rel_threshold: 0.35 }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricDelta {
    pub metric: Metric,
    pub real: Option<f64>,
    pub generated: Option<f64>,
    /// generated - real
    pub abs_delta: Option<f64>,
    /// abs_delta / |real|; absent when real is zero
    pub rel_delta: Option<f64>,
    pub coherent: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComparisonReport {
    pub city: String,
    pub rel_threshold: f64,
    pub rows: Vec<MetricDelta>,
    /// All verdict-bearing metrics coherent.
    pub coherent: bool,
}

impl ComparisonReport {
    pub fn row(&self, m: Metric) -> &MetricDelta {
        self.rows.iter().find(|r| r.metric == m).expect("all metrics present")
    }
}

fn delta(metric: Metric, real: Option<f64>, generated: Option<f64>, threshold: f64) -> MetricDelta {
    let abs_delta = real.zip(generated).map(|(r, g)| g - r);
    let rel_delta = real.zip(abs_delta).and_then(|(r, d)| {
        if r == 0.0 {
            (d == 0.0).then_some(0.0)
        } else {
            Some(d / libm::fabs(r))
        }
    });
    // a metric missing on both sides carries no evidence either way
    let coherent = if metric.has_verdict() && (real.is_some() || generated.is_some()) {
        Some(rel_delta.is_some_and(|d| libm::fabs(d) <= threshold))
    } else {
        None
    };
    MetricDelta {
        metric,
        real,
        generated,
        abs_delta,
        rel_delta,
        coherent,
    }
}

pub fn compare(real: &MorphoSummary, generated: &MorphoSummary, cfg: &CompareConfig) -> Result<ComparisonReport, MetricsError> {
    if !real.city.eq_ignore_ascii_case(&generated.city) {
        return Err(MetricsError::CityMismatch {
            real: real.city.clone(),
            generated: generated.city.clone(),
        });
    }
    let rows: Vec<MetricDelta> = Metric::ALL
        .iter()
        .map(|&m| delta(m, m.of(real), m.of(generated), cfg.rel_threshold))
        .collect();
    let coherent = rows.iter().all(|r| r.coherent != Some(false));
    Ok(ComparisonReport {
        city: real.city.clone(),
        rel_threshold: cfg.rel_threshold,
        rows,
        coherent,
    })
}
