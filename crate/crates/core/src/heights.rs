//! Height imputation and three-range classification.

use alloc::vec::Vec;

use crate::error::IngestError;
use crate::scene::{Building, CityScene, HeightClass, HeightStats, ParsedScene};

/// Quantiles of the known-height distribution that split the three ranges.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeightRanges {
    pub low_quantile: f64,
    pub high_quantile: f64,
}

impl Default for HeightRanges {
    fn default() -> Self {
        Self {
            low_quantile: 0.333,
            high_quantile: 0.667,
        }
    }
}

/// Linear-interpolation quantile of an ascending slice, `q` in [0, 1].
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// `Low` below the low threshold, `High` above the high one, `Medium`
/// otherwise. A degenerate distribution (equal thresholds at the only
/// height value) lands everything in `Medium`.
pub fn classify(height_m: f64, stats: &HeightStats) -> HeightClass {
    if height_m < stats.threshold_low_m {
        HeightClass::Low
    } else if height_m > stats.threshold_high_m {
        HeightClass::High
    } else {
        HeightClass::Medium
    }
}

pub fn height_stats(known: &[f64], ranges: &HeightRanges) -> Result<HeightStats, IngestError> {
    if known.is_empty() {
        return Err(IngestError::CannotImpute);
    }
    let mut sorted = known.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mean_m = sorted.iter().sum::<f64>() / sorted.len() as f64;
    let lo = quantile_sorted(&sorted, ranges.low_quantile);
    let hi = quantile_sorted(&sorted, ranges.high_quantile);
    Ok(HeightStats {
        mean_m,
        threshold_low_m: lo.min(hi),
        threshold_high_m: lo.max(hi),
        known_count: sorted.len(),
    })
}

/// Fills missing heights with the mean of the known ones and assigns every
/// building a [`HeightClass`].
pub fn impute_and_classify_heights(
    scene: ParsedScene,
    ranges: &HeightRanges,
) -> Result<CityScene, IngestError> {
    let known: Vec<f64> = scene.buildings.iter().filter_map(|b| b.height_m).collect();
    let stats = height_stats(&known, ranges)?;
    let buildings = scene
        .buildings
        .into_iter()
        .map(|mut feature| {
            let height_imputed = feature.height_m.is_none();
            let h = *feature.height_m.get_or_insert(stats.mean_m);
            Building {
                height_class: classify(h, &stats),
                feature,
                height_imputed,
            }
        })
        .collect();
    Ok(CityScene {
        city: scene.city,
        buildings,
        roads: scene.roads,
        railways: scene.railways,
        crs_note: scene.crs_note,
        origin: scene.origin,
        height_stats: stats,
    })
}
