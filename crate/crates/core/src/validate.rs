//! Input checks for A-images and the cross-city experiment grid.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::ValidateError;
use crate::raster::{Raster, Rgb};

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ProportionConfig {
    /// Warn when the masked block covers more than this share of the image.
    pub max_fraction: f64,
    /// Warn when non-mask, non-background pixels cover less than this share.
    pub min_surroundings: f64,
    pub mask: Rgb,
    pub background: Rgb,
}

impl Default for ProportionConfig {
    fn default() -> Self {
        Self {
            max_fraction: 0.30,
            min_surroundings: 0.02,
            mask: Rgb::WHITE,
            background: Rgb::BLACK,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ProportionWarning {
    BlockTooLarge,
    EmptySurroundings,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProportionCheck {
    pub mask_fraction: f64,
    pub surroundings_fraction: f64,
    pub warnings: Vec<ProportionWarning>,
}

impl ProportionCheck {
    pub fn is_ok(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn validate_proportion(image_a: &Raster, cfg: &ProportionConfig) -> Result<ProportionCheck, ValidateError> {
    let total = (image_a.width() as usize * image_a.height() as usize).max(1) as f64;
    let (mut mask, mut context) = (0usize, 0usize);
    for c in image_a.pixels() {
        if c == cfg.mask {
            mask += 1;
        } else if c != cfg.background {
            context += 1;
        }
    }
    if mask == 0 {
        return Err(ValidateError::NoBlock);
    }
    let check = |frac: f64, limit: f64| frac > limit;
    let mask_fraction = mask as f64 / total;
    let surroundings_fraction = context as f64 / total;
    let mut warnings = Vec::new();
    if check(mask_fraction, cfg.max_fraction) {
        warnings.push(ProportionWarning::BlockTooLarge);
    }
    if surroundings_fraction < cfg.min_surroundings {
        warnings.push(ProportionWarning::EmptySurroundings);
    }
    Ok(ProportionCheck {
        mask_fraction,
        surroundings_fraction,
        warnings,
    })
}

/// One cell of the style-translation grid: a model trained on
/// `model_city` asked to design blocks inside `context_city`.
#[derive(Clone, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossCityTask {
    pub row: usize,
    pub col: usize,
    pub context_city: String,
    pub model_city: String,
}

/// Row-major grid: rows are contexts, columns are trained models.
pub fn crosscity_grid(cities: &[String]) -> Result<Vec<CrossCityTask>, ValidateError> {
    if cities.is_empty() {
        return Err(ValidateError::NoCities);
    }
    for (i, c) in cities.iter().enumerate() {
        if cities[..i].iter().any(|o| o.eq_ignore_ascii_case(c)) {
            return Err(ValidateError::DuplicateCity(c.clone()));
        }
    }
    let mut out = Vec::with_capacity(cities.len() * cities.len());
    for (row, ctx) in cities.iter().enumerate() {
        for (col, model) in cities.iter().enumerate() {
            out.push(CrossCityTask {
                row,
                col,
                context_city: ctx.clone(),
                model_city: model.clone(),
            });
        }
    }
    Ok(out)
}
