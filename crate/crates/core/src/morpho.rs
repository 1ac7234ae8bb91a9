//! Building segmentation and per-block morphology metrics on diagram rasters.
//!
//! Distances are Euclidean between pixel centers, obtained from an exact
//! distance transform (lower envelope of parabolas, two separable passes).
//! Buildings are connected components of building-colored pixels inside
//! the block mask; 4-connectivity by default so that diagonally touching
//! buildings stay distinct and sit √2 apart.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::MetricsError;
use crate::raster::{BitMask, Raster, Rgb};
use crate::render::RenderStyle;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Connectivity {
    #[default]
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
            Connectivity::Eight => &[
                (1, 0),
                (-1, 0),
                (0, 1),
                (0, -1),
                (1, 1),
                (1, -1),
                (-1, 1),
                (-1, -1),
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct MetricConfig {
    pub grays: [Rgb; 3],
    /// Chebyshev distance per channel around each building gray.
    pub building_tolerance: u8,
    pub road: Rgb,
    pub road_tolerance: u8,
    pub mask: Rgb,
    pub min_area_px: usize,
    pub connectivity: Connectivity,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self::from_style(&RenderStyle::default())
    }
}

impl MetricConfig {
    pub fn from_style(style: &RenderStyle) -> Self {
        Self {
            grays: style.grays(),
            building_tolerance: 24,
            road: style.road,
            road_tolerance: 24,
            mask: style.mask,
            min_area_px: 4,
            connectivity: Connectivity::Four,
        }
    }

    pub fn is_building_color(&self, c: Rgb) -> bool {
        self.grays.iter().any(|g| g.chebyshev(c) <= self.building_tolerance)
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BuildingRegion {
    /// Row-major sorted pixel coordinates.
    pub pixels: Vec<(u32, u32)>,
    pub area_px: usize,
    pub centroid: (f64, f64),
}

impl BuildingRegion {
    pub fn from_pixels(mut pixels: Vec<(u32, u32)>) -> Self {
        pixels.sort_unstable_by_key(|&(x, y)| (y, x));
        let n = pixels.len().max(1) as f64;
        let (sx, sy) = pixels
            .iter()
            .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x as f64 + 0.5, sy + y as f64 + 0.5));
        Self {
            area_px: pixels.len(),
            centroid: (sx / n, sy / n),
            pixels,
        }
    }
}

/// Connected components of the set pixels, ordered by their first pixel
/// in row-major order.
pub fn label_components(mask: &BitMask, connectivity: Connectivity) -> Vec<Vec<(u32, u32)>> {
    let (w, h) = (mask.width() as i32, mask.height() as i32);
    let mut seen = BitMask::new(mask.width(), mask.height());
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for (x, y) in mask.ones() {
        if seen.get(x, y) {
            continue;
        }
        let mut comp = Vec::new();
        seen.set(x, y, true);
        queue.push_back((x, y));
        while let Some((cx, cy)) = queue.pop_front() {
            comp.push((cx, cy));
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (cx as i32 + dx, cy as i32 + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let (nx, ny) = (nx as u32, ny as u32);
                if mask.get(nx, ny) && !seen.get(nx, ny) {
                    seen.set(nx, ny, true);
                    queue.push_back((nx, ny));
                }
            }
        }
        out.push(comp);
    }
    out
}

fn check_size(raster: &Raster, mask: &BitMask) -> Result<(), MetricsError> {
    if raster.width() != mask.width() || raster.height() != mask.height() {
        return Err(MetricsError::MaskMismatch {
            mask_w: mask.width(),
            mask_h: mask.height(),
            img_w: raster.width(),
            img_h: raster.height(),
        });
    }
    Ok(())
}

pub fn building_pixels(raster: &Raster, block_mask: &BitMask, cfg: &MetricConfig) -> Result<BitMask, MetricsError> {
    check_size(raster, block_mask)?;
    Ok(BitMask::from_fn(raster.width(), raster.height(), |x, y| {
        block_mask.get(x, y) && cfg.is_building_color(raster.get(x, y))
    }))
}

pub fn segment_buildings(
    raster: &Raster,
    block_mask: &BitMask,
    cfg: &MetricConfig,
) -> Result<Vec<BuildingRegion>, MetricsError> {
    let px = building_pixels(raster, block_mask, cfg)?;
    Ok(label_components(&px, cfg.connectivity)
        .into_iter()
        .filter(|c| c.len() >= cfg.min_area_px.max(1))
        .map(BuildingRegion::from_pixels)
        .collect())
}

/// Pixels within `tolerance` of the road color, anywhere in the image.
pub fn street_mask(raster: &Raster, cfg: &MetricConfig) -> BitMask {
    BitMask::from_fn(raster.width(), raster.height(), |x, y| {
        raster.get(x, y).chebyshev(cfg.road) <= cfg.road_tolerance
    })
}

/// The designed block of an A-image: its mask-colored pixels.
pub fn mask_from_image_a(image_a: &Raster, mask_color: Rgb) -> BitMask {
    BitMask::from_fn(image_a.width(), image_a.height(), |x, y| image_a.get(x, y) == mask_color)
}

pub fn block_density(regions: &[BuildingRegion], block_mask: &BitMask) -> f64 {
    let mask_px = block_mask.count();
    if mask_px == 0 {
        return 0.0;
    }
    let built: usize = regions.iter().map(|r| r.area_px).sum();
    (built as f64 / mask_px as f64).clamp(0.0, 1.0)
}

/// Squared distance from every pixel center to the nearest set pixel
/// center; `f64::INFINITY` when the mask is empty. Values are exact
/// integers otherwise.
pub fn edt_squared(mask: &BitMask) -> Vec<f64> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let mut grid: Vec<f64> = mask
        .as_slice()
        .iter()
        .map(|&b| if b { 0.0 } else { f64::INFINITY })
        .collect();
    let n = w.max(h);
    let mut f = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut v = vec![0usize; n];
    let mut z = vec![0.0; n + 1];
    for x in 0..w {
        for y in 0..h {
            f[y] = grid[y * w + x];
        }
        lower_envelope(&f[..h], &mut d[..h], &mut v, &mut z);
        for y in 0..h {
            grid[y * w + x] = d[y];
        }
    }
    for y in 0..h {
        f[..w].copy_from_slice(&grid[y * w..(y + 1) * w]);
        lower_envelope(&f[..w], &mut d[..w], &mut v, &mut z);
        grid[y * w..(y + 1) * w].copy_from_slice(&d[..w]);
    }
    grid
}

/// One-dimensional squared distance transform of sampled function `f`
/// (infinite samples are skipped, so no sentinel arithmetic leaks in).
fn lower_envelope(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let fq = f[q] + (q * q) as f64;
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let p = v[k as usize];
            let s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k as usize] = q;
            z[k as usize] = s;
            z[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        d.iter_mut().for_each(|x| *x = f64::INFINITY);
        return;
    }
    let mut j = 0usize;
    for (q, out) in d.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let dq = q as f64 - p as f64;
        *out = dq * dq + f[p];
    }
}

/// Minimum distance from any building pixel to the nearest street pixel;
/// `None` without buildings or without streets.
pub fn street_distance(regions: &[BuildingRegion], street: &BitMask) -> Option<f64> {
    if regions.is_empty() || street.is_empty() {
        return None;
    }
    let dt = edt_squared(street);
    let w = street.width() as usize;
    let best = regions
        .iter()
        .flat_map(|r| r.pixels.iter())
        .map(|&(x, y)| dt[y as usize * w + x as usize])
        .fold(f64::INFINITY, f64::min);
    best.is_finite().then(|| libm::sqrt(best))
}

/// Mean over regions of the distance from the region to its nearest other
/// region; `None` with fewer than two regions.
pub fn adjacent_distance(regions: &[BuildingRegion]) -> Option<f64> {
    if regions.len() < 2 {
        return None;
    }
    // every distance of interest lies inside the regions' bounding box
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0u32, 0u32);
    for &(x, y) in regions.iter().flat_map(|r| r.pixels.iter()) {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
    let mut all = BitMask::new(w, h);
    for &(x, y) in regions.iter().flat_map(|r| r.pixels.iter()) {
        all.set(x - x0, y - y0, true);
    }
    let mut total = 0.0;
    for r in regions {
        let mut others = all.clone();
        for &(x, y) in &r.pixels {
            others.set(x - x0, y - y0, false);
        }
        let dt = edt_squared(&others);
        let best = r
            .pixels
            .iter()
            .map(|&(x, y)| dt[(y - y0) as usize * w as usize + (x - x0) as usize])
            .fold(f64::INFINITY, f64::min);
        total += libm::sqrt(best);
    }
    Some(total / regions.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlockMetrics {
    pub density: f64,
    pub areas_px: Vec<usize>,
    pub street_distance_px: Option<f64>,
    pub adjacent_distance_px: Option<f64>,
}

impl BlockMetrics {
    /// Average building footprint in the block; `None` when it is empty.
    pub fn mean_area_px(&self) -> Option<f64> {
        (!self.areas_px.is_empty())
            .then(|| self.areas_px.iter().sum::<usize>() as f64 / self.areas_px.len() as f64)
    }
}

pub fn measure_regions(regions: &[BuildingRegion], block_mask: &BitMask, street: &BitMask) -> BlockMetrics {
    BlockMetrics {
        density: block_density(regions, block_mask),
        areas_px: regions.iter().map(|r| r.area_px).collect(),
        street_distance_px: street_distance(regions, street),
        adjacent_distance_px: adjacent_distance(regions),
    }
}

/// All four metrics of one image given its block mask. The street mask is
/// taken from road-colored pixels of the same image.
pub fn measure_block(raster: &Raster, block_mask: &BitMask, cfg: &MetricConfig) -> Result<BlockMetrics, MetricsError> {
    let regions = segment_buildings(raster, block_mask, cfg)?;
    let street = street_mask(raster, cfg);
    Ok(measure_regions(&regions, block_mask, &street))
}
