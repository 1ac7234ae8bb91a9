//! RGB rasters, binary masks, pixel-center scanline fill and area-average
//! downsampling.
//!
//! Pixel `(col, row)` covers `[col, col + 1) x [row, row + 1)` in pixel
//! coordinates; its center is `(col + 0.5, row + 0.5)`. Fills are
//! even-odd over all rings and paint exactly the pixels whose centers are
//! inside, with no anti-aliasing.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::RasterError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const BLACK: Rgb = Rgb([0, 0, 0]);
    pub const WHITE: Rgb = Rgb([255, 255, 255]);

    pub const fn gray(v: u8) -> Rgb {
        Rgb([v, v, v])
    }

    /// Largest per-channel difference.
    pub fn chebyshev(self, o: Rgb) -> u8 {
        (0..3)
            .map(|k| self.0[k].abs_diff(o.0[k]))
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Raster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            data.extend_from_slice(&fill.0);
        }
        Self { width, height, data }
    }

    /// Wraps packed row-major RGB bytes.
    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Option<Self> {
        (data.len() == width as usize * height as usize * 3).then_some(Self { width, height, data })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    fn idx(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * 3
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = self.idx(x, y);
        Rgb([self.data[i], self.data[i + 1], self.data[i + 2]])
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = self.idx(x, y);
        self.data[i..i + 3].copy_from_slice(&c.0);
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data.chunks_exact(3).map(|c| Rgb([c[0], c[1], c[2]]))
    }

    pub fn fill_spans(&mut self, spans: &[Span], c: Rgb) {
        for s in spans {
            for x in s.x0..s.x1 {
                self.set(x, s.row, c);
            }
        }
    }
}

/// Row-major boolean mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BitMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y, true);
                }
            }
        }
        m
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        let w = self.width as usize;
        self.bits[y as usize * w + x as usize] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }

    pub fn fill_spans(&mut self, spans: &[Span]) {
        for s in spans {
            for x in s.x0..s.x1 {
                self.set(x, s.row, true);
            }
        }
    }

    /// Coordinates of set pixels in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i as u32 % w, i as u32 / w))
    }
}

/// Half-open run of columns `[x0, x1)` on one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub row: u32,
    pub x0: u32,
    pub x1: u32,
}

/// Spans of pixels whose centers lie inside the rings (even-odd rule).
/// Ring coordinates are in pixel units; rings are implicitly closed.
pub fn scan_rings(width: u32, height: u32, rings: &[Vec<(f64, f64)>]) -> Vec<Span> {
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for r in rings {
        for &(_, y) in r {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    let mut spans = Vec::new();
    if !(ymin <= ymax) || height == 0 || width == 0 {
        return spans;
    }
    let row0 = libm::ceil(ymin - 0.5).max(0.0) as i64;
    let row1 = (libm::ceil(ymax - 0.5) as i64).min(height as i64);
    let mut xs: Vec<f64> = Vec::new();
    for row in row0..row1 {
        let yc = row as f64 + 0.5;
        xs.clear();
        for ring in rings {
            let n = ring.len();
            for i in 0..n {
                let (x0, y0) = ring[i];
                let (x1, y1) = ring[(i + 1) % n];
                if (y0 <= yc && yc < y1) || (y1 <= yc && yc < y0) {
                    xs.push(x0 + (yc - y0) * (x1 - x0) / (y1 - y0));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        for pair in xs.chunks_exact(2) {
            let c0 = libm::ceil(pair[0] - 0.5).max(0.0);
            let c1 = libm::ceil(pair[1] - 0.5).min(width as f64);
            if c1 > c0 {
                spans.push(Span {
                    row: row as u32,
                    x0: c0 as u32,
                    x1: c1 as u32,
                });
            }
        }
    }
    spans
}

/// Spans of pixels whose centers lie within `r` of `(cx, cy)`.
pub fn scan_disc(width: u32, height: u32, cx: f64, cy: f64, r: f64) -> Vec<Span> {
    let mut spans = Vec::new();
    if r <= 0.0 {
        return spans;
    }
    let row0 = libm::ceil(cy - r - 0.5).max(0.0) as i64;
    let row1 = (libm::floor(cy + r - 0.5) as i64).min(height as i64 - 1);
    for row in row0..=row1 {
        let dy = row as f64 + 0.5 - cy;
        let h2 = r * r - dy * dy;
        if h2 < 0.0 {
            continue;
        }
        let h = libm::sqrt(h2);
        let c0 = libm::ceil(cx - h - 0.5).max(0.0);
        let c1 = (libm::floor(cx + h - 0.5) + 1.0).min(width as f64);
        if c1 > c0 {
            spans.push(Span {
                row: row as u32,
                x0: c0 as u32,
                x1: c1 as u32,
            });
        }
    }
    spans
}

/// Input pixels overlapping each output pixel with normalized weights.
fn box_weights(input: u32, output: u32) -> Vec<Vec<(usize, f64)>> {
    let s = input as f64 / output as f64;
    (0..output)
        .map(|i| {
            let lo = i as f64 * s;
            let hi = (i + 1) as f64 * s;
            let first = libm::floor(lo) as usize;
            let last = (libm::ceil(hi) as usize).min(input as usize);
            (first..last)
                .filter_map(|k| {
                    let ov = (hi.min(k as f64 + 1.0) - lo.max(k as f64)).max(0.0);
                    (ov > 0.0).then_some((k, ov / s))
                })
                .collect()
        })
        .collect()
}

/// Exact area-average reduction to `out_w x out_h`.
pub fn downsample_area(src: &Raster, out_w: u32, out_h: u32) -> Raster {
    let wx = box_weights(src.width, out_w);
    let wy = box_weights(src.height, out_h);
    let (iw, ih) = (src.width as usize, src.height as usize);
    // horizontal pass: ih rows of out_w
    let mut tmp = vec![0.0f64; ih * out_w as usize * 3];
    for y in 0..ih {
        let row = &src.data[y * iw * 3..(y + 1) * iw * 3];
        for (ox, ws) in wx.iter().enumerate() {
            let mut acc = [0.0; 3];
            for &(k, w) in ws {
                for c in 0..3 {
                    acc[c] += w * row[k * 3 + c] as f64;
                }
            }
            let o = (y * out_w as usize + ox) * 3;
            tmp[o..o + 3].copy_from_slice(&acc);
        }
    }
    let mut out = Raster::new(out_w, out_h, Rgb::BLACK);
    for (oy, ws) in wy.iter().enumerate() {
        for ox in 0..out_w as usize {
            let mut acc = [0.0; 3];
            for &(k, w) in ws {
                let o = (k * out_w as usize + ox) * 3;
                for c in 0..3 {
                    acc[c] += w * tmp[o + c];
                }
            }
            let px = Rgb(acc.map(|v| libm::round(v).clamp(0.0, 255.0) as u8));
            out.set(ox as u32, oy as u32, px);
        }
    }
    out
}

pub const RENDER_PX: u32 = 2100;
pub const OUTPUT_PX: u32 = 256;

/// The fixed 2100² to 256² reduction applied to every rendered window.
pub fn downsample(src: &Raster) -> Result<Raster, RasterError> {
    if src.width != RENDER_PX || src.height != RENDER_PX {
        return Err(RasterError::WrongSize {
            expected: RENDER_PX,
            width: src.width,
            height: src.height,
        });
    }
    Ok(downsample_area(src, OUTPUT_PX, OUTPUT_PX))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(spans: &[Span]) -> u32 {
        spans.iter().map(|s| s.x1 - s.x0).sum()
    }

    #[test]
    fn square_fill_counts_centers() {
        let ring = vec![(1.2, 1.2), (4.6, 1.2), (4.6, 3.4), (1.2, 3.4)];
        let spans = scan_rings(10, 10, &[ring]);
        // columns 1..4 (centers 1.5..3.5 < 4.6 -> 1,2,3,4), rows 1..2
        assert_eq!(count(&spans), 4 * 2);
    }

    #[test]
    fn fill_clips_to_raster() {
        let ring = vec![(-5.0, -5.0), (50.0, -5.0), (50.0, 50.0), (-5.0, 50.0)];
        assert_eq!(count(&scan_rings(8, 6, &[ring])), 48);
    }

    #[test]
    fn hole_is_left_unpainted() {
        let outer = vec![(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0)];
        let hole = vec![(3.0, 3.0), (3.0, 7.0), (7.0, 7.0), (7.0, 3.0)];
        assert_eq!(count(&scan_rings(10, 10, &[outer, hole])), 100 - 16);
    }

    #[test]
    fn disc_fill() {
        let spans = scan_disc(20, 20, 10.0, 10.0, 3.0);
        let mut n = 0;
        for y in 0..20 {
            for x in 0..20 {
                let dx = x as f64 + 0.5 - 10.0;
                let dy = y as f64 + 0.5 - 10.0;
                if dx * dx + dy * dy <= 9.0 {
                    n += 1;
                }
            }
        }
        assert_eq!(count(&spans), n);
    }

    #[test]
    fn downsample_rejects_wrong_size() {
        let r = Raster::new(100, 100, Rgb::BLACK);
        assert!(matches!(downsample(&r), Err(RasterError::WrongSize { .. })));
    }

    #[test]
    fn downsample_constant_is_identity() {
        let c = Rgb([12, 200, 77]);
        let out = downsample(&Raster::new(RENDER_PX, RENDER_PX, c)).unwrap();
        assert!(out.pixels().all(|p| p == c));
        assert_eq!((out.width(), out.height()), (256, 256));
    }

    #[test]
    fn weights_sum_to_one() {
        for ws in box_weights(2100, 256) {
            let s: f64 = ws.iter().map(|w| w.1).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
