//! Diagram rendering of city windows and A/B pair construction.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::RasterError;
use crate::geom::{Aabb, Point, Polygon, Polyline};
use crate::raster::{
    downsample, scan_disc, scan_rings, BitMask, Raster, Rgb, Span, OUTPUT_PX, RENDER_PX,
};
use crate::scene::{CityScene, HeightClass, RoadWidths};

const METERS_PER_INCH: f64 = 0.0254;

/// Square window on the ground, centered on a point.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Window {
    pub center: Point,
    pub edge_m: f64,
}

impl Window {
    /// Window printed at `1:scale_denominator` on a `render_px` image at
    /// `dpi`. At 1:3000, 2100 px and 300 dpi the edge is 533.4 m.
    pub fn at_scale(
        center: Point,
        scale_denominator: u32,
        render_px: u32,
        dpi: f64,
    ) -> Result<Self, RasterError> {
        if scale_denominator == 0 || !(dpi > 0.0) {
            return Err(RasterError::InvalidScale);
        }
        Ok(Self {
            center,
            edge_m: render_px as f64 / dpi * METERS_PER_INCH * scale_denominator as f64,
        })
    }

    pub fn meters_per_pixel(&self, size_px: u32) -> f64 {
        self.edge_m / size_px as f64
    }

    pub fn bbox(&self) -> Aabb {
        let h = 0.5 * self.edge_m;
        Aabb {
            min: Point::new(self.center.x - h, self.center.y - h),
            max: Point::new(self.center.x + h, self.center.y + h),
        }
    }

    /// Continuous pixel coordinates on a `size_px` raster (row 0 at north).
    #[inline]
    pub fn to_pixel(&self, p: Point, size_px: u32) -> (f64, f64) {
        let h = 0.5 * self.edge_m;
        let k = size_px as f64 / self.edge_m;
        ((p.x - (self.center.x - h)) * k, ((self.center.y + h) - p.y) * k)
    }

    pub fn polygon_spans(&self, poly: &Polygon, size_px: u32) -> Vec<Span> {
        let rings: Vec<Vec<(f64, f64)>> = poly
            .rings()
            .map(|r| r.iter().map(|p| self.to_pixel(*p, size_px)).collect())
            .collect();
        scan_rings(size_px, size_px, &rings)
    }

    /// Pixels of a `size_px` raster whose centers fall inside `poly`.
    pub fn polygon_mask(&self, poly: &Polygon, size_px: u32) -> BitMask {
        let mut m = BitMask::new(size_px, size_px);
        m.fill_spans(&self.polygon_spans(poly, size_px));
        m
    }
}

/// Rendering resolution and print density.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RenderSpec {
    pub render_px: u32,
    pub output_px: u32,
    pub dpi: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            render_px: RENDER_PX,
            output_px: OUTPUT_PX,
            dpi: 300.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct RenderStyle {
    pub background: Rgb,
    pub road: Rgb,
    pub railway: Rgb,
    pub gray_low: Rgb,
    pub gray_medium: Rgb,
    pub gray_high: Rgb,
    pub mask: Rgb,
    pub road_widths: RoadWidths,
    pub railway_stroke_m: f64,
    pub railway_dash_m: f64,
    pub railway_gap_m: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            background: Rgb::BLACK,
            road: Rgb::gray(40),
            railway: Rgb([140, 40, 40]),
            gray_low: Rgb::gray(85),
            gray_medium: Rgb::gray(170),
            gray_high: Rgb::gray(230),
            mask: Rgb::WHITE,
            road_widths: RoadWidths::default(),
            railway_stroke_m: 3.0,
            railway_dash_m: 8.0,
            railway_gap_m: 6.0,
        }
    }
}

impl RenderStyle {
    pub fn gray(&self, class: HeightClass) -> Rgb {
        match class {
            HeightClass::Low => self.gray_low,
            HeightClass::Medium => self.gray_medium,
            HeightClass::High => self.gray_high,
        }
    }

    pub fn grays(&self) -> [Rgb; 3] {
        [self.gray_low, self.gray_medium, self.gray_high]
    }

    /// Every color an undownsampled B-image may contain.
    pub fn palette(&self) -> [Rgb; 6] {
        [
            self.background,
            self.gray_low,
            self.gray_medium,
            self.gray_high,
            self.road,
            self.railway,
        ]
    }

    pub fn validate(&self) -> Result<(), RasterError> {
        let g = self.grays();
        if g[0] == g[1] || g[1] == g[2] || g[0] == g[2] {
            return Err(RasterError::InvalidStyle("height grays must be pairwise distinct".to_string()));
        }
        if g.iter().any(|c| *c == self.mask || *c == self.background) {
            return Err(RasterError::InvalidStyle(
                "height grays must differ from mask and background".to_string(),
            ));
        }
        if self.road == self.mask || self.railway == self.mask || self.background == self.mask {
            return Err(RasterError::InvalidStyle("mask color must be reserved".to_string()));
        }
        if !(self.railway_dash_m > 0.0 && self.railway_gap_m >= 0.0 && self.railway_stroke_m > 0.0) {
            return Err(RasterError::InvalidStyle("railway dash pattern must be positive".to_string()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOutcome {
    pub raster: Raster,
    /// Some scene geometry overlaps the window.
    pub visible: bool,
}

fn stroke_segment(win: &Window, size: u32, a: Point, b: Point, width_m: f64) -> Vec<Span> {
    let n = (b - a).left_normal() * (0.5 * width_m);
    let quad = [a + n, b + n, b - n, a - n];
    let ring: Vec<(f64, f64)> = quad.iter().map(|p| win.to_pixel(*p, size)).collect();
    scan_rings(size, size, &[ring])
}

fn stroke_polyline(win: &Window, size: u32, line: &Polyline, width_m: f64) -> Vec<Span> {
    let mut spans = Vec::new();
    let r_px = 0.5 * width_m * size as f64 / win.edge_m;
    for (a, b) in line.segments() {
        spans.extend(stroke_segment(win, size, a, b, width_m));
    }
    // round joins and caps
    for p in &line.0 {
        let (cx, cy) = win.to_pixel(*p, size);
        spans.extend(scan_disc(size, size, cx, cy, r_px));
    }
    spans
}

fn dash_polyline(win: &Window, size: u32, line: &Polyline, style: &RenderStyle) -> Vec<Span> {
    let period = style.railway_dash_m + style.railway_gap_m;
    let mut spans = Vec::new();
    let mut offset = 0.0;
    for (a, b) in line.segments() {
        let len = a.dist(b);
        if len == 0.0 {
            continue;
        }
        let dir = (b - a) * (1.0 / len);
        // dashes start at multiples of the period along the whole line
        let mut s = -(offset % period);
        while s < len {
            let d0 = s.max(0.0);
            let d1 = (s + style.railway_dash_m).min(len);
            if d1 > d0 {
                spans.extend(stroke_segment(win, size, a + dir * d0, a + dir * d1, style.railway_stroke_m));
            }
            s += period;
        }
        offset += len;
    }
    spans
}

/// Renders the diagram of `scene` inside `window` on a `size_px` raster.
/// Paint order: background, buildings by height class, roads, railways.
pub fn render_window(scene: &CityScene, window: &Window, size_px: u32, style: &RenderStyle) -> RenderOutcome {
    let mut raster = Raster::new(size_px, size_px, style.background);
    let view = window.bbox();
    let margin = style.road_widths.primary_m.max(style.road_widths.other_m).max(style.railway_stroke_m);
    let view_padded = view.expanded(margin);
    let mut visible = false;

    for b in &scene.buildings {
        let fp = &b.feature.footprint;
        if !fp.bbox().intersects(&view) {
            continue;
        }
        visible = true;
        raster.fill_spans(&window.polygon_spans(fp, size_px), style.gray(b.height_class));
    }
    for r in &scene.roads {
        if !r.line.bbox().intersects(&view_padded) {
            continue;
        }
        visible = true;
        let spans = stroke_polyline(window, size_px, &r.line, style.road_widths.road(r.class));
        raster.fill_spans(&spans, style.road);
    }
    for r in &scene.railways {
        if !r.bbox().intersects(&view_padded) {
            continue;
        }
        visible = true;
        raster.fill_spans(&dash_polyline(window, size_px, r, style), style.railway);
    }
    RenderOutcome { raster, visible }
}

/// Paired training sample: `image_a` is `image_b` with the block painted
/// in the mask color.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagramPair {
    pub image_a: Raster,
    pub image_b: Raster,
    pub mask: BitMask,
    pub block_id: String,
    pub city: String,
    pub scale_denominator: u32,
    pub block_pixel_fraction: f64,
}

/// Masks the pixels of `image_b` whose centers fall inside `block`.
pub fn make_pair(
    image_b: Raster,
    block: &Polygon,
    window: &Window,
    style: &RenderStyle,
    block_id: &str,
    city: &str,
    scale_denominator: u32,
) -> Result<DiagramPair, RasterError> {
    if !block.bbox().intersects(&window.bbox()) {
        return Err(RasterError::BlockNotVisible);
    }
    let size = image_b.width();
    if image_b.height() != size {
        return Err(RasterError::WrongSize {
            expected: size,
            width: image_b.width(),
            height: image_b.height(),
        });
    }
    let mask = window.polygon_mask(block, size);
    let mut image_a = image_b.clone();
    for (x, y) in mask.ones() {
        image_a.set(x, y, style.mask);
    }
    let total = size as f64 * size as f64;
    Ok(DiagramPair {
        block_pixel_fraction: mask.count() as f64 / total,
        image_a,
        image_b,
        mask,
        block_id: block_id.to_string(),
        city: city.to_string(),
        scale_denominator,
    })
}

/// Renders the window centered on a block, reduces it, and masks the block.
pub fn render_pair(
    scene: &CityScene,
    block: &Polygon,
    block_id: &str,
    scale_denominator: u32,
    spec: &RenderSpec,
    style: &RenderStyle,
) -> Result<DiagramPair, RasterError> {
    let window = Window::at_scale(block.centroid(), scale_denominator, spec.render_px, spec.dpi)?;
    let full = render_window(scene, &window, spec.render_px, style).raster;
    let image_b = if spec.render_px == RENDER_PX && spec.output_px == OUTPUT_PX {
        downsample(&full)?
    } else {
        crate::raster::downsample_area(&full, spec.output_px, spec.output_px)
    };
    make_pair(image_b, block, &window, style, block_id, &scene.city, scale_denominator)
}

/// Empty-scene helper for fixtures.
pub fn blank(size_px: u32, style: &RenderStyle) -> Raster {
    Raster::new(size_px, size_px, style.background)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn window_edge_at_reference_scale() {
        let w = Window::at_scale(Point::default(), 3000, 2100, 300.0).unwrap();
        assert!((w.edge_m - 533.4).abs() < 1e-9);
        assert!((w.meters_per_pixel(2100) - 0.254).abs() < 1e-12);
        assert!(Window::at_scale(Point::default(), 0, 2100, 300.0).is_err());
    }

    #[test]
    fn style_validation() {
        assert!(RenderStyle::default().validate().is_ok());
        let bad = RenderStyle {
            gray_high: Rgb::gray(170),
            ..RenderStyle::default()
        };
        assert!(bad.validate().is_err());
        let bad = RenderStyle {
            gray_high: Rgb::WHITE,
            ..RenderStyle::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn central_square_mask_fraction() {
        // 64 px at 256 on a 256 m window: 1 m per pixel
        let win = Window {
            center: Point::default(),
            edge_m: 256.0,
        };
        let block = Polygon::rect(-32.0, -32.0, 32.0, 32.0);
        let b = blank(256, &RenderStyle::default());
        let pair = make_pair(b, &block, &win, &RenderStyle::default(), "b", "c", 3000).unwrap();
        assert_eq!(pair.block_pixel_fraction, 0.0625);
    }

    #[test]
    fn sliver_between_pixel_centers() {
        let win = Window {
            center: Point::default(),
            edge_m: 256.0,
        };
        let block = Polygon::rect(0.1, 0.1, 0.4, 0.4);
        let b = blank(256, &RenderStyle::default());
        let pair = make_pair(b.clone(), &block, &win, &RenderStyle::default(), "b", "c", 3000).unwrap();
        assert_eq!(pair.block_pixel_fraction, 0.0);
        assert_eq!(pair.image_a, b);
    }

    #[test]
    fn block_outside_window() {
        let win = Window {
            center: Point::default(),
            edge_m: 100.0,
        };
        let block = Polygon::rect(500.0, 500.0, 510.0, 510.0);
        let r = make_pair(blank(256, &RenderStyle::default()), &block, &win, &RenderStyle::default(), "b", "c", 1);
        assert_eq!(r.unwrap_err(), RasterError::BlockNotVisible);
    }

    #[test]
    fn dashes_leave_gaps() {
        let win = Window {
            center: Point::new(50.0, 0.0),
            edge_m: 200.0,
        };
        let line = Polyline(vec![Point::new(0.0, 0.0), Point::new(100.0, 0.0)]);
        let style = RenderStyle::default();
        let spans = dash_polyline(&win, 200, &line, &style);
        let mut m = BitMask::new(200, 200);
        m.fill_spans(&spans);
        // 1 m per pixel, row through the centerline is 100
        let on: usize = (0..200).filter(|&x| m.get(x, 100)).count();
        // 8 on / 6 off over 100 m: 7 full dashes + 2 m
        assert_eq!(on, 7 * 8 + 2);
    }
}
