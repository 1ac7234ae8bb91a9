//! Planar geometry in meters: points, rings, polygons with holes, polylines.
//!
//! Rings are stored open (the closing vertex is implied). [`Polygon::new`]
//! normalizes orientation so exteriors run counter-clockwise and holes
//! clockwise; several routines in [`crate::clip`] rely on that.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    #[inline]
    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    /// Left-hand unit normal of this direction vector.
    pub fn left_normal(self) -> Point {
        let n = self.norm();
        if n == 0.0 {
            return Point::default();
        }
        Point::new(-self.y / n, self.x / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Aabb {
    pub min: Point,
    pub max: Point,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb {
        min: Point::new(f64::INFINITY, f64::INFINITY),
        max: Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
    };

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Aabb {
        let mut b = Aabb::EMPTY;
        for p in pts {
            b.extend(*p);
        }
        b
    }

    pub fn extend(&mut self, p: Point) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn union(&self, o: &Aabb) -> Aabb {
        let mut b = *self;
        b.extend(o.min);
        b.extend(o.max);
        b
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        !(self.is_empty()
            || o.is_empty()
            || self.max.x < o.min.x
            || o.max.x < self.min.x
            || self.max.y < o.min.y
            || o.max.y < self.min.y)
    }

    pub fn expanded(&self, by: f64) -> Aabb {
        Aabb {
            min: Point::new(self.min.x - by, self.min.y - by),
            max: Point::new(self.max.x + by, self.max.y + by),
        }
    }

    pub fn center(&self) -> Point {
        Point::new(
            0.5 * (self.min.x + self.max.x),
            0.5 * (self.min.y + self.max.y),
        )
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }
}

/// Shoelace signed area of an open ring; positive when counter-clockwise.
pub fn ring_signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += ring[i].cross(ring[(i + 1) % n]);
    }
    0.5 * s
}

/// Iterates the closed edge list of an open ring.
pub fn ring_edges(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    let n = ring.len();
    (0..n).map(move |i| (ring[i], ring[(i + 1) % n]))
}

/// Drops consecutive duplicates and an explicit closing vertex.
pub fn clean_ring(mut ring: Vec<Point>) -> Vec<Point> {
    ring.dedup();
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polygon {
    pub exterior: Vec<Point>,
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Vec::is_empty"))]
    pub holes: Vec<Vec<Point>>,
}

impl Polygon {
    /// Builds a polygon, removing closing vertices and normalizing ring
    /// orientation (exterior CCW, holes CW).
    pub fn new(exterior: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        let mut exterior = clean_ring(exterior);
        if ring_signed_area(&exterior) < 0.0 {
            exterior.reverse();
        }
        let holes = holes
            .into_iter()
            .map(clean_ring)
            .filter(|h| h.len() >= 3)
            .map(|mut h| {
                if ring_signed_area(&h) > 0.0 {
                    h.reverse();
                }
                h
            })
            .collect();
        Self { exterior, holes }
    }

    pub fn from_exterior(exterior: Vec<Point>) -> Self {
        Self::new(exterior, Vec::new())
    }

    /// Axis-aligned rectangle, handy for fixtures and windows.
    pub fn rect(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        Self::from_exterior(alloc::vec![
            Point::new(min_x, min_y),
            Point::new(max_x, min_y),
            Point::new(max_x, max_y),
            Point::new(min_x, max_y),
        ])
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        core::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(|h| h.as_slice()))
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.rings().flat_map(ring_edges)
    }

    pub fn area(&self) -> f64 {
        let holes: f64 = self.holes.iter().map(|h| ring_signed_area(h).abs()).sum();
        (ring_signed_area(&self.exterior).abs() - holes).max(0.0)
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.exterior.iter())
    }

    /// Area centroid; falls back to the vertex mean for zero-area input.
    pub fn centroid(&self) -> Point {
        let mut a = 0.0;
        let mut cx = 0.0;
        let mut cy = 0.0;
        for ring in self.rings() {
            for (p, q) in ring_edges(ring) {
                let c = p.cross(q);
                a += c;
                cx += (p.x + q.x) * c;
                cy += (p.y + q.y) * c;
            }
        }
        if a.abs() < 1e-12 {
            let n = self.exterior.len().max(1) as f64;
            let s = self.exterior.iter().fold(Point::default(), |s, p| s + *p);
            return s * (1.0 / n);
        }
        Point::new(cx / (3.0 * a), cy / (3.0 * a))
    }

    /// Even-odd containment over all rings. Boundary points may land on
    /// either side.
    pub fn contains(&self, p: Point) -> bool {
        self.rings().fold(false, |inside, ring| inside ^ ring_contains(ring, p))
    }

    pub fn translated(&self, d: Point) -> Polygon {
        Polygon {
            exterior: self.exterior.iter().map(|p| *p + d).collect(),
            holes: self
                .holes
                .iter()
                .map(|h| h.iter().map(|p| *p + d).collect())
                .collect(),
        }
    }

    /// Simple (no self- or cross-ring intersections) with positive area.
    pub fn is_valid(&self) -> bool {
        self.exterior.len() >= 3
            && self.rings().all(|r| r.iter().all(|p| p.is_finite()))
            && self.area() > 0.0
            && !self.has_self_intersection()
    }

    /// Brute-force check over every pair of edges across all rings.
    pub fn has_self_intersection(&self) -> bool {
        let rings: Vec<&[Point]> = self.rings().collect();
        for (ri, a) in rings.iter().enumerate() {
            if ring_self_intersects(a) {
                return true;
            }
            for b in &rings[ri + 1..] {
                for (p1, p2) in ring_edges(a) {
                    for (q1, q2) in ring_edges(b) {
                        if segments_intersect(p1, p2, q1, q2) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}

/// Crossing-number test of a single ring.
pub fn ring_contains(ring: &[Point], p: Point) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// True when any two edges of the ring meet other than at the shared
/// vertex of consecutive edges.
pub fn ring_self_intersects(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return true;
    }
    for i in 0..n {
        let (a1, a2) = (ring[i], ring[(i + 1) % n]);
        for j in i + 1..n {
            let (b1, b2) = (ring[j], ring[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // consecutive edges may only share their common vertex
                let (shared, other_a, other_b) = if j == i + 1 { (a2, a1, b2) } else { (a1, a2, b1) };
                let da = other_a - shared;
                let db = other_b - shared;
                if da.cross(db) == 0.0 && da.dot(db) > 0.0 {
                    return true;
                }
                continue;
            }
            if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Polyline(pub Vec<Point>);

impl Polyline {
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(self.0.iter())
    }
}

/// Squared distance from `p` to the closed segment `ab`.
pub fn point_segment_dist2(p: Point, a: Point, b: Point) -> f64 {
    let ab = b - a;
    let l2 = ab.dot(ab);
    let t = if l2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / l2).clamp(0.0, 1.0)
    };
    let d = p - (a + ab * t);
    d.dot(d)
}
