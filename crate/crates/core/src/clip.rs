//! Area of the intersection of two general polygons (non-convex, with holes).
//!
//! The intersection area is obtained by integrating `x dy - y dx` over the
//! boundary of `A ∩ B`, which is made of the pieces of A's boundary lying
//! inside B plus the pieces of B's boundary lying inside A. Each edge is
//! split at every crossing with the other polygon and the pieces are
//! classified by their midpoint. Boundary pieces shared by both polygons
//! are counted once, from A's side, and only when both run in the same
//! direction.

use alloc::vec::Vec;

use crate::geom::{point_segment_dist2, Point, Polygon};

/// Area of `a ∩ b` in squared input units.
pub fn intersection_area(a: &Polygon, b: &Polygon) -> f64 {
    let ba = a.bbox();
    let bb = b.bbox();
    if !ba.intersects(&bb) {
        return 0.0;
    }
    let scale = ba.union(&bb);
    let eps = 1e-9 * scale.width().max(scale.height()).max(1.0);

    let a_edges: Vec<(Point, Point)> = a.edges().collect();
    let b_edges: Vec<(Point, Point)> = b.edges().collect();

    let mut twice_area = 0.0;
    twice_area += boundary_inside(&a_edges, &b_edges, b, eps, true);
    twice_area += boundary_inside(&b_edges, &a_edges, a, eps, false);
    (0.5 * twice_area).max(0.0).min(a.area().min(b.area()))
}

/// Sum of cross products of the pieces of `edges` that lie inside `other`.
fn boundary_inside(
    edges: &[(Point, Point)],
    other_edges: &[(Point, Point)],
    other: &Polygon,
    eps: f64,
    keep_shared: bool,
) -> f64 {
    let mut sum = 0.0;
    let mut ts: Vec<f64> = Vec::new();
    for &(p, q) in edges {
        let r = q - p;
        let len2 = r.dot(r);
        if len2 == 0.0 {
            continue;
        }
        ts.clear();
        ts.push(0.0);
        ts.push(1.0);
        for &(c, d) in other_edges {
            split_params(p, r, len2, c, d, eps, &mut ts);
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|x, y| (*x - *y).abs() < 1e-12);

        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 < 1e-12 {
                continue;
            }
            let s0 = p + r * t0;
            let s1 = p + r * t1;
            let mid = p + r * (0.5 * (t0 + t1));
            let eps2 = eps * eps;
            let mut shared = false;
            let mut same_dir = false;
            for &(c, d) in other_edges {
                if point_segment_dist2(mid, c, d) <= eps2 {
                    shared = true;
                    if (d - c).dot(r) > 0.0 {
                        same_dir = true;
                    }
                }
            }
            let take = if shared {
                keep_shared && same_dir
            } else {
                other.contains(mid)
            };
            if take {
                sum += s0.cross(s1);
            }
        }
    }
    sum
}

/// Pushes the edge parameters in (0, 1) where segment `cd` crosses or
/// touches the edge `p + t r`.
fn split_params(p: Point, r: Point, len2: f64, c: Point, d: Point, eps: f64, ts: &mut Vec<f64>) {
    let s = d - c;
    let denom = r.cross(s);
    let qp = c - p;
    let len = libm::sqrt(len2);
    let slen = s.norm();
    if slen == 0.0 {
        return;
    }
    let parallel = denom.abs() <= 1e-12 * len * slen;
    if !parallel {
        let t = qp.cross(s) / denom;
        let u = qp.cross(r) / denom;
        let tol_u = eps / slen;
        if t > 0.0 && t < 1.0 && u >= -tol_u && u <= 1.0 + tol_u {
            ts.push(t);
        }
        return;
    }
    // parallel: only collinear overlaps split the edge
    if qp.cross(r).abs() / len > eps {
        return;
    }
    for e in [c, d] {
        let t = (e - p).dot(r) / len2;
        if t > 0.0 && t < 1.0 {
            ts.push(t);
        }
    }
}
