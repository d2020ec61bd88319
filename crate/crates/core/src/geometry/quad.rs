//! Convex quadrilaterals and polygon/box overlap.
//!
//! Quads arise when a box is projected out of a rotated frame. Overlap with
//! an axis-aligned box is computed exactly: Sutherland-Hodgman clipping of
//! the quad against the four half-planes of the box, shoelace areas, and
//! inclusion-exclusion for the union.

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    vertices: [[f64; 2]; 4],
    score: Option<f64>,
}

impl Quad {
    /// Build a quad, normalizing vertex order to counter-clockwise.
    /// Degenerate (zero-area) quads are accepted; reflex ones are not.
    pub fn new(mut vertices: [[f64; 2]; 4]) -> Result<Self> {
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        if !is_convex(&vertices) {
            return Err(Error::NonConvexQuad(vertices));
        }
        Ok(Self {
            vertices,
            score: None,
        })
    }

    pub fn from_box(b: &BoundingBox) -> Self {
        Self {
            vertices: b.corners(),
            score: b.score(),
        }
    }

    pub fn vertices(&self) -> &[[f64; 2]; 4] {
        &self.vertices
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    pub fn set_score(&mut self, score: Option<f64>) {
        self.score = score;
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Vertex mean. Coincides with the true centroid for parallelograms,
    /// which covers every quad produced by rotating a box.
    pub fn centroid(&self) -> (f64, f64) {
        let sx: f64 = self.vertices.iter().map(|v| v[0]).sum();
        let sy: f64 = self.vertices.iter().map(|v| v[1]).sum();
        (sx / 4.0, sy / 4.0)
    }

    /// Square root of the quad area, for size binning.
    pub fn sqrt_area(&self) -> f64 {
        self.area().sqrt()
    }

    /// Smallest axis-aligned box containing the quad, keeping the score.
    pub fn axis_aligned_hull(&self) -> BoundingBox {
        let xs = self.vertices.iter().map(|v| v[0]);
        let ys = self.vertices.iter().map(|v| v[1]);
        let mut b = BoundingBox::new(
            xs.clone().fold(f64::INFINITY, f64::min),
            ys.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.fold(f64::NEG_INFINITY, f64::max),
        )
        .expect("hull bounds are ordered");
        b.set_score(self.score);
        b
    }
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    acc / 2.0
}

fn is_convex(vertices: &[[f64; 2]; 4]) -> bool {
    // CCW order established by the caller: every turn must be left or straight.
    for i in 0..4 {
        let a = vertices[i];
        let b = vertices[(i + 1) % 4];
        let c = vertices[(i + 2) % 4];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross < -1e-9 * (1.0 + a[0].abs() + a[1].abs()).powi(2) {
            return false;
        }
    }
    true
}

/// Clip `poly` against the half-plane where `inside(p) >= 0`; `cross(a, b)`
/// returns the intersection of segment a-b with the boundary.
fn clip_halfplane(
    poly: &[[f64; 2]],
    inside: impl Fn(&[f64; 2]) -> f64,
    cross: impl Fn(&[f64; 2], &[f64; 2], f64, f64) -> [f64; 2],
) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let ds = inside(&s);
        let de = inside(&e);
        match (ds >= 0.0, de >= 0.0) {
            (true, true) => out.push(e),
            (true, false) => out.push(cross(&s, &e, ds, de)),
            (false, true) => {
                out.push(cross(&s, &e, ds, de));
                out.push(e);
            }
            (false, false) => {}
        }
    }
    out
}

fn lerp_at(s: &[f64; 2], e: &[f64; 2], ds: f64, de: f64) -> [f64; 2] {
    let t = ds / (ds - de);
    [s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t]
}

/// Area of the intersection between a convex polygon and a box.
fn clipped_area(poly: &[[f64; 2]], b: &BoundingBox) -> f64 {
    let (x0, y0, x1, y1) = (b.x0(), b.y0(), b.x1(), b.y1());
    let mut p = poly.to_vec();
    p = clip_halfplane(&p, |v| v[0] - x0, lerp_at);
    if p.is_empty() {
        return 0.0;
    }
    p = clip_halfplane(&p, |v| x1 - v[0], lerp_at);
    if p.is_empty() {
        return 0.0;
    }
    p = clip_halfplane(&p, |v| v[1] - y0, lerp_at);
    if p.is_empty() {
        return 0.0;
    }
    p = clip_halfplane(&p, |v| y1 - v[1], lerp_at);
    if p.len() < 3 {
        return 0.0;
    }
    signed_area(&p).max(0.0)
}

/// Intersection over union between a convex quad and a box.
pub fn quad_box_iou(q: &Quad, b: &BoundingBox) -> f64 {
    let inter = clipped_area(q.vertices(), b);
    let union = q.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}
