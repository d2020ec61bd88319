//! Axis-aligned bounding boxes in continuous pixel coordinates.
//!
//! Boxes use pure real coordinates: width is `x1 - x0` with no pixel-index
//! off-by-one convention. Loaders that ingest 1-based inclusive indices
//! (Pascal VOC XML) convert at the boundary.

use crate::error::{Error, Result};

/// Axis-aligned rectangle with an optional detection/proposal score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    score: Option<f64>,
}

impl BoundingBox {
    /// Build a box from corner coordinates. Zero-extent boxes are allowed;
    /// negative extents and non-finite coordinates are rejected.
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite())
            || x1 < x0
            || y1 < y0
        {
            return Err(Error::InvalidBox { x0, y0, x1, y1 });
        }
        Ok(Self {
            x0,
            y0,
            x1,
            y1,
            score: None,
        })
    }

    pub fn with_score(x0: f64, y0: f64, x1: f64, y1: f64, score: f64) -> Result<Self> {
        let mut b = Self::new(x0, y0, x1, y1)?;
        b.score = Some(score);
        Ok(b)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn score(&self) -> Option<f64> {
        self.score
    }

    pub fn set_score(&mut self, score: Option<f64>) {
        self.score = score;
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn sqrt_area(&self) -> f64 {
        self.area().sqrt()
    }

    /// Natural log of width/height. Infinite or NaN for degenerate boxes.
    pub fn log_aspect(&self) -> f64 {
        (self.width() / self.height()).ln()
    }

    pub fn corners(&self) -> [[f64; 2]; 4] {
        [
            [self.x0, self.y0],
            [self.x1, self.y0],
            [self.x1, self.y1],
            [self.x0, self.y1],
        ]
    }

    /// Intersection area with another box.
    pub fn intersection_area(&self, other: &BoundingBox) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    /// Intersection with an image rectangle `[0, w] x [0, h]`, keeping the score.
    /// Returns a degenerate box pinned to the nearest edge when fully outside.
    pub fn clip_to_image(&self, width: f64, height: f64) -> BoundingBox {
        let x0 = self.x0.clamp(0.0, width);
        let y0 = self.y0.clamp(0.0, height);
        let x1 = self.x1.clamp(x0, width);
        let y1 = self.y1.clamp(y0, height);
        BoundingBox {
            x0,
            y0,
            x1,
            y1,
            score: self.score,
        }
    }

    /// Linearly scale the box by `1/s` on both axes (projection out of a
    /// scaled frame).
    pub fn scaled(&self, factor: f64) -> BoundingBox {
        BoundingBox {
            x0: self.x0 * factor,
            y0: self.y0 * factor,
            x1: self.x1 * factor,
            y1: self.y1 * factor,
            score: self.score,
        }
    }
}

/// Intersection over union of two boxes. Returns 0 when the union has zero
/// area (two degenerate boxes), so the function is total on valid boxes.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = a.intersection_area(b);
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}
