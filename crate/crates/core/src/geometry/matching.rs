//! Greedy one-to-one matching between two window sets.

use crate::geometry::{iou, quad_box_iou, BoundingBox, Quad};

/// A window that may be axis-aligned or a projected quad.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Box(BoundingBox),
    Quad(Quad),
}

impl Region {
    pub fn iou_with_box(&self, b: &BoundingBox) -> f64 {
        match self {
            Region::Box(a) => iou(a, b),
            Region::Quad(q) => quad_box_iou(q, b),
        }
    }

    pub fn centroid(&self) -> (f64, f64) {
        match self {
            Region::Box(b) => b.center(),
            Region::Quad(q) => q.centroid(),
        }
    }

    pub fn sqrt_area(&self) -> f64 {
        match self {
            Region::Box(b) => b.sqrt_area(),
            Region::Quad(q) => q.sqrt_area(),
        }
    }

    pub fn score(&self) -> Option<f64> {
        match self {
            Region::Box(b) => b.score(),
            Region::Quad(q) => q.score(),
        }
    }
}

/// One accepted pair: indices into the two input lists plus their overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchPair {
    pub a: usize,
    pub b: usize,
    pub iou: f64,
}

/// One-to-one matching, pairs sorted by descending IoU. Only strictly
/// overlapping pairs (IoU > 0) can be matched.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchResult {
    pub pairs: Vec<MatchPair>,
}

impl MatchResult {
    /// Matched IoU for each element of the `b` side, 0 where unmatched.
    pub fn best_iou_per_b(&self, b_len: usize) -> Vec<f64> {
        let mut out = vec![0.0; b_len];
        for p in &self.pairs {
            out[p.b] = p.iou;
        }
        out
    }
}

/// Greedy matching by descending IoU.
///
/// Enumerates all overlapping pairs, sorts by IoU descending (ties broken by
/// smaller `a` index, then smaller `b` index), and sweeps the list accepting
/// a pair whenever both sides are still free. Equivalent to repeatedly
/// extracting the global maximum-IoU pair.
pub fn greedy_match(a: &[Region], b: &[BoundingBox]) -> MatchResult {
    let mut candidates: Vec<MatchPair> = Vec::new();
    for (ai, ra) in a.iter().enumerate() {
        for (bi, rb) in b.iter().enumerate() {
            let v = ra.iou_with_box(rb);
            if v > 0.0 {
                candidates.push(MatchPair {
                    a: ai,
                    b: bi,
                    iou: v,
                });
            }
        }
    }
    candidates.sort_by(|p, q| {
        q.iou
            .total_cmp(&p.iou)
            .then(p.a.cmp(&q.a))
            .then(p.b.cmp(&q.b))
    });

    let mut a_taken = vec![false; a.len()];
    let mut b_taken = vec![false; b.len()];
    let mut pairs = Vec::new();
    for p in candidates {
        if !a_taken[p.a] && !b_taken[p.b] {
            a_taken[p.a] = true;
            b_taken[p.b] = true;
            pairs.push(p);
        }
    }
    MatchResult { pairs }
}
