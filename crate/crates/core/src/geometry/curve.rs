//! Recall-versus-IoU curves and window size binning.

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// Grid step shared by both evaluation regimes.
pub const IOU_GRID_STEP: f64 = 0.025;

/// Number of window-size groups used when averaging repeatability.
pub const NUM_SIZE_BINS: usize = 10;

/// Uniform IoU threshold grid over `[lo, hi]` with step 0.025.
pub fn iou_grid(lo: f64, hi: f64) -> Vec<f64> {
    let n = ((hi - lo) / IOU_GRID_STEP).round() as usize;
    (0..=n)
        .map(|i| lo + i as f64 * (hi - lo) / n as f64)
        .collect()
}

/// Full-range grid used by repeatability curves: 41 points over [0, 1].
pub fn repeatability_grid() -> Vec<f64> {
    iou_grid(0.0, 1.0)
}

/// Localization-range grid used by recall curves: 21 points over [0.5, 1].
pub fn recall_grid() -> Vec<f64> {
    iou_grid(0.5, 1.0)
}

/// Sampled recall as a function of IoU threshold, with normalized area under
/// the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RecallCurve {
    pub thresholds: Vec<f64>,
    pub recall: Vec<f64>,
    pub auc: f64,
}

/// Fraction of targets whose best overlap reaches `t`. An overlap of exactly
/// zero means "unmatched" and never counts, including at `t = 0`.
pub fn recall_at(best_ious: &[f64], t: f64) -> f64 {
    if best_ious.is_empty() {
        return 0.0;
    }
    let hits = best_ious.iter().filter(|&&v| v > 0.0 && v >= t).count();
    hits as f64 / best_ious.len() as f64
}

/// Build the recall curve over an ascending threshold grid.
///
/// The AUC is the trapezoidal integral of recall over the grid, normalized by
/// the integral of the constant 1 over the same grid. The ratio form keeps
/// `auc == 1.0` exact whenever recall is identically 1.
pub fn recall_curve(best_ious: &[f64], thresholds: &[f64]) -> Result<RecallCurve> {
    if best_ious.is_empty() {
        return Err(Error::EmptyTargetSet);
    }
    if thresholds.len() < 2 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadThresholdGrid);
    }
    let recall: Vec<f64> = thresholds
        .iter()
        .map(|&t| recall_at(best_ious, t))
        .collect();
    let auc = normalized_trapezoid(thresholds, &recall);
    Ok(RecallCurve {
        thresholds: thresholds.to_vec(),
        recall,
        auc,
    })
}

pub(crate) fn normalized_trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..xs.len() {
        let dx = xs[i] - xs[i - 1];
        num += dx * (ys[i] + ys[i - 1]) / 2.0;
        den += dx;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Boundaries of the ten logarithmic sqrt-area bins.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeBinEdges {
    edges: [f64; NUM_SIZE_BINS + 1],
}

impl SizeBinEdges {
    pub fn from_edges(edges: [f64; NUM_SIZE_BINS + 1]) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Self { edges }
    }

    /// Logarithmically spaced edges between `lo` and `hi` in sqrt-area units.
    pub fn log_spaced(lo: f64, hi: f64) -> Self {
        let edges = std::array::from_fn(|i| lo * (hi / lo).powf(i as f64 / NUM_SIZE_BINS as f64));
        Self { edges }
    }

    /// Default per-image edges: 10 px up to the image diagonal.
    pub fn for_image(width: f64, height: f64) -> Self {
        Self::log_spaced(10.0, (width * width + height * height).sqrt())
    }

    pub fn edges(&self) -> &[f64; NUM_SIZE_BINS + 1] {
        &self.edges
    }

    /// Bin index for a sqrt-area value; out-of-range values clamp to the
    /// first or last bin.
    pub fn bin_for_sqrt_area(&self, sqrt_area: f64) -> usize {
        if sqrt_area < self.edges[0] {
            return 0;
        }
        for i in 0..NUM_SIZE_BINS {
            if sqrt_area < self.edges[i + 1] {
                return i;
            }
        }
        NUM_SIZE_BINS - 1
    }
}

/// Size group of a box under the given edges.
pub fn size_bin_index(b: &BoundingBox, edges: &SizeBinEdges) -> usize {
    edges.bin_for_sqrt_area(b.sqrt_area())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shapes() {
        let r = repeatability_grid();
        assert_eq!(r.len(), 41);
        assert_eq!(r[0], 0.0);
        assert_eq!(*r.last().unwrap(), 1.0);
        let q = recall_grid();
        assert_eq!(q.len(), 21);
        assert_eq!(q[0], 0.5);
        assert_eq!(*q.last().unwrap(), 1.0);
    }

    #[test]
    fn all_matched_gives_unit_auc() {
        let c = recall_curve(&[1.0, 1.0, 1.0], &repeatability_grid()).unwrap();
        assert!(c.recall.iter().all(|&r| r == 1.0));
        assert_eq!(c.auc, 1.0);
    }

    #[test]
    fn all_unmatched_gives_zero() {
        let c = recall_curve(&[0.0, 0.0], &repeatability_grid()).unwrap();
        assert!(c.recall.iter().all(|&r| r == 0.0));
        assert_eq!(c.auc, 0.0);
    }

    #[test]
    fn hand_trapezoid() {
        // recall = [1.0, 0.5, 0.0] over {0.5, 0.75, 1.0}:
        // (0.25*0.75 + 0.25*0.25) / 0.5 = 0.5
        let c = recall_curve(&[0.6, 0.8], &[0.5, 0.75, 1.0]).unwrap();
        assert_eq!(c.recall, vec![1.0, 0.5, 0.0]);
        assert!((c.auc - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_targets_error() {
        assert!(recall_curve(&[], &recall_grid()).is_err());
    }

    #[test]
    fn recall_is_non_increasing() {
        let c = recall_curve(&[0.1, 0.55, 0.72, 0.72, 0.93, 1.0], &repeatability_grid()).unwrap();
        assert!(c.recall.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn bin_boundaries() {
        let edges = SizeBinEdges::log_spaced(10.0, 500.0);
        assert_eq!(edges.bin_for_sqrt_area(10.0), 0);
        assert_eq!(edges.bin_for_sqrt_area(501.0), 9);
        assert_eq!(edges.bin_for_sqrt_area(1.0), 0);
        // log10(100/10) / log10(500/10) * 10 = 5.88 -> bin 5
        assert_eq!(edges.bin_for_sqrt_area(100.0), 5);
    }

    #[test]
    fn box_binning_uses_sqrt_area() {
        let edges = SizeBinEdges::log_spaced(10.0, 500.0);
        let b = BoundingBox::new(0.0, 0.0, 100.0, 100.0).unwrap();
        assert_eq!(size_bin_index(&b, &edges), 5);
    }
}
