//! Box and polygon geometry, overlap measures, greedy matching, and
//! recall-curve construction.
//!
//! Everything here is a pure function over immutable values and is safe to
//! call from any number of threads.

mod bbox;
mod curve;
mod matching;
mod quad;

pub use bbox::{iou, BoundingBox};
pub use curve::{
    iou_grid, recall_at, recall_curve, recall_grid, repeatability_grid, size_bin_index,
    RecallCurve, SizeBinEdges, IOU_GRID_STEP, NUM_SIZE_BINS,
};
pub use matching::{greedy_match, MatchPair, MatchResult, Region};
pub use quad::{quad_box_iou, Quad};
