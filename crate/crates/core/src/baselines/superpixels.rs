//! Superpixel baseline: every low-level segment becomes one proposal.

use image::RgbImage;

use crate::baselines::segmentation::{segment_graph, SegParams};
use crate::geometry::BoundingBox;

/// Bounding boxes of every segment across all parameter settings, with
/// exact duplicates removed. Order: setting order, then raster order of
/// each segment's first pixel. Unscored.
pub fn superpixel_proposals(image: &RgbImage, params: &[SegParams]) -> Vec<BoundingBox> {
    assert!(!params.is_empty(), "at least one segmentation setting");
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for p in params {
        let map = segment_graph(image, p);
        for b in map.component_boxes() {
            let key = [
                b.x0().to_bits(),
                b.y0().to_bits(),
                b.x1().to_bits(),
                b.y1().to_bits(),
            ];
            if seen.insert(key) {
                out.push(b);
            }
        }
    }
    out
}
