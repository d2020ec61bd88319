//! Regular-grid sliding window proposals.
//!
//! Windows come from a coarse set of power-of-two sizes; the requested
//! budget is split evenly across the sizes that fit the image, and each
//! size places its share on a uniform grid of top-left offsets. Output
//! depends only on image size and budget, never on pixel content.

use crate::geometry::BoundingBox;

/// Candidate window edge lengths in pixels.
const WINDOW_EDGES: [f64; 6] = [16.0, 32.0, 64.0, 128.0, 256.0, 512.0];

/// Deterministic sliding-window proposals; at most `n` boxes, all fully
/// inside the image. Images smaller than the smallest window produce none.
pub fn sliding_window(width: u32, height: u32, n: usize) -> Vec<BoundingBox> {
    let (iw, ih) = (width as f64, height as f64);
    let sizes: Vec<(f64, f64)> = WINDOW_EDGES
        .iter()
        .flat_map(|&w| WINDOW_EDGES.iter().map(move |&h| (w, h)))
        .filter(|&(w, h)| w <= iw && h <= ih)
        .collect();
    if sizes.is_empty() || n == 0 {
        return Vec::new();
    }

    let base = n / sizes.len();
    let remainder = n % sizes.len();
    let mut out = Vec::with_capacity(n);
    for (i, &(w, h)) in sizes.iter().enumerate() {
        let budget = base + usize::from(i < remainder);
        if budget == 0 {
            continue;
        }
        let cols = ((budget as f64 * iw / ih).sqrt().ceil() as usize).max(1);
        let rows = ((budget as f64 * ih / iw).sqrt().ceil() as usize).max(1);
        let mut emitted = 0;
        'grid: for r in 0..rows {
            for c in 0..cols {
                if emitted == budget {
                    break 'grid;
                }
                let x = grid_offset(c, cols, iw - w);
                let y = grid_offset(r, rows, ih - h);
                out.push(BoundingBox::new(x, y, x + w, y + h).expect("window fits the image"));
                emitted += 1;
            }
        }
    }
    out
}

/// Position `i` of `count` uniformly covering `[0, span]`; a single position
/// centers on the span.
fn grid_offset(i: usize, count: usize, span: f64) -> f64 {
    if count <= 1 {
        span / 2.0
    } else {
        i as f64 * span / (count - 1) as f64
    }
}
