//! Bounding-box parameter statistics fitted on training annotations.
//!
//! Boxes are described by (center-x, center-y, sqrt-area, log-aspect). The
//! trimmed per-parameter ranges drive the uniform baseline, the mean and
//! covariance drive the Gaussian baseline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::io::GroundTruthSet;

/// Minimum annotation count for a usable fit.
pub const MIN_TRAINING_ANNOTATIONS: usize = 10;

/// Per-parameter trimmed ranges plus untrimmed mean and covariance of
/// (cx, cy, sqrt-area, log-aspect).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxParamStats {
    /// [lo, hi] per parameter after symmetric trimming.
    pub ranges: [[f64; 2]; 4],
    pub mean: [f64; 4],
    pub cov: [[f64; 4]; 4],
    /// Whether cx, cy, sqrt-area are expressed relative to image size
    /// (cx/W, cy/H, sqrt-area/sqrt(W*H)) rather than in pixels.
    pub normalized: bool,
}

/// Parameter vector of a box, optionally image-size normalized.
pub(crate) fn box_params(b: &BoundingBox, width: f64, height: f64, normalized: bool) -> [f64; 4] {
    let (cx, cy) = b.center();
    let sa = b.sqrt_area();
    let la = b.log_aspect();
    if normalized {
        [cx / width, cy / height, sa / (width * height).sqrt(), la]
    } else {
        [cx, cy, sa, la]
    }
}

/// Invert [`box_params`] for a target image, clamping the center into the
/// image and clipping the extent to its bounds. The extent floor keeps the
/// output strictly positive-area even for degenerate parameter draws.
pub(crate) fn box_from_params(
    p: [f64; 4],
    width: f64,
    height: f64,
    normalized: bool,
) -> BoundingBox {
    let (mut cx, mut cy, sa, la) = if normalized {
        (
            p[0] * width,
            p[1] * height,
            p[2] * (width * height).sqrt(),
            p[3],
        )
    } else {
        (p[0], p[1], p[2], p[3])
    };
    cx = cx.clamp(0.0, width);
    cy = cy.clamp(0.0, height);
    let area = sa * sa;
    let ratio = la.exp();
    let w = (area * ratio).sqrt().max(1e-6).min(2.0 * width);
    let h = (area / ratio).sqrt().max(1e-6).min(2.0 * height);
    BoundingBox::new(cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0)
        .expect("positive extents by construction")
        .clip_to_image(width, height)
}

/// Symmetric trim: drop `floor(trim * n)` values from each end of the sorted
/// list and return the surviving [lo, hi].
fn trimmed_range(values: &mut [f64], trim: f64) -> [f64; 2] {
    values.sort_by(f64::total_cmp);
    let k = (trim * values.len() as f64).floor() as usize;
    [values[k], values[values.len() - 1 - k]]
}

/// Fit box parameter statistics on every annotation of a ground-truth set.
///
/// Ranges cover the data remaining after discarding the `trim` fraction of
/// smallest and largest values per parameter independently; mean and
/// covariance are computed on the untrimmed data.
pub fn estimate_box_stats(
    gt: &GroundTruthSet,
    trim: f64,
    normalized: bool,
) -> Result<BoxParamStats> {
    if !(0.0..0.5).contains(&trim) {
        return Err(Error::BadTrimFraction(trim));
    }
    let mut samples: Vec<[f64; 4]> = Vec::new();
    for img in gt.images() {
        let (w, h) = (img.width as f64, img.height as f64);
        for obj in &img.objects {
            let p = box_params(&obj.bbox, w, h, normalized);
            if p.iter().all(|v| v.is_finite()) {
                samples.push(p);
            } else {
                log::warn!(
                    "image '{}': degenerate annotation skipped in statistics fit",
                    img.image_id
                );
            }
        }
    }
    if samples.len() < MIN_TRAINING_ANNOTATIONS {
        return Err(Error::TooFewAnnotations {
            needed: MIN_TRAINING_ANNOTATIONS,
            got: samples.len(),
        });
    }

    // Welford update: exact zeros for constant data, stable otherwise.
    let mut mean = [0.0; 4];
    let mut m2 = [[0.0; 4]; 4];
    for (idx, s) in samples.iter().enumerate() {
        let count = (idx + 1) as f64;
        let d_old: [f64; 4] = std::array::from_fn(|i| s[i] - mean[i]);
        for i in 0..4 {
            mean[i] += d_old[i] / count;
        }
        let d_new: [f64; 4] = std::array::from_fn(|i| s[i] - mean[i]);
        for i in 0..4 {
            for j in 0..4 {
                m2[i][j] += d_old[i] * d_new[j];
            }
        }
    }
    let denom = samples.len() as f64 - 1.0;
    let mut cov = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            cov[i][j] = (m2[i][j] + m2[j][i]) / (2.0 * denom);
        }
    }

    let ranges = std::array::from_fn(|i| {
        let mut column: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        trimmed_range(&mut column, trim)
    });

    Ok(BoxParamStats {
        ranges,
        mean,
        cov,
        normalized,
    })
}
