//! Repeatability protocol: project proposals from a perturbed frame back
//! into the reference frame, match greedily, and score recall-versus-IoU
//! per window size bin.

use crate::error::{Error, Result};
use crate::geometry::{
    greedy_match, recall_curve, repeatability_grid, size_bin_index, BoundingBox, RecallCurve,
    Region, SizeBinEdges, NUM_SIZE_BINS,
};
use crate::io::ImageProposals;
use crate::perturb::{center_inside, project_box, CropRect, Perturbation};

/// How rotated windows are compared against reference boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProjectionMode {
    /// Exact polygon overlap of the projected quad.
    #[default]
    TruePolygon,
    /// Replace each projected quad by its axis-aligned hull before matching.
    AxisAlignedHull,
}

/// Best matched IoU of every reference proposal, grouped by size bin.
#[derive(Debug, Clone)]
pub struct BinnedBestIous {
    pub per_bin: Vec<Vec<f64>>,
    pub reference_count: usize,
    pub perturbed_count: usize,
}

/// Per-size-bin recall curves and their unweighted mean AUC.
#[derive(Debug, Clone)]
pub struct RepeatabilityResult {
    pub thresholds: Vec<f64>,
    /// One entry per size bin; empty bins carry no curve.
    pub bins: Vec<Option<RecallCurve>>,
    /// Unweighted mean AUC over non-empty bins; absent when every bin is
    /// empty (no reference proposals at all).
    pub mean_auc: Option<f64>,
    /// Bin-averaged recall per threshold; its trapezoid equals `mean_auc`.
    pub mean_recall: Option<Vec<f64>>,
    pub reference_count: usize,
    pub perturbed_count: usize,
}

/// Project, center-filter against the reference image bounds, match, and
/// bin one image's proposals.
pub fn match_with_image_size(
    reference: &[BoundingBox],
    perturbed: &[BoundingBox],
    spec: &Perturbation,
    crop: Option<&CropRect>,
    image_width: f64,
    image_height: f64,
    edges: &SizeBinEdges,
    mode: ProjectionMode,
) -> Result<BinnedBestIous> {
    let projected: Vec<Region> = perturbed
        .iter()
        .map(|b| project_box(b, spec, crop))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .map(|r| match (mode, r) {
            (ProjectionMode::AxisAlignedHull, Region::Quad(q)) => {
                Region::Box(q.axis_aligned_hull())
            }
            (_, r) => r,
        })
        .filter(|r| center_inside(r, image_width, image_height))
        .collect();
    let matched = greedy_match(&projected, reference);
    let best = matched.best_iou_per_b(reference.len());
    let mut per_bin = vec![Vec::new(); NUM_SIZE_BINS];
    for (i, b) in reference.iter().enumerate() {
        per_bin[size_bin_index(b, edges)].push(best[i]);
    }
    Ok(BinnedBestIous {
        per_bin,
        reference_count: reference.len(),
        perturbed_count: perturbed.len(),
    })
}

/// Curves and the bin-averaged AUC from binned best-IoU values.
pub fn repeatability_from_binned(
    binned: &BinnedBestIous,
    thresholds: &[f64],
) -> RepeatabilityResult {
    let bins: Vec<Option<RecallCurve>> = binned
        .per_bin
        .iter()
        .map(|ious| {
            if ious.is_empty() {
                None
            } else {
                Some(recall_curve(ious, thresholds).expect("non-empty bin"))
            }
        })
        .collect();
    let non_empty: Vec<&RecallCurve> = bins.iter().flatten().collect();
    let (mean_auc, mean_recall) = if non_empty.is_empty() {
        (None, None)
    } else {
        let auc = non_empty.iter().map(|c| c.auc).sum::<f64>() / non_empty.len() as f64;
        let recall = (0..thresholds.len())
            .map(|j| non_empty.iter().map(|c| c.recall[j]).sum::<f64>() / non_empty.len() as f64)
            .collect();
        (Some(auc), Some(recall))
    };
    RepeatabilityResult {
        thresholds: thresholds.to_vec(),
        bins,
        mean_auc,
        mean_recall,
        reference_count: binned.reference_count,
        perturbed_count: binned.perturbed_count,
    }
}

/// Evaluate one (image, perturbation) pair over the full [0, 1] grid.
///
/// Both proposal lists must belong to the same image and already be cut to
/// the requested count; the size-bin edges come from the reference image.
pub fn evaluate_repeatability(
    reference: &ImageProposals,
    perturbed: &ImageProposals,
    spec: &Perturbation,
    crop: Option<&CropRect>,
    edges: &SizeBinEdges,
) -> Result<RepeatabilityResult> {
    if reference.image_id != perturbed.image_id {
        return Err(Error::ImageIdMismatch {
            reference: reference.image_id.clone(),
            perturbed: perturbed.image_id.clone(),
        });
    }
    let binned = match_with_image_size(
        &reference.boxes,
        &perturbed.boxes,
        spec,
        crop,
        reference.width as f64,
        reference.height as f64,
        edges,
        ProjectionMode::TruePolygon,
    )?;
    Ok(repeatability_from_binned(&binned, &repeatability_grid()))
}

/// Pools binned best-IoU values across images so a whole run reduces to one
/// set of per-bin curves. Merging is order-insensitive.
#[derive(Debug, Clone, Default)]
pub struct RepeatabilityAccumulator {
    per_bin: Vec<Vec<f64>>,
    reference_count: usize,
    perturbed_count: usize,
}

impl RepeatabilityAccumulator {
    pub fn new() -> Self {
        Self {
            per_bin: vec![Vec::new(); NUM_SIZE_BINS],
            reference_count: 0,
            perturbed_count: 0,
        }
    }

    pub fn add(&mut self, binned: &BinnedBestIous) {
        for (acc, ious) in self.per_bin.iter_mut().zip(&binned.per_bin) {
            acc.extend_from_slice(ious);
        }
        self.reference_count += binned.reference_count;
        self.perturbed_count += binned.perturbed_count;
    }

    pub fn result(&self, thresholds: &[f64]) -> RepeatabilityResult {
        repeatability_from_binned(
            &BinnedBestIous {
                per_bin: self.per_bin.clone(),
                reference_count: self.reference_count,
                perturbed_count: self.perturbed_count,
            },
            thresholds,
        )
    }
}
