//! Detection-quality pipeline: filter raw detections by proposal overlap,
//! apply non-maximum suppression, and score per-class precision/recall.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{iou, BoundingBox};
use crate::io::{DetectionSet, GroundTruthSet, ImageDetections, ProposalSet};

/// Precision/recall curve of one class with its average precision.
#[derive(Debug, Clone)]
pub struct PRCurve {
    pub recall: Vec<f64>,
    pub precision: Vec<f64>,
    pub ap: f64,
}

/// AP integration rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApMode {
    /// Mean over the 11 recall levels {0, 0.1, ..., 1} of the maximum
    /// precision at recall >= level (Pascal VOC 2007).
    ElevenPoint,
    /// Area under the precision envelope.
    Continuous,
}

/// Keep the detections that overlap some proposal of the same image by
/// strictly more than `min_iou`. Images without proposals lose all their
/// detections.
pub fn filter_by_proposals(
    detections: &DetectionSet,
    proposals: &ProposalSet,
    min_iou: f64,
) -> DetectionSet {
    let images = detections
        .images()
        .iter()
        .map(|img| {
            let props = proposals.get(&img.image_id).map(|p| p.boxes.as_slice());
            ImageDetections {
                image_id: img.image_id.clone(),
                detections: img
                    .detections
                    .iter()
                    .filter(|d| {
                        props.is_some_and(|boxes| boxes.iter().any(|p| iou(p, &d.bbox) > min_iou))
                    })
                    .cloned()
                    .collect(),
            }
        })
        .collect();
    DetectionSet::from_images(images).expect("image ids unchanged by filtering")
}

/// Greedy per-image, per-class non-maximum suppression: accept detections in
/// descending score order (ties in input order) and drop any remaining one
/// overlapping an accepted detection by more than `overlap`.
pub fn nms(detections: &DetectionSet, overlap: f64) -> DetectionSet {
    let images = detections
        .images()
        .iter()
        .map(|img| {
            let mut order: Vec<usize> = (0..img.detections.len()).collect();
            order.sort_by(|&a, &b| img.detections[b].score.total_cmp(&img.detections[a].score));
            let mut kept: Vec<usize> = Vec::new();
            for &candidate in &order {
                let c = &img.detections[candidate];
                let suppressed = kept.iter().any(|&k| {
                    let kd = &img.detections[k];
                    kd.label == c.label && iou(&kd.bbox, &c.bbox) > overlap
                });
                if !suppressed {
                    kept.push(candidate);
                }
            }
            // Output in the accepted (score-descending) order.
            ImageDetections {
                image_id: img.image_id.clone(),
                detections: kept.iter().map(|&i| img.detections[i].clone()).collect(),
            }
        })
        .collect();
    DetectionSet::from_images(images).expect("image ids unchanged by suppression")
}

/// Per-class PR curve and average precision under the VOC 2007 protocol.
///
/// Detections of the class are ranked by score across all images; each one
/// claims the unclaimed ground-truth box it overlaps most (at IoU >=
/// `iou_thresh`) or counts as a false positive. Difficult ground truth never
/// enters the recall denominator, and detections landing on difficult boxes
/// are ignored rather than penalized.
pub fn average_precision(
    detections: &DetectionSet,
    gt: &GroundTruthSet,
    class: &str,
    iou_thresh: f64,
    mode: ApMode,
) -> Result<PRCurve> {
    if !gt.classes().contains(class) {
        return Err(Error::UnknownClass(class.to_owned()));
    }

    struct GtBox {
        bbox: BoundingBox,
        difficult: bool,
        claimed: bool,
    }
    let mut gt_by_image: HashMap<&str, Vec<GtBox>> = HashMap::new();
    let mut positives = 0usize;
    for img in gt.images() {
        let boxes: Vec<GtBox> = img
            .objects
            .iter()
            .filter(|o| o.label.as_deref() == Some(class))
            .map(|o| {
                if !o.difficult {
                    positives += 1;
                }
                GtBox {
                    bbox: o.bbox,
                    difficult: o.difficult,
                    claimed: false,
                }
            })
            .collect();
        if !boxes.is_empty() {
            gt_by_image.insert(img.image_id.as_str(), boxes);
        }
    }

    let mut ranked: Vec<(&str, &BoundingBox, f64)> = Vec::new();
    for img in detections.images() {
        for d in &img.detections {
            if d.label == class {
                ranked.push((img.image_id.as_str(), &d.bbox, d.score));
            }
        }
    }
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2));

    let mut recall = Vec::new();
    let mut precision = Vec::new();
    let mut tp = 0usize;
    let mut fp = 0usize;
    for (image_id, bbox, _) in ranked {
        let mut best: Option<(usize, f64)> = None;
        if let Some(boxes) = gt_by_image.get_mut(image_id) {
            for (i, g) in boxes.iter().enumerate() {
                let v = iou(bbox, &g.bbox);
                if best.is_none_or(|(_, bv)| v > bv) {
                    best = Some((i, v));
                }
            }
            if let Some((i, v)) = best {
                if v >= iou_thresh {
                    if boxes[i].difficult {
                        continue; // neither TP nor FP
                    }
                    if !boxes[i].claimed {
                        boxes[i].claimed = true;
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                } else {
                    fp += 1;
                }
            } else {
                fp += 1;
            }
        } else {
            fp += 1;
        }
        recall.push(if positives == 0 {
            0.0
        } else {
            tp as f64 / positives as f64
        });
        precision.push(tp as f64 / (tp + fp) as f64);
    }

    let ap = match mode {
        ApMode::ElevenPoint => eleven_point_ap(&recall, &precision),
        ApMode::Continuous => continuous_ap(&recall, &precision),
    };
    Ok(PRCurve {
        recall,
        precision,
        ap,
    })
}

fn eleven_point_ap(recall: &[f64], precision: &[f64]) -> f64 {
    let mut total = 0.0;
    for level in 0..=10 {
        let r = level as f64 / 10.0;
        let p = recall
            .iter()
            .zip(precision)
            .filter(|(rec, _)| **rec >= r)
            .map(|(_, p)| *p)
            .fold(0.0, f64::max);
        total += p;
    }
    total / 11.0
}

fn continuous_ap(recall: &[f64], precision: &[f64]) -> f64 {
    // Precision envelope over recall, integrated stepwise.
    let mut points: Vec<(f64, f64)> = recall
        .iter()
        .copied()
        .zip(precision.iter().copied())
        .collect();
    points.push((1.0 + f64::EPSILON, 0.0));
    let mut envelope = vec![0.0; points.len()];
    let mut running = 0.0f64;
    for i in (0..points.len()).rev() {
        running = running.max(points[i].1);
        envelope[i] = running;
    }
    let mut ap = 0.0;
    let mut prev_r = 0.0;
    for (i, &(r, _)) in points.iter().enumerate() {
        if r > prev_r {
            ap += (r.min(1.0) - prev_r) * envelope[i];
            prev_r = r;
        }
    }
    ap
}

/// Arithmetic mean of per-class average precisions.
pub fn mean_ap(per_class: &[f64]) -> f64 {
    assert!(!per_class.is_empty(), "mean AP needs at least one class");
    per_class.iter().sum::<f64>() / per_class.len() as f64
}
