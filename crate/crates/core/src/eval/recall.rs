//! Ground-truth recall protocol: per-annotation best coverage over the
//! selected proposals, swept across requested proposal counts.
//!
//! Unlike repeatability this is not a one-to-one matching: one proposal may
//! cover several annotations and several proposals may cover one.

use crate::error::{Error, Result};
use crate::geometry::{iou, recall_at, recall_curve, recall_grid, RecallCurve};
use crate::io::{select_proposals, GroundTruthSet, ProposalSet, SelectionPolicy};

/// Recall curves and summary series over a list of requested counts.
#[derive(Debug, Clone)]
pub struct RecallReport {
    pub counts: Vec<usize>,
    /// Recall-versus-IoU curve over [0.5, 1] per requested count.
    pub curves: Vec<RecallCurve>,
    pub auc: Vec<f64>,
    pub recall_at_05: Vec<f64>,
    pub recall_at_08: Vec<f64>,
    /// Achieved proposals per image, averaged over the ground-truth image
    /// universe, per requested count.
    pub achieved_average: Vec<f64>,
    pub annotation_count: usize,
}

/// Best-coverage IoU for every annotation against one proposal list.
pub fn best_coverage(gt: &GroundTruthSet, proposals: &ProposalSet) -> Vec<f64> {
    let mut best = Vec::with_capacity(gt.total_annotations());
    for img in gt.images() {
        let props = proposals.get(&img.image_id);
        for obj in &img.objects {
            let v = props
                .map(|p| {
                    p.boxes
                        .iter()
                        .map(|b| iou(b, &obj.bbox))
                        .fold(0.0, f64::max)
                })
                .unwrap_or(0.0);
            best.push(v);
        }
    }
    best
}

/// Evaluate recall for each requested proposal count.
///
/// Images with annotations but no proposal entry count all their
/// annotations as unmatched; images with proposals but no annotations are
/// ignored.
pub fn evaluate_recall(
    gt: &GroundTruthSet,
    proposals: &ProposalSet,
    counts: &[usize],
    policy: SelectionPolicy,
) -> Result<RecallReport> {
    if gt.total_annotations() == 0 {
        return Err(Error::EmptyGroundTruth);
    }
    let grid = recall_grid();
    let mut report = RecallReport {
        counts: counts.to_vec(),
        curves: Vec::with_capacity(counts.len()),
        auc: Vec::with_capacity(counts.len()),
        recall_at_05: Vec::with_capacity(counts.len()),
        recall_at_08: Vec::with_capacity(counts.len()),
        achieved_average: Vec::with_capacity(counts.len()),
        annotation_count: gt.total_annotations(),
    };
    for &n in counts {
        let selected = select_proposals(proposals, n, policy)?;
        let best = best_coverage(gt, &selected);
        let curve = recall_curve(&best, &grid)?;
        report.auc.push(curve.auc);
        report.recall_at_05.push(recall_at(&best, 0.5));
        report.recall_at_08.push(recall_at(&best, 0.8));
        let achieved: usize = gt
            .images()
            .iter()
            .map(|img| selected.get(&img.image_id).map_or(0, |p| p.boxes.len()))
            .sum();
        report
            .achieved_average
            .push(achieved as f64 / gt.images().len() as f64);
        report.curves.push(curve);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingBox;
    use crate::io::{GtObject, ImageAnnotations, ImageProposals};

    fn bb(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundingBox {
        BoundingBox::new(x0, y0, x1, y1).unwrap()
    }

    fn gt_one_image(boxes: Vec<BoundingBox>) -> GroundTruthSet {
        GroundTruthSet::from_images(vec![ImageAnnotations {
            image_id: "a".into(),
            width: 640,
            height: 480,
            objects: boxes
                .into_iter()
                .map(|bbox| GtObject {
                    label: None,
                    bbox,
                    difficult: false,
                })
                .collect(),
        }])
        .unwrap()
    }

    fn props(boxes: Vec<BoundingBox>) -> ProposalSet {
        ProposalSet::from_images(
            "m",
            vec![ImageProposals {
                image_id: "a".into(),
                width: 640,
                height: 480,
                boxes,
            }],
        )
        .unwrap()
    }

    #[test]
    fn exact_proposals_give_unit_auc() {
        let boxes = vec![bb(0.0, 0.0, 50.0, 60.0), bb(100.0, 100.0, 300.0, 200.0)];
        let gt = gt_one_image(boxes.clone());
        let r = evaluate_recall(&gt, &props(boxes), &[10], SelectionPolicy::Auto).unwrap();
        assert_eq!(r.auc, vec![1.0]);
        assert_eq!(r.recall_at_05, vec![1.0]);
    }

    #[test]
    fn no_proposals_give_zero() {
        let gt = gt_one_image(vec![bb(0.0, 0.0, 50.0, 60.0)]);
        let r = evaluate_recall(&gt, &props(vec![]), &[10], SelectionPolicy::Auto).unwrap();
        assert_eq!(r.auc, vec![0.0]);
        assert_eq!(r.recall_at_05, vec![0.0]);
    }

    #[test]
    fn threshold_series_from_mixed_coverage() {
        // Coverage IoUs 0.55 and about 0.85: everything passes 0.5, half
        // passes 0.8.
        let gt = gt_one_image(vec![
            bb(0.0, 0.0, 100.0, 100.0),
            bb(200.0, 0.0, 300.0, 100.0),
        ]);
        let near_first = bb(0.0, 0.0, 100.0, 55.0); // IoU 0.55
        let near_second = bb(200.0, 0.0, 300.0, 85.5); // IoU 0.855
        let r = evaluate_recall(
            &gt,
            &props(vec![near_first, near_second]),
            &[10],
            SelectionPolicy::Auto,
        )
        .unwrap();
        assert_eq!(r.recall_at_05, vec![1.0]);
        assert_eq!(r.recall_at_08, vec![0.5]);
    }

    #[test]
    fn coverage_is_not_one_to_one() {
        // Two identical annotations and a single exact proposal: coverage
        // recall is 1 at every threshold.
        let b = bb(10.0, 10.0, 110.0, 110.0);
        let gt = gt_one_image(vec![b, b]);
        let r = evaluate_recall(&gt, &props(vec![b]), &[10], SelectionPolicy::Auto).unwrap();
        assert_eq!(r.auc, vec![1.0]);
    }

    #[test]
    fn monotone_in_nested_selection() {
        let gt = gt_one_image(vec![
            bb(0.0, 0.0, 64.0, 64.0),
            bb(200.0, 200.0, 300.0, 300.0),
        ]);
        // First-n selection is nested: recall can only grow with n.
        let all = vec![
            bb(400.0, 400.0, 500.0, 480.0),
            bb(0.0, 0.0, 64.0, 64.0),
            bb(200.0, 200.0, 300.0, 300.0),
        ];
        let r = evaluate_recall(&gt, &props(all), &[1, 2, 3], SelectionPolicy::FirstN).unwrap();
        for t in 0..r.curves[0].recall.len() {
            assert!(r.curves[0].recall[t] <= r.curves[1].recall[t]);
            assert!(r.curves[1].recall[t] <= r.curves[2].recall[t]);
        }
        assert!(r.recall_at_05[0] <= r.recall_at_05[1]);
        assert!(r.recall_at_05[1] <= r.recall_at_05[2]);
    }

    #[test]
    fn missing_proposal_image_counts_as_unmatched() {
        let gt = GroundTruthSet::from_images(vec![
            ImageAnnotations {
                image_id: "a".into(),
                width: 100,
                height: 100,
                objects: vec![GtObject {
                    label: None,
                    bbox: bb(0.0, 0.0, 50.0, 50.0),
                    difficult: false,
                }],
            },
            ImageAnnotations {
                image_id: "b".into(),
                width: 100,
                height: 100,
                objects: vec![GtObject {
                    label: None,
                    bbox: bb(0.0, 0.0, 50.0, 50.0),
                    difficult: false,
                }],
            },
        ])
        .unwrap();
        let proposals = ProposalSet::from_images(
            "m",
            vec![ImageProposals {
                image_id: "a".into(),
                width: 100,
                height: 100,
                boxes: vec![bb(0.0, 0.0, 50.0, 50.0)],
            }],
        )
        .unwrap();
        let r = evaluate_recall(&gt, &proposals, &[5], SelectionPolicy::Auto).unwrap();
        assert_eq!(r.recall_at_05, vec![0.5]);
        assert_eq!(r.achieved_average, vec![0.5]);
    }

    #[test]
    fn empty_ground_truth_is_an_error() {
        let gt = gt_one_image(vec![]);
        assert!(matches!(
            evaluate_recall(&gt, &props(vec![]), &[1], SelectionPolicy::Auto),
            Err(Error::EmptyGroundTruth)
        ));
    }
}
