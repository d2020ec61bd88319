//! `eval-detection`: filter raw detections by proposal overlap, suppress
//! non-maxima, and score per-class average precision.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use propeval::detect::{average_precision, filter_by_proposals, mean_ap, nms, ApMode};
use propeval::io::{load_ground_truth, DetectionSet, GroundTruthFormat, ProposalSet};
use propeval::report::{render_ap_csv, render_pr_csv, write_text, MetaHeader};

pub struct DetectArgs<'a> {
    pub gt: &'a Path,
    pub format: GroundTruthFormat,
    pub detections: &'a Path,
    pub proposals: &'a Path,
    pub method_name: String,
    pub min_iou: f64,
    pub nms_overlap: f64,
    pub ap_mode: ApMode,
    pub count_difficult: bool,
    pub out: &'a Path,
}

#[derive(Serialize)]
struct Summary<'a> {
    method: &'a str,
    map: f64,
    per_class: Vec<(String, f64)>,
    raw_detections: usize,
    after_filter: usize,
    after_nms: usize,
}

pub fn run(args: &DetectArgs) -> Result<()> {
    let mut gt = load_ground_truth(args.gt, args.format)
        .with_context(|| format!("loading ground truth {}", args.gt.display()))?;
    if args.count_difficult {
        gt = clear_difficult_flags(&gt);
    }
    let detections = DetectionSet::load_jsonl(args.detections)
        .with_context(|| format!("loading detections {}", args.detections.display()))?;
    let proposals = ProposalSet::load_jsonl(args.proposals, args.method_name.clone())
        .with_context(|| format!("loading proposals {}", args.proposals.display()))?;

    let raw = detections.total_detections();
    let filtered = filter_by_proposals(&detections, &proposals, args.min_iou);
    let after_filter = filtered.total_detections();
    let suppressed = nms(&filtered, args.nms_overlap);
    let after_nms = suppressed.total_detections();

    let classes = gt.classes();
    let mut per_class = Vec::with_capacity(classes.len());
    let mut pr_curves = Vec::with_capacity(classes.len());
    for class in &classes {
        let pr = average_precision(&suppressed, &gt, class, 0.5, args.ap_mode)?;
        per_class.push((class.clone(), pr.ap));
        pr_curves.push((class.clone(), pr.recall, pr.precision));
    }
    let aps: Vec<f64> = per_class.iter().map(|(_, ap)| *ap).collect();
    let map = mean_ap(&aps);

    let meta = |family: &str| {
        MetaHeader::new(family)
            .with("method", args.method_name.as_str())
            .with("min_iou", propeval::report::format_float(args.min_iou))
            .with(
                "nms_overlap",
                propeval::report::format_float(args.nms_overlap),
            )
            .with(
                "ap",
                match args.ap_mode {
                    ApMode::ElevenPoint => "voc2007-11point",
                    ApMode::Continuous => "continuous",
                },
            )
    };
    write_text(
        &args.out.join("ap_report.csv"),
        &render_ap_csv(&meta("detection_ap"), &per_class, map),
    )?;
    write_text(
        &args.out.join("pr_curves.csv"),
        &render_pr_csv(&meta("detection_pr"), &pr_curves),
    )?;
    let summary = Summary {
        method: &args.method_name,
        map,
        per_class,
        raw_detections: raw,
        after_filter,
        after_nms,
    };
    write_text(
        &args.out.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    log::info!(
        "mAP {} over {} classes ({} raw -> {} filtered -> {} kept)",
        propeval::report::format_float(map),
        classes.len(),
        raw,
        after_filter,
        after_nms
    );
    Ok(())
}

fn clear_difficult_flags(gt: &propeval::io::GroundTruthSet) -> propeval::io::GroundTruthSet {
    let images = gt
        .images()
        .iter()
        .map(|img| propeval::io::ImageAnnotations {
            image_id: img.image_id.clone(),
            width: img.width,
            height: img.height,
            objects: img
                .objects
                .iter()
                .map(|o| propeval::io::GtObject {
                    label: o.label.clone(),
                    bbox: o.bbox,
                    difficult: false,
                })
                .collect(),
        })
        .collect();
    propeval::io::GroundTruthSet::from_images(images).expect("ids unchanged")
}
