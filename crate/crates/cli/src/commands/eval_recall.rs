//! `eval-recall`: ground-truth coverage of a proposal file across requested
//! proposal counts, with CSV curve families and a JSON summary.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use propeval::eval::evaluate_recall;
use propeval::io::{
    apply_blacklist, load_ground_truth, Blacklist, GroundTruthFormat, ProposalSet, SelectionPolicy,
};
use propeval::report::{write_curve_csv, CurveRow, MetaHeader};

pub struct RecallArgs<'a> {
    pub gt: &'a Path,
    pub format: GroundTruthFormat,
    pub proposals: &'a Path,
    pub method_name: String,
    pub counts: Vec<usize>,
    pub policy: SelectionPolicy,
    pub blacklist: Option<&'a Path>,
    pub exclude_difficult: bool,
    pub out: &'a Path,
}

#[derive(Serialize)]
struct Summary<'a> {
    method: &'a str,
    annotation_count: usize,
    counts: &'a [usize],
    auc: &'a [f64],
    recall_at_05: &'a [f64],
    recall_at_08: &'a [f64],
    achieved_average: &'a [f64],
}

pub fn parse_format(text: &str) -> Result<GroundTruthFormat> {
    match text {
        "jsonl" => Ok(GroundTruthFormat::Jsonl),
        "voc-xml-dir" => Ok(GroundTruthFormat::VocXmlDir),
        other => anyhow::bail!("unknown ground-truth format '{other}'"),
    }
}

pub fn run(args: &RecallArgs) -> Result<()> {
    let mut gt = load_ground_truth(args.gt, args.format)
        .with_context(|| format!("loading ground truth {}", args.gt.display()))?;
    if let Some(path) = args.blacklist {
        let bl = Blacklist::load_csv(path)
            .with_context(|| format!("loading blacklist {}", path.display()))?;
        gt = apply_blacklist(&gt, &bl);
    }
    if args.exclude_difficult {
        gt = keep_non_difficult(&gt);
    }
    let proposals = ProposalSet::load_jsonl(args.proposals, args.method_name.clone())
        .with_context(|| format!("loading proposals {}", args.proposals.display()))?;

    let report = evaluate_recall(&gt, &proposals, &args.counts, args.policy)?;

    let policy_name = match args.policy {
        SelectionPolicy::TopScore => "top-score",
        SelectionPolicy::FirstN => "first-n",
        SelectionPolicy::Auto => "auto",
    };
    let meta = |family: &str| {
        MetaHeader::new(family)
            .with("method", args.method_name.as_str())
            .with("policy", policy_name)
            .with("iou_grid", "0.5..1.0 step 0.025")
            .with(
                "counts",
                args.counts
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            )
    };

    let mut curve_rows = Vec::new();
    for (i, n) in report.counts.iter().enumerate() {
        for (t, r) in report.curves[i]
            .thresholds
            .iter()
            .zip(&report.curves[i].recall)
        {
            curve_rows.push(CurveRow {
                method: args.method_name.clone(),
                spec_kind: String::new(),
                spec_param: String::new(),
                n: Some(*n),
                x: *t,
                value: *r,
            });
        }
    }
    write_curve_csv(
        &args.out.join("recall_curves.csv"),
        &meta("recall_curves"),
        &curve_rows,
    )?;

    let series = [
        ("recall_auc_vs_n.csv", "recall_auc_vs_n", &report.auc),
        (
            "recall_at_05_vs_n.csv",
            "recall_at_05_vs_n",
            &report.recall_at_05,
        ),
        (
            "recall_at_08_vs_n.csv",
            "recall_at_08_vs_n",
            &report.recall_at_08,
        ),
    ];
    for (file, family, values) in series {
        let rows: Vec<CurveRow> = report
            .counts
            .iter()
            .zip(values.iter())
            .map(|(n, v)| CurveRow {
                method: args.method_name.clone(),
                spec_kind: String::new(),
                spec_param: String::new(),
                n: Some(*n),
                x: *n as f64,
                value: *v,
            })
            .collect();
        write_curve_csv(&args.out.join(file), &meta(family), &rows)?;
    }

    let summary = Summary {
        method: &args.method_name,
        annotation_count: report.annotation_count,
        counts: &report.counts,
        auc: &report.auc,
        recall_at_05: &report.recall_at_05,
        recall_at_08: &report.recall_at_08,
        achieved_average: &report.achieved_average,
    };
    propeval::report::write_text(
        &args.out.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    log::info!(
        "recall of '{}': auc {:?} over n {:?}",
        args.method_name,
        report.auc,
        report.counts
    );
    Ok(())
}

fn keep_non_difficult(gt: &propeval::io::GroundTruthSet) -> propeval::io::GroundTruthSet {
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
                .filter(|o| !o.difficult)
                .cloned()
                .collect(),
        })
        .collect();
    propeval::io::GroundTruthSet::from_images(images).expect("ids unchanged")
}
