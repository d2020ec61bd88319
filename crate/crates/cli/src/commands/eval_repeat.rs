//! `eval-repeatability`: how consistently a method proposes the same
//! windows on perturbed versions of an image.
//!
//! Two input shapes:
//! - built-in mode: decode the images, render each perturbation in memory,
//!   and run one of the baseline generators on both frames;
//! - external mode: consume proposal files produced by a third-party method
//!   on a `perturb` output tree, projecting through the recorded metadata.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use propeval::baselines::estimate_box_stats;
use propeval::eval::{
    match_with_image_size, BinnedBestIous, ProjectionMode, RepeatabilityAccumulator,
};
use propeval::geometry::{repeatability_grid, BoundingBox, SizeBinEdges};
use propeval::io::{GroundTruthSet, ProposalSet};
use propeval::perturb::{
    apply_perturbation, crop_for, perturbation_suite, CropRect, Perturbation, PerturbationKind,
};
use propeval::report::{format_float, write_curve_csv, CurveRow, MetaHeader};

use crate::commands::perturb::{load_meta, PerturbationMeta};
use crate::methods::{generate, BaselineMethod};
use crate::util::{derive_seed, list_images, load_rgb};

const RANGE_TRIM: f64 = 0.005;

pub struct BuiltinArgs<'a> {
    pub images: &'a Path,
    pub method: BaselineMethod,
    pub train_gt: Option<&'a Path>,
    pub n: usize,
    pub seed: Option<u64>,
    pub kinds: Vec<PerturbationKind>,
    pub mode: ProjectionMode,
    pub out: &'a Path,
}

pub struct ExternalArgs<'a> {
    pub reference: &'a Path,
    pub perturbed_dir: &'a Path,
    pub meta: &'a Path,
    pub method_name: String,
    pub n: usize,
    pub mode: ProjectionMode,
    pub out: &'a Path,
}

#[derive(Serialize)]
struct SpecSummary {
    kind: String,
    param: String,
    auc: Option<f64>,
    reference_count: usize,
    perturbed_count: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    method: &'a str,
    n: usize,
    specs: Vec<SpecSummary>,
}

/// Accumulated outcome per perturbation grid point, in suite order.
type SpecResults = Vec<(Perturbation, RepeatabilityAccumulator)>;

pub fn run_builtin(args: &BuiltinArgs) -> Result<()> {
    if args.method.is_stochastic() && args.seed.is_none() {
        bail!(
            "--seed is required for the {} baseline",
            args.method.as_str()
        );
    }
    let stats = match (args.method.is_stochastic(), args.train_gt) {
        (true, None) => bail!(
            "--train-gt is required for the {} baseline",
            args.method.as_str()
        ),
        (true, Some(path)) => {
            let train = GroundTruthSet::load_jsonl(path)?;
            Some(estimate_box_stats(&train, RANGE_TRIM, true)?)
        }
        (false, _) => None,
    };
    let seed = args.seed.unwrap_or(0);
    let images = list_images(args.images)?;
    let specs: Vec<Perturbation> = args
        .kinds
        .iter()
        .flat_map(|&k| perturbation_suite(k))
        .collect();

    let per_image: Vec<Result<Vec<BinnedBestIous>>> = images
        .par_iter()
        .map(|entry| -> Result<Vec<BinnedBestIous>> {
            let img = load_rgb(&entry.path)?;
            let (w, h) = (img.width(), img.height());
            let edges = SizeBinEdges::for_image(w as f64, h as f64);
            let reference = cut(
                generate(
                    args.method,
                    w,
                    h,
                    Some(&img),
                    stats.as_ref(),
                    args.n,
                    derive_seed(seed, &entry.image_id, "reference"),
                )?,
                args.n,
            );
            specs
                .iter()
                .map(|spec| {
                    let rendered = apply_perturbation(&img, spec);
                    // Random methods stay random across grid points: each
                    // (image, spec) cell draws its own stream.
                    let role = format!("{}/{}", spec.kind().as_str(), spec.param_label());
                    let perturbed = cut(
                        generate(
                            args.method,
                            rendered.width(),
                            rendered.height(),
                            Some(&rendered),
                            stats.as_ref(),
                            args.n,
                            derive_seed(seed, &entry.image_id, &role),
                        )?,
                        args.n,
                    );
                    let crop = crop_for(spec, w, h);
                    Ok(match_with_image_size(
                        &reference,
                        &perturbed,
                        spec,
                        crop.as_ref(),
                        w as f64,
                        h as f64,
                        &edges,
                        args.mode,
                    )?)
                })
                .collect()
        })
        .collect();

    let mut accumulators: SpecResults = specs
        .iter()
        .map(|s| (*s, RepeatabilityAccumulator::new()))
        .collect();
    let mut failures = Vec::new();
    for (entry, result) in images.iter().zip(per_image) {
        match result {
            Ok(binned) => {
                for ((_, acc), b) in accumulators.iter_mut().zip(&binned) {
                    acc.add(b);
                }
            }
            Err(e) => failures.push(format!("{}: {e:#}", entry.image_id)),
        }
    }
    if !failures.is_empty() {
        bail!(
            "{} image(s) failed:\n{}",
            failures.len(),
            failures.join("\n")
        );
    }
    write_outputs(
        args.method.as_str(),
        args.n,
        args.seed,
        &accumulators,
        args.out,
    )
}

fn cut(mut boxes: Vec<BoundingBox>, n: usize) -> Vec<BoundingBox> {
    boxes.truncate(n);
    boxes
}

pub fn run_external(args: &ExternalArgs) -> Result<()> {
    let reference = ProposalSet::load_jsonl(args.reference, args.method_name.clone())?;
    let reference =
        propeval::io::select_proposals(&reference, args.n, propeval::io::SelectionPolicy::Auto)?;
    let meta = load_meta(args.meta)?;
    // (kind, param) -> image_id -> metadata
    let mut by_spec: BTreeMap<(String, String), BTreeMap<String, &PerturbationMeta>> =
        BTreeMap::new();
    for m in &meta {
        by_spec
            .entry((m.kind.clone(), m.param.clone()))
            .or_default()
            .insert(m.image_id.clone(), m);
    }

    let mut accumulators: SpecResults = Vec::new();
    for ((kind, param), image_meta) in &by_spec {
        let spec =
            Perturbation::from_kind_and_label(kind.parse().map_err(anyhow::Error::msg)?, param)?;
        let file = args.perturbed_dir.join(kind).join(format!("{param}.jsonl"));
        if !file.exists() {
            log::warn!("no proposal file for {kind}/{param}, skipping");
            continue;
        }
        let perturbed = ProposalSet::load_jsonl(&file, args.method_name.clone())
            .with_context(|| format!("loading {}", file.display()))?;
        let perturbed = propeval::io::select_proposals(
            &perturbed,
            args.n,
            propeval::io::SelectionPolicy::Auto,
        )?;
        let mut acc = RepeatabilityAccumulator::new();
        for img in reference.images() {
            let Some(m) = image_meta.get(&img.image_id) else {
                log::warn!(
                    "no metadata for image '{}' under {kind}/{param}",
                    img.image_id
                );
                continue;
            };
            let crop: Option<CropRect> = m.crop.map(|[x0, y0, x1, y1]| {
                CropRect::from_rect(BoundingBox::new(x0, y0, x1, y1).expect("valid crop"))
            });
            let empty = Vec::new();
            let pert_boxes = perturbed
                .get(&img.image_id)
                .map(|p| &p.boxes)
                .unwrap_or(&empty);
            let edges = SizeBinEdges::for_image(m.ref_width as f64, m.ref_height as f64);
            acc.add(&match_with_image_size(
                &img.boxes,
                pert_boxes,
                &spec,
                crop.as_ref(),
                m.ref_width as f64,
                m.ref_height as f64,
                &edges,
                args.mode,
            )?);
        }
        accumulators.push((spec, acc));
    }
    write_outputs(&args.method_name, args.n, None, &accumulators, args.out)
}

fn write_outputs(
    method: &str,
    n: usize,
    seed: Option<u64>,
    results: &SpecResults,
    out: &Path,
) -> Result<()> {
    let grid = repeatability_grid();
    let meta = |family: &str| {
        let mut m = MetaHeader::new(family)
            .with("method", method)
            .with("n", n.to_string())
            .with("iou_grid", "0.0..1.0 step 0.025")
            .with("size_bins", "10 log sqrt-area 10..diagonal");
        if let Some(seed) = seed {
            m.push("seed", seed.to_string());
        }
        m
    };

    let mut curve_rows = Vec::new();
    let mut auc_rows = Vec::new();
    let mut summaries = Vec::new();
    for (spec, acc) in results {
        let r = acc.result(&grid);
        if let Some(mean_recall) = &r.mean_recall {
            for (t, v) in grid.iter().zip(mean_recall) {
                curve_rows.push(CurveRow {
                    method: method.to_owned(),
                    spec_kind: spec.kind().as_str().to_owned(),
                    spec_param: spec.param_label(),
                    n: Some(n),
                    x: *t,
                    value: *v,
                });
            }
        }
        if let Some(auc) = r.mean_auc {
            auc_rows.push(CurveRow {
                method: method.to_owned(),
                spec_kind: spec.kind().as_str().to_owned(),
                spec_param: spec.param_label(),
                n: Some(n),
                x: spec.plot_position(),
                value: auc,
            });
        }
        summaries.push(SpecSummary {
            kind: spec.kind().as_str().to_owned(),
            param: spec.param_label(),
            auc: r.mean_auc,
            reference_count: r.reference_count,
            perturbed_count: r.perturbed_count,
        });
        if let Some(auc) = r.mean_auc {
            log::info!(
                "{}/{}: repeatability {}",
                spec.kind().as_str(),
                spec.param_label(),
                format_float(auc)
            );
        }
    }
    write_curve_csv(
        &out.join("repeatability_curves.csv"),
        &meta("repeatability_curves"),
        &curve_rows,
    )?;
    write_curve_csv(
        &out.join("repeatability_auc.csv"),
        &meta("repeatability_auc"),
        &auc_rows,
    )?;
    let summary = Summary {
        method,
        n,
        specs: summaries,
    };
    propeval::report::write_text(
        &out.join("summary.json"),
        &format!("{}\n", serde_json::to_string_pretty(&summary)?),
    )?;
    Ok(())
}
