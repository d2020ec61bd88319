//! `baseline`: run one of the built-in proposal generators over a dataset
//! and write a proposal JSONL file.

use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use propeval::baselines::estimate_box_stats;
use propeval::io::{GroundTruthSet, ImageProposals, ProposalSet};

use crate::methods::{generate, BaselineMethod};
use crate::util::{derive_seed, list_images, load_rgb};

/// Fraction trimmed per side when fitting parameter ranges.
const RANGE_TRIM: f64 = 0.005;

pub struct BaselineArgs<'a> {
    pub method: BaselineMethod,
    pub images: Option<&'a Path>,
    pub sizes_from: Option<&'a Path>,
    pub train_gt: Option<&'a Path>,
    pub n: usize,
    pub seed: Option<u64>,
    pub out: &'a Path,
}

pub fn run(args: &BaselineArgs) -> Result<()> {
    let method = args.method;
    if method.is_stochastic() && args.seed.is_none() {
        bail!("--seed is required for the {} baseline", method.as_str());
    }
    let stats = match (method.is_stochastic(), args.train_gt) {
        (true, None) => bail!(
            "--train-gt is required for the {} baseline",
            method.as_str()
        ),
        (true, Some(path)) => {
            let train = GroundTruthSet::load_jsonl(path)
                .with_context(|| format!("loading training annotations {}", path.display()))?;
            Some(estimate_box_stats(&train, RANGE_TRIM, true)?)
        }
        (false, _) => None,
    };
    let seed = args.seed.unwrap_or(0);

    // Two input shapes: decoded images, or just (id, size) pairs from an
    // annotation file for the content-independent generators.
    let units: Vec<(String, u32, u32, Option<std::path::PathBuf>)> =
        match (args.images, args.sizes_from) {
            (Some(dir), _) => list_images(dir)?
                .into_iter()
                .map(|e| {
                    let dims = image::image_dimensions(&e.path)
                        .with_context(|| format!("reading dimensions of {}", e.path.display()))?;
                    Ok((e.image_id, dims.0, dims.1, Some(e.path)))
                })
                .collect::<Result<_>>()?,
            (None, Some(gt_path)) => {
                if method.needs_pixels() {
                    bail!(
                        "the {} baseline needs --images, not --sizes-from",
                        method.as_str()
                    );
                }
                let gt = GroundTruthSet::load_jsonl(gt_path)
                    .with_context(|| format!("loading {}", gt_path.display()))?;
                gt.images()
                    .iter()
                    .map(|img| (img.image_id.clone(), img.width, img.height, None))
                    .collect()
            }
            (None, None) => bail!("either --images or --sizes-from is required"),
        };

    let per_image: Vec<Result<ImageProposals>> = units
        .par_iter()
        .map(|(image_id, width, height, path)| {
            let pixels = match path {
                Some(p) if method.needs_pixels() => Some(load_rgb(p)?),
                _ => None,
            };
            let boxes = generate(
                method,
                *width,
                *height,
                pixels.as_ref(),
                stats.as_ref(),
                args.n,
                derive_seed(seed, image_id, "baseline"),
            )?;
            Ok(ImageProposals {
                image_id: image_id.clone(),
                width: *width,
                height: *height,
                boxes,
            })
        })
        .collect();

    let mut images = Vec::with_capacity(per_image.len());
    let mut failures = Vec::new();
    for (unit, result) in units.iter().zip(per_image) {
        match result {
            Ok(p) => images.push(p),
            Err(e) => failures.push(format!("{}: {e:#}", unit.0)),
        }
    }
    if !failures.is_empty() {
        bail!(
            "{} image(s) failed:\n{}",
            failures.len(),
            failures.join("\n")
        );
    }

    let set = ProposalSet::from_images(method.as_str(), images)?;
    if let Some(parent) = args.out.parent() {
        std::fs::create_dir_all(parent)?;
    }
    set.save_jsonl(args.out)?;
    log::info!(
        "{}: {} proposals over {} images ({:.1}/image) -> {}",
        method.as_str(),
        set.total_boxes(),
        set.images().len(),
        set.average_per_image(),
        args.out.display()
    );
    Ok(())
}
