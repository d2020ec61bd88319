//! `perturb`: render the perturbation suites of a set of images into an
//! on-disk tree plus projection metadata, so external proposal methods can
//! run on the perturbed images and have their output projected back later.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use propeval::perturb::{
    apply_perturbation, crop_for, perturbation_suite, Perturbation, PerturbationKind,
};

use crate::util::{list_images, load_rgb, ImageEntry};

/// One metadata line per emitted image: everything a later projection needs.
#[derive(Debug, Serialize, Deserialize)]
pub struct PerturbationMeta {
    pub image_id: String,
    pub kind: String,
    pub param: String,
    pub ref_width: u32,
    pub ref_height: u32,
    pub out_width: u32,
    pub out_height: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crop: Option<[f64; 4]>,
}

pub fn parse_kinds(text: &str) -> Result<Vec<PerturbationKind>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<PerturbationKind>()
                .map_err(anyhow::Error::msg)
        })
        .collect()
}

pub fn run(images_dir: &Path, kinds: &[PerturbationKind], out: &Path) -> Result<()> {
    let images = list_images(images_dir)?;
    std::fs::create_dir_all(out)
        .with_context(|| format!("creating output directory {}", out.display()))?;

    let specs: Vec<Perturbation> = kinds.iter().flat_map(|&k| perturbation_suite(k)).collect();

    let results: Vec<(String, Result<Vec<PerturbationMeta>>)> = images
        .par_iter()
        .map(|entry| (entry.image_id.clone(), perturb_one(entry, &specs, out)))
        .collect();

    let mut failures = Vec::new();
    let meta_path = out.join("perturbations.jsonl");
    let mut meta_file = std::io::BufWriter::new(
        std::fs::File::create(&meta_path)
            .with_context(|| format!("creating {}", meta_path.display()))?,
    );
    for (image_id, result) in results {
        match result {
            Ok(records) => {
                for record in records {
                    writeln!(meta_file, "{}", serde_json::to_string(&record)?)?;
                }
            }
            Err(e) => failures.push(format!("{image_id}: {e:#}")),
        }
    }
    meta_file.flush()?;
    if !failures.is_empty() {
        bail!(
            "{} image(s) failed:\n{}",
            failures.len(),
            failures.join("\n")
        );
    }
    log::info!(
        "perturbed {} images x {} grid points into {}",
        images.len(),
        specs.len(),
        out.display()
    );
    Ok(())
}

fn perturb_one(
    entry: &ImageEntry,
    specs: &[Perturbation],
    out: &Path,
) -> Result<Vec<PerturbationMeta>> {
    let img = load_rgb(&entry.path)?;
    let (rw, rh) = (img.width(), img.height());
    let mut records = Vec::with_capacity(specs.len());
    for spec in specs {
        let rendered = apply_perturbation(&img, spec);
        let dir = out.join(spec.kind().as_str()).join(spec.param_label());
        std::fs::create_dir_all(&dir)?;
        let path: PathBuf = dir.join(format!("{}.png", entry.image_id));
        rendered
            .save(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        let crop = crop_for(spec, rw, rh);
        records.push(PerturbationMeta {
            image_id: entry.image_id.clone(),
            kind: spec.kind().as_str().to_owned(),
            param: spec.param_label(),
            ref_width: rw,
            ref_height: rh,
            out_width: rendered.width(),
            out_height: rendered.height(),
            crop: crop.map(|c| [c.rect().x0(), c.rect().y0(), c.rect().x1(), c.rect().y1()]),
        });
    }
    Ok(records)
}

/// Load the metadata emitted by [`run`].
pub fn load_meta(path: &Path) -> Result<Vec<PerturbationMeta>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).context("parsing perturbation metadata"))
        .collect()
}
