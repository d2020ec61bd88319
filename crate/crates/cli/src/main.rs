//! Command-line surface of the proposal evaluation harness.

mod commands;
mod config;
mod methods;
mod svg;
mod util;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use propeval::detect::ApMode;
use propeval::eval::ProjectionMode;
use propeval::io::SelectionPolicy;

use commands::{baseline, eval_detect, eval_recall, eval_repeat, perturb, report};
use config::{pick, require, FileConfig};
use methods::BaselineMethod;

#[derive(Parser)]
#[command(
    name = "propeval",
    version,
    about = "Evaluate class-agnostic detection proposals: repeatability, recall, detection impact"
)]
struct Cli {
    /// TOML run configuration; command-line flags win over file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads (default: PROPEVAL_THREADS env var, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render perturbation suites of an image directory into a tree plus
    /// projection metadata.
    Perturb {
        /// Directory of reference images (png/jpg).
        #[arg(long)]
        images: Option<PathBuf>,
        /// Comma-separated kinds: none,scale,blur,rotation,illumination,jpeg.
        #[arg(long)]
        kinds: Option<String>,
        /// Output directory (tree: <kind>/<param>/<image_id>.png).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate proposals with one of the built-in baselines.
    Baseline {
        /// uniform | gaussian | sliding-window | superpixels.
        #[arg(long, value_enum)]
        method: Option<BaselineMethod>,
        /// Directory of images to propose on.
        #[arg(long)]
        images: Option<PathBuf>,
        /// Take image ids and sizes from a ground-truth JSONL instead of
        /// decoding images (content-independent baselines only).
        #[arg(long)]
        sizes_from: Option<PathBuf>,
        /// Training annotations (JSONL) for the uniform/gaussian statistics.
        #[arg(long)]
        train_gt: Option<PathBuf>,
        /// Requested proposals per image.
        #[arg(long)]
        n: Option<usize>,
        /// RNG seed; required for uniform/gaussian.
        #[arg(long)]
        seed: Option<u64>,
        /// Output proposal JSONL.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground-truth recall of a proposal file.
    EvalRecall {
        #[arg(long)]
        gt: Option<PathBuf>,
        /// jsonl | voc-xml-dir.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        proposals: Option<PathBuf>,
        /// Method name recorded in the reports (default: proposal file stem).
        #[arg(long)]
        method_name: Option<String>,
        /// Comma-separated requested counts.
        #[arg(long)]
        n_list: Option<String>,
        /// top-score | first-n | auto.
        #[arg(long)]
        policy: Option<String>,
        /// CSV of image_id,class pairs excluded from recall counting.
        #[arg(long)]
        blacklist: Option<PathBuf>,
        /// Drop difficult-flagged annotations from the recall denominator.
        #[arg(long)]
        exclude_difficult: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeatability of a method under the perturbation suites.
    EvalRepeatability {
        /// Built-in mode: directory of reference images.
        #[arg(long)]
        images: Option<PathBuf>,
        /// Built-in mode: baseline to run on both frames.
        #[arg(long, value_enum)]
        method: Option<BaselineMethod>,
        /// Training annotations for uniform/gaussian.
        #[arg(long)]
        train_gt: Option<PathBuf>,
        /// External mode: reference proposals JSONL.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// External mode: directory of <kind>/<param>.jsonl proposal files.
        #[arg(long)]
        perturbed_dir: Option<PathBuf>,
        /// External mode: perturbations.jsonl from the perturb command.
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Method name for reports in external mode.
        #[arg(long)]
        method_name: Option<String>,
        /// Requested proposals per image.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated kinds (built-in mode).
        #[arg(long)]
        kinds: Option<String>,
        /// Match rotated windows by their axis-aligned hull instead of the
        /// exact polygon.
        #[arg(long)]
        axis_aligned_projection: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filter detections by proposals, suppress non-maxima, and score AP.
    EvalDetection {
        #[arg(long)]
        gt: Option<PathBuf>,
        /// jsonl | voc-xml-dir.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        detections: Option<PathBuf>,
        #[arg(long)]
        proposals: Option<PathBuf>,
        #[arg(long)]
        method_name: Option<String>,
        /// Keep detections overlapping a proposal by more than this IoU.
        #[arg(long)]
        min_iou: Option<f64>,
        /// Suppression overlap threshold.
        #[arg(long)]
        nms_overlap: Option<f64>,
        /// Integrate the full precision envelope instead of the VOC2007
        /// 11-point rule.
        #[arg(long)]
        continuous_ap: bool,
        /// Treat difficult annotations as ordinary positives.
        #[arg(long)]
        count_difficult: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render SVG charts from a directory of emitted CSVs.
    Report {
        /// Directory containing the evaluation CSVs.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let cfg = FileConfig::load(cli.config.as_deref())?;
    let threads = util::resolve_threads(pick(cli.threads, cfg.threads));
    let pool = util::thread_pool(threads)?;
    pool.install(|| dispatch(cli.command, cfg))
}

fn dispatch(command: Command, cfg: FileConfig) -> Result<()> {
    match command {
        Command::Perturb { images, kinds, out } => {
            let images = require(images, cfg.perturb.images, "images")?;
            let kinds_text = pick(kinds, cfg.perturb.kinds)
                .unwrap_or_else(|| "scale,blur,rotation,illumination,jpeg".into());
            let kinds = perturb::parse_kinds(&kinds_text)?;
            let out = require(out, cfg.perturb.out, "out")?;
            perturb::run(&images, &kinds, &out)
        }
        Command::Baseline {
            method,
            images,
            sizes_from,
            train_gt,
            n,
            seed,
            out,
        } => {
            let method = match (method, cfg.baseline.method) {
                (Some(m), _) => m,
                (None, Some(name)) => BaselineMethod::parse(&name)?,
                (None, None) => bail!("--method is required (flag or config file)"),
            };
            let images = pick(images, cfg.baseline.images);
            let sizes_from = pick(sizes_from, cfg.baseline.sizes_from);
            let train_gt = pick(train_gt, cfg.baseline.train_gt);
            let out = require(out, cfg.baseline.out, "out")?;
            baseline::run(&baseline::BaselineArgs {
                method,
                images: images.as_deref(),
                sizes_from: sizes_from.as_deref(),
                train_gt: train_gt.as_deref(),
                n: pick(n, cfg.baseline.n).unwrap_or(1000),
                seed: pick(seed, cfg.baseline.seed),
                out: &out,
            })
        }
        Command::EvalRecall {
            gt,
            format,
            proposals,
            method_name,
            n_list,
            policy,
            blacklist,
            exclude_difficult,
            out,
        } => {
            let gt = require(gt, cfg.eval_recall.gt, "gt")?;
            let format = eval_recall::parse_format(
                &pick(format, cfg.eval_recall.format).unwrap_or_else(|| "jsonl".into()),
            )?;
            let proposals = require(proposals, cfg.eval_recall.proposals, "proposals")?;
            let method_name = pick(method_name, cfg.eval_recall.method_name)
                .unwrap_or_else(|| file_stem(&proposals));
            let counts = util::parse_counts(
                &pick(n_list, cfg.eval_recall.n_list).unwrap_or_else(|| "100,1000,10000".into()),
            )?;
            let policy: SelectionPolicy = pick(policy, cfg.eval_recall.policy)
                .unwrap_or_else(|| "auto".into())
                .parse()
                .map_err(anyhow::Error::msg)?;
            let blacklist = pick(blacklist, cfg.eval_recall.blacklist);
            let out = require(out, cfg.eval_recall.out, "out")?;
            eval_recall::run(&eval_recall::RecallArgs {
                gt: &gt,
                format,
                proposals: &proposals,
                method_name,
                counts,
                policy,
                blacklist: blacklist.as_deref(),
                exclude_difficult,
                out: &out,
            })
        }
        Command::EvalRepeatability {
            images,
            method,
            train_gt,
            reference,
            perturbed_dir,
            meta,
            method_name,
            n,
            seed,
            kinds,
            axis_aligned_projection,
            out,
        } => {
            let mode = if axis_aligned_projection {
                ProjectionMode::AxisAlignedHull
            } else {
                ProjectionMode::TruePolygon
            };
            let n = pick(n, cfg.eval_repeatability.n).unwrap_or(1000);
            let out = require(out, cfg.eval_repeatability.out, "out")?;
            let images = pick(images, cfg.eval_repeatability.images);
            if let Some(images) = images {
                let method = match (method, cfg.eval_repeatability.method) {
                    (Some(m), _) => m,
                    (None, Some(name)) => BaselineMethod::parse(&name)?,
                    (None, None) => bail!("--method is required in built-in mode"),
                };
                let kinds_text = pick(kinds, cfg.eval_repeatability.kinds)
                    .unwrap_or_else(|| "none,scale,blur,rotation,illumination,jpeg".into());
                eval_repeat::run_builtin(&eval_repeat::BuiltinArgs {
                    images: &images,
                    method,
                    train_gt: train_gt.as_deref(),
                    n,
                    seed: pick(seed, cfg.eval_repeatability.seed),
                    kinds: perturb::parse_kinds(&kinds_text)?,
                    mode,
                    out: &out,
                })
            } else {
                let reference = require(reference, cfg.eval_repeatability.reference, "reference")?;
                let perturbed_dir = require(
                    perturbed_dir,
                    cfg.eval_repeatability.perturbed_dir,
                    "perturbed-dir",
                )?;
                let meta = require(meta, cfg.eval_repeatability.meta, "meta")?;
                let method_name = method_name.unwrap_or_else(|| file_stem(&reference));
                eval_repeat::run_external(&eval_repeat::ExternalArgs {
                    reference: &reference,
                    perturbed_dir: &perturbed_dir,
                    meta: &meta,
                    method_name,
                    n,
                    mode,
                    out: &out,
                })
            }
        }
        Command::EvalDetection {
            gt,
            format,
            detections,
            proposals,
            method_name,
            min_iou,
            nms_overlap,
            continuous_ap,
            count_difficult,
            out,
        } => {
            let gt = require(gt, cfg.eval_detection.gt, "gt")?;
            let format = eval_recall::parse_format(
                &pick(format, cfg.eval_detection.format).unwrap_or_else(|| "jsonl".into()),
            )?;
            let detections = require(detections, cfg.eval_detection.detections, "detections")?;
            let proposals = require(proposals, cfg.eval_detection.proposals, "proposals")?;
            let method_name = method_name.unwrap_or_else(|| file_stem(&proposals));
            let out = require(out, cfg.eval_detection.out, "out")?;
            eval_detect::run(&eval_detect::DetectArgs {
                gt: &gt,
                format,
                detections: &detections,
                proposals: &proposals,
                method_name,
                min_iou: pick(min_iou, cfg.eval_detection.min_iou).unwrap_or(0.8),
                nms_overlap: pick(nms_overlap, cfg.eval_detection.nms_overlap).unwrap_or(0.5),
                ap_mode: if continuous_ap {
                    ApMode::Continuous
                } else {
                    ApMode::ElevenPoint
                },
                count_difficult,
                out: &out,
            })
        }
        Command::Report { input, out } => {
            let input = input.context("--input is required")?;
            let out = out.context("--out is required")?;
            report::run(&input, &out)
        }
    }
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "method".into())
}
