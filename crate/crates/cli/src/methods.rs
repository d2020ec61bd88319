//! Baseline proposal generation shared by the `baseline` and
//! `eval-repeatability` commands.

use anyhow::{bail, Result};
use image::RgbImage;

use propeval::baselines::{
    sample_gaussian, sample_uniform, sliding_window, superpixel_proposals, BoxParamStats, SegParams,
};
use propeval::geometry::BoundingBox;

/// The four built-in baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BaselineMethod {
    Uniform,
    Gaussian,
    SlidingWindow,
    Superpixels,
}

impl BaselineMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineMethod::Uniform => "uniform",
            BaselineMethod::Gaussian => "gaussian",
            BaselineMethod::SlidingWindow => "sliding_window",
            BaselineMethod::Superpixels => "superpixels",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "uniform" => Ok(Self::Uniform),
            "gaussian" => Ok(Self::Gaussian),
            "sliding_window" | "sliding-window" => Ok(Self::SlidingWindow),
            "superpixels" => Ok(Self::Superpixels),
            other => bail!("unknown baseline method '{other}'"),
        }
    }

    /// Whether the generator draws random samples (and therefore needs a
    /// seed).
    pub fn is_stochastic(&self) -> bool {
        matches!(self, BaselineMethod::Uniform | BaselineMethod::Gaussian)
    }

    /// Whether the generator looks at pixel content (and therefore needs
    /// decoded images rather than just sizes).
    pub fn needs_pixels(&self) -> bool {
        matches!(self, BaselineMethod::Superpixels)
    }
}

/// Generate proposals for one image. `pixels` is required for
/// content-dependent methods; `stats`/`seed` for the stochastic ones.
/// Stochastic methods emit exactly `n` boxes, SlidingWindow at most `n`,
/// Superpixels every segment it finds (callers cut to `n` afterwards).
pub fn generate(
    method: BaselineMethod,
    width: u32,
    height: u32,
    pixels: Option<&RgbImage>,
    stats: Option<&BoxParamStats>,
    n: usize,
    seed: u64,
) -> Result<Vec<BoundingBox>> {
    match method {
        BaselineMethod::Uniform => {
            let stats = stats_required(stats)?;
            Ok(sample_uniform(stats, width, height, n, seed))
        }
        BaselineMethod::Gaussian => {
            let stats = stats_required(stats)?;
            Ok(sample_gaussian(stats, width, height, n, seed))
        }
        BaselineMethod::SlidingWindow => Ok(sliding_window(width, height, n)),
        BaselineMethod::Superpixels => match pixels {
            Some(img) => Ok(superpixel_proposals(img, &SegParams::superpixel_defaults())),
            None => bail!("superpixels baseline needs decoded images (--images)"),
        },
    }
}

fn stats_required(stats: Option<&BoxParamStats>) -> Result<&BoxParamStats> {
    match stats {
        Some(s) => Ok(s),
        None => bail!("this baseline needs training statistics (--train-gt)"),
    }
}
