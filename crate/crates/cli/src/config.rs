//! Optional TOML run configuration. Command-line flags always win over
//! file values; a field required by a command may come from either.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub threads: Option<usize>,
    #[serde(default)]
    pub perturb: PerturbSection,
    #[serde(default)]
    pub baseline: BaselineSection,
    #[serde(default)]
    pub eval_recall: RecallSection,
    #[serde(default)]
    pub eval_repeatability: RepeatSection,
    #[serde(default)]
    pub eval_detection: DetectSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    pub images: Option<PathBuf>,
    pub kinds: Option<String>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineSection {
    pub method: Option<String>,
    pub images: Option<PathBuf>,
    pub sizes_from: Option<PathBuf>,
    pub train_gt: Option<PathBuf>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecallSection {
    pub gt: Option<PathBuf>,
    pub format: Option<String>,
    pub proposals: Option<PathBuf>,
    pub method_name: Option<String>,
    pub n_list: Option<String>,
    pub policy: Option<String>,
    pub blacklist: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeatSection {
    pub images: Option<PathBuf>,
    pub method: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub kinds: Option<String>,
    pub reference: Option<PathBuf>,
    pub perturbed_dir: Option<PathBuf>,
    pub meta: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectSection {
    pub gt: Option<PathBuf>,
    pub format: Option<String>,
    pub detections: Option<PathBuf>,
    pub proposals: Option<PathBuf>,
    pub min_iou: Option<f64>,
    pub nms_overlap: Option<f64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
            }
        }
    }
}

/// Flag wins, config fills gaps.
pub fn pick<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}

/// Like [`pick`] but the value is mandatory.
pub fn require<T>(flag: Option<T>, config: Option<T>, name: &str) -> Result<T> {
    pick(flag, config).with_context(|| format!("--{name} is required (flag or config file)"))
}
