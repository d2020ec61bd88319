//! Shared helpers: image discovery, stable per-image seeding, thread pools.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

/// An image file with its id (file stem).
#[derive(Debug, Clone)]
pub struct ImageEntry {
    pub image_id: String,
    pub path: PathBuf,
}

/// List raster images under a directory, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<ImageEntry>> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading image directory {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
                .unwrap_or(false)
        })
        .collect();
    entries.sort();
    if entries.is_empty() {
        bail!("no images (png/jpg) under {}", dir.display());
    }
    Ok(entries
        .into_iter()
        .map(|path| ImageEntry {
            image_id: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            path,
        })
        .collect())
}

pub fn load_rgb(path: &Path) -> Result<image::RgbImage> {
    Ok(image::open(path)
        .with_context(|| format!("decoding image {}", path.display()))?
        .to_rgb8())
}

/// FNV-1a over a string; used to derive independent, stable per-image seeds.
pub fn fnv1a(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}

/// Seed for one (image, role) work unit.
pub fn derive_seed(base: u64, image_id: &str, role: &str) -> u64 {
    base ^ fnv1a(image_id) ^ fnv1a(role).rotate_left(17)
}

/// Thread count: flag, then PROPEVAL_THREADS, then all cores.
pub fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("PROPEVAL_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(0)
}

/// Build a scoped rayon pool ('0' threads means rayon's default).
pub fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building thread pool")
}

/// Parse a comma-separated list of counts.
pub fn parse_counts(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad count '{t}'"))
        })
        .collect()
}
