//! Per-class image blacklists, excluded from recall counting.

use std::collections::HashSet;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::ground_truth::GroundTruthSet;

/// Set of (image id, class label) pairs whose annotations are ignored.
#[derive(Debug, Clone, Default)]
pub struct Blacklist {
    pairs: HashSet<(String, String)>,
}

impl Blacklist {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        Self {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// Parse a CSV of `image_id,class` rows; an optional literal header row
    /// is skipped.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut pairs = HashSet::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || (lineno == 0 && trimmed == "image_id,class") {
                continue;
            }
            let (id, class) = trimmed.split_once(',').ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: "expected 'image_id,class'".into(),
            })?;
            pairs.insert((id.trim().to_owned(), class.trim().to_owned()));
        }
        Ok(Self { pairs })
    }

    pub fn is_listed(&self, image_id: &str, class: &str) -> bool {
        // HashSet<(String, String)> cannot be probed with borrowed strs;
        // the pair count is small so allocation here is irrelevant.
        self.pairs
            .contains(&(image_id.to_owned(), class.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(String, String)> {
        self.pairs.iter()
    }
}

/// Drop every annotation whose (image id, class) is blacklisted. Images are
/// retained even when all of their annotations go away, so the image universe
/// is unchanged; only the recall denominator shrinks. Pairs that reference
/// unknown images or classes are reported as warnings, not errors.
pub fn apply_blacklist(gt: &GroundTruthSet, blacklist: &Blacklist) -> GroundTruthSet {
    for (image_id, class) in blacklist.pairs() {
        let known = gt
            .get(image_id)
            .map(|img| {
                img.objects
                    .iter()
                    .any(|o| o.label.as_deref() == Some(class.as_str()))
            })
            .unwrap_or(false);
        if !known {
            log::warn!("blacklist pair ({image_id}, {class}) matches no annotation");
        }
    }
    gt.filter_objects(|img, obj| {
        obj.label
            .as_deref()
            .map(|label| !blacklist.is_listed(&img.image_id, label))
            .unwrap_or(true)
    })
}
