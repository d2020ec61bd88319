//! Proposal sets, their JSONL form, and count-selection policies.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::io::ground_truth::ImageRecord;

/// Proposals of one image, in generation/file order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageProposals {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub boxes: Vec<BoundingBox>,
}

/// Proposals of a whole run of one method.
#[derive(Debug, Clone)]
pub struct ProposalSet {
    method: String,
    scored: bool,
    images: Vec<ImageProposals>,
    index: HashMap<String, usize>,
}

/// How to cut a proposal list down to a requested count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Highest score first, ties kept in file order.
    TopScore,
    /// Prefix of the file order.
    FirstN,
    /// `TopScore` when the set is scored, `FirstN` otherwise.
    Auto,
}

impl std::str::FromStr for SelectionPolicy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "top-score" => Ok(Self::TopScore),
            "first-n" => Ok(Self::FirstN),
            "auto" => Ok(Self::Auto),
            other => Err(format!(
                "unknown policy '{other}' (expected top-score, first-n, or auto)"
            )),
        }
    }
}

impl ProposalSet {
    /// Assemble a set, deriving the scored flag. Every box must be scored or
    /// none may be, across the whole set.
    pub fn from_images(method: impl Into<String>, images: Vec<ImageProposals>) -> Result<Self> {
        Self::build(method.into(), images, None)
    }

    /// Assemble a set whose scored flag is known even when no boxes remain,
    /// as after selecting zero proposals from a scored set.
    pub fn from_images_scored(
        method: impl Into<String>,
        images: Vec<ImageProposals>,
        scored: bool,
    ) -> Result<Self> {
        Self::build(method.into(), images, Some(scored))
    }

    fn build(
        method: String,
        images: Vec<ImageProposals>,
        scored_hint: Option<bool>,
    ) -> Result<Self> {
        let mut scored = scored_hint;
        for (i, img) in images.iter().enumerate() {
            for b in &img.boxes {
                let this = b.score().is_some();
                match scored {
                    None => scored = Some(this),
                    Some(prev) if prev != this => {
                        return Err(Error::Parse {
                            path: "<memory>".into(),
                            line: i + 1,
                            message: format!(
                                "image '{}': mixed scored and unscored proposals",
                                img.image_id
                            ),
                        })
                    }
                    _ => {}
                }
            }
        }
        let mut index = HashMap::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            if index.insert(img.image_id.clone(), i).is_some() {
                return Err(Error::Parse {
                    path: "<memory>".into(),
                    line: i + 1,
                    message: format!("duplicate image id '{}'", img.image_id),
                });
            }
        }
        Ok(Self {
            method,
            scored: scored.unwrap_or(false),
            images,
            index,
        })
    }

    pub fn method(&self) -> &str {
        &self.method
    }

    pub fn scored(&self) -> bool {
        self.scored
    }

    pub fn images(&self) -> &[ImageProposals] {
        &self.images
    }

    pub fn get(&self, image_id: &str) -> Option<&ImageProposals> {
        self.index.get(image_id).map(|&i| &self.images[i])
    }

    pub fn total_boxes(&self) -> usize {
        self.images.iter().map(|img| img.boxes.len()).sum()
    }

    /// Mean number of proposals per image; 0 for an empty set.
    pub fn average_per_image(&self) -> f64 {
        if self.images.is_empty() {
            0.0
        } else {
            self.total_boxes() as f64 / self.images.len() as f64
        }
    }

    pub fn load_jsonl(path: &Path, method: impl Into<String>) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut images = Vec::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ImageRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
            images.push(proposals_from_record(record, path, lineno + 1)?);
        }
        Self::from_images(method, images).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        let mut out =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?);
        for img in &self.images {
            let record = ImageRecord {
                image_id: img.image_id.clone(),
                width: Some(img.width),
                height: Some(img.height),
                boxes: img
                    .boxes
                    .iter()
                    .map(|b| {
                        let mut v = vec![b.x0(), b.y0(), b.x1(), b.y1()];
                        if let Some(s) = b.score() {
                            v.push(s);
                        }
                        v
                    })
                    .collect(),
                labels: None,
                difficult: None,
            };
            let line = serde_json::to_string(&record).expect("record serialization");
            writeln!(out, "{line}").map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Ok(())
    }
}

fn proposals_from_record(record: ImageRecord, path: &Path, line: usize) -> Result<ImageProposals> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let (width, height) = match (record.width, record.height) {
        (Some(w), Some(h)) => (w, h),
        _ => {
            return Err(Error::MissingSize {
                path: path.to_path_buf(),
                image_id: record.image_id,
            })
        }
    };
    let mut boxes = Vec::with_capacity(record.boxes.len());
    for (i, coords) in record.boxes.iter().enumerate() {
        let bbox = match coords.len() {
            4 => BoundingBox::new(coords[0], coords[1], coords[2], coords[3]),
            5 => BoundingBox::with_score(coords[0], coords[1], coords[2], coords[3], coords[4]),
            n => {
                return Err(parse_err(format!(
                    "image '{}': proposal {i} has {n} values, expected 4 or 5",
                    record.image_id
                )))
            }
        }
        .map_err(|e| parse_err(format!("image '{}': box {i}: {e}", record.image_id)))?;
        boxes.push(bbox);
    }
    Ok(ImageProposals {
        image_id: record.image_id,
        width,
        height,
        boxes,
    })
}

/// Reduce every image to at most `n` proposals under the given policy.
/// Images holding fewer than `n` keep everything they have.
pub fn select_proposals(
    set: &ProposalSet,
    n: usize,
    policy: SelectionPolicy,
) -> Result<ProposalSet> {
    let effective = match policy {
        SelectionPolicy::Auto => {
            if set.scored() {
                SelectionPolicy::TopScore
            } else {
                SelectionPolicy::FirstN
            }
        }
        p => p,
    };
    if effective == SelectionPolicy::TopScore && !set.scored() {
        return Err(Error::UnscoredSelection {
            method: set.method().to_owned(),
        });
    }
    let images = set
        .images()
        .iter()
        .map(|img| {
            let mut boxes = img.boxes.clone();
            if effective == SelectionPolicy::TopScore {
                boxes.sort_by(|a, b| {
                    b.score()
                        .unwrap_or(f64::NEG_INFINITY)
                        .total_cmp(&a.score().unwrap_or(f64::NEG_INFINITY))
                });
            }
            boxes.truncate(n);
            ImageProposals {
                image_id: img.image_id.clone(),
                width: img.width,
                height: img.height,
                boxes,
            }
        })
        .collect();
    ProposalSet::from_images_scored(set.method(), images, set.scored())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(id: &str, boxes: Vec<BoundingBox>) -> ImageProposals {
        ImageProposals {
            image_id: id.into(),
            width: 100,
            height: 100,
            boxes,
        }
    }

    fn scored(x: f64, score: f64) -> BoundingBox {
        BoundingBox::with_score(x, 0.0, x + 10.0, 10.0, score).unwrap()
    }

    fn unscored(x: f64) -> BoundingBox {
        BoundingBox::new(x, 0.0, x + 10.0, 10.0).unwrap()
    }

    #[test]
    fn scored_flag_from_contents() {
        let s = ProposalSet::from_images("m", vec![img("a", vec![scored(0.0, 0.5)])]).unwrap();
        assert!(s.scored());
        let u = ProposalSet::from_images("m", vec![img("a", vec![unscored(0.0)])]).unwrap();
        assert!(!u.scored());
    }

    #[test]
    fn mixed_scoring_rejected() {
        let r =
            ProposalSet::from_images("m", vec![img("a", vec![scored(0.0, 0.5), unscored(20.0)])]);
        assert!(r.is_err());
    }

    #[test]
    fn select_zero() {
        let s = ProposalSet::from_images("m", vec![img("a", vec![unscored(0.0), unscored(20.0)])])
            .unwrap();
        let out = select_proposals(&s, 0, SelectionPolicy::FirstN).unwrap();
        assert_eq!(out.total_boxes(), 0);
        assert_eq!(out.images().len(), 1);
    }

    #[test]
    fn select_more_than_available_is_identity() {
        let s = ProposalSet::from_images("m", vec![img("a", vec![unscored(0.0), unscored(20.0)])])
            .unwrap();
        let out = select_proposals(&s, 10, SelectionPolicy::Auto).unwrap();
        assert_eq!(out.images()[0].boxes, s.images()[0].boxes);
    }

    #[test]
    fn top_score_order() {
        let s = ProposalSet::from_images(
            "m",
            vec![img(
                "a",
                vec![scored(0.0, 0.1), scored(20.0, 0.9), scored(40.0, 0.5)],
            )],
        )
        .unwrap();
        let out = select_proposals(&s, 2, SelectionPolicy::TopScore).unwrap();
        let xs: Vec<f64> = out.images()[0].boxes.iter().map(|b| b.x0()).collect();
        assert_eq!(xs, vec![20.0, 40.0]);
    }

    #[test]
    fn top_score_on_unscored_errors() {
        let s = ProposalSet::from_images("m", vec![img("a", vec![unscored(0.0)])]).unwrap();
        assert!(matches!(
            select_proposals(&s, 1, SelectionPolicy::TopScore),
            Err(Error::UnscoredSelection { .. })
        ));
    }

    #[test]
    fn selection_is_idempotent() {
        let s = ProposalSet::from_images(
            "m",
            vec![img(
                "a",
                vec![scored(0.0, 0.3), scored(20.0, 0.9), scored(40.0, 0.9)],
            )],
        )
        .unwrap();
        let once = select_proposals(&s, 2, SelectionPolicy::Auto).unwrap();
        let twice = select_proposals(&once, 2, SelectionPolicy::Auto).unwrap();
        assert_eq!(once.images(), twice.images());
    }

    #[test]
    fn jsonl_round_trip_fixpoint() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("props.jsonl");
        std::fs::write(
            &p,
            r#"{"image_id":"a","width":64,"height":48,"boxes":[[0,0,10,10,0.25],[1,2,3,4,0.5]]}"#,
        )
        .unwrap();
        let s = ProposalSet::load_jsonl(&p, "m").unwrap();
        assert!(s.scored());
        let p1 = dir.path().join("r1.jsonl");
        s.save_jsonl(&p1).unwrap();
        let s2 = ProposalSet::load_jsonl(&p1, "m").unwrap();
        let p2 = dir.path().join("r2.jsonl");
        s2.save_jsonl(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }
}
