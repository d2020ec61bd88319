//! Raw detector output sets.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// A single class-labelled, scored detection.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub label: String,
    pub bbox: BoundingBox,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageDetections {
    pub image_id: String,
    pub detections: Vec<Detection>,
}

/// Detections over a dataset, e.g. the raw output of a detector before
/// non-maximum suppression.
#[derive(Debug, Clone, Default)]
pub struct DetectionSet {
    images: Vec<ImageDetections>,
    index: HashMap<String, usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DetectionRecord {
    image_id: String,
    detections: Vec<(f64, f64, f64, f64, f64, String)>,
}

impl DetectionSet {
    pub fn from_images(images: Vec<ImageDetections>) -> Result<Self> {
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
        Ok(Self { images, index })
    }

    pub fn images(&self) -> &[ImageDetections] {
        &self.images
    }

    pub fn get(&self, image_id: &str) -> Option<&ImageDetections> {
        self.index.get(image_id).map(|&i| &self.images[i])
    }

    pub fn total_detections(&self) -> usize {
        self.images.iter().map(|img| img.detections.len()).sum()
    }

    pub fn load_jsonl(path: &Path) -> Result<Self> {
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
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message,
            };
            let record: DetectionRecord =
                serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
            let mut detections = Vec::with_capacity(record.detections.len());
            for (i, (x0, y0, x1, y1, score, label)) in record.detections.into_iter().enumerate() {
                if !score.is_finite() {
                    return Err(parse_err(format!(
                        "image '{}': detection {i} has non-finite score",
                        record.image_id
                    )));
                }
                let bbox = BoundingBox::new(x0, y0, x1, y1).map_err(|e| {
                    parse_err(format!("image '{}': detection {i}: {e}", record.image_id))
                })?;
                detections.push(Detection { label, bbox, score });
            }
            images.push(ImageDetections {
                image_id: record.image_id,
                detections,
            });
        }
        Self::from_images(images)
    }

    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        let mut out =
            std::io::BufWriter::new(std::fs::File::create(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?);
        for img in &self.images {
            let record = DetectionRecord {
                image_id: img.image_id.clone(),
                detections: img
                    .detections
                    .iter()
                    .map(|d| {
                        (
                            d.bbox.x0(),
                            d.bbox.y0(),
                            d.bbox.x1(),
                            d.bbox.y1(),
                            d.score,
                            d.label.clone(),
                        )
                    })
                    .collect(),
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
