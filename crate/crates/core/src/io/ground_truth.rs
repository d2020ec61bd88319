//! Ground-truth annotation sets and their loaders.

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// One annotated object.
#[derive(Debug, Clone, PartialEq)]
pub struct GtObject {
    pub label: Option<String>,
    pub bbox: BoundingBox,
    pub difficult: bool,
}

/// All annotations of a single image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageAnnotations {
    pub image_id: String,
    pub width: u32,
    pub height: u32,
    pub objects: Vec<GtObject>,
}

/// Annotations for a whole dataset, in file order, with unique image ids.
#[derive(Debug, Clone, Default)]
pub struct GroundTruthSet {
    images: Vec<ImageAnnotations>,
    index: HashMap<String, usize>,
}

/// Supported annotation sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruthFormat {
    Jsonl,
    VocXmlDir,
}

/// Canonical one-image-per-line interchange record, shared by ground truth
/// and proposal files.
#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct ImageRecord {
    pub image_id: String,
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub boxes: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difficult: Option<Vec<bool>>,
}

impl GroundTruthSet {
    pub fn from_images(images: Vec<ImageAnnotations>) -> Result<Self> {
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

    pub fn images(&self) -> &[ImageAnnotations] {
        &self.images
    }

    pub fn get(&self, image_id: &str) -> Option<&ImageAnnotations> {
        self.index.get(image_id).map(|&i| &self.images[i])
    }

    pub fn total_annotations(&self) -> usize {
        self.images.iter().map(|img| img.objects.len()).sum()
    }

    /// Sorted class vocabulary over all labelled objects.
    pub fn classes(&self) -> BTreeSet<String> {
        self.images
            .iter()
            .flat_map(|img| img.objects.iter())
            .filter_map(|o| o.label.clone())
            .collect()
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
            let record: ImageRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: e.to_string(),
            })?;
            images.push(annotations_from_record(record, path, lineno + 1)?);
        }
        Self::from_images(images)
    }

    /// Parse a directory of Pascal VOC XML annotation files. The 1-based
    /// inclusive pixel indices are converted to continuous coordinates as
    /// (xmin-1, ymin-1, xmax, ymax) so widths stay pixel counts.
    pub fn load_voc_dir(path: &Path) -> Result<Self> {
        let mut entries: Vec<_> = std::fs::read_dir(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "xml"))
            .collect();
        entries.sort();
        if entries.is_empty() {
            log::warn!("no XML annotation files under {}", path.display());
        }
        let mut images = Vec::new();
        for file in entries {
            images.push(parse_voc_xml(&file)?);
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
            let record = record_from_annotations(img);
            let line = serde_json::to_string(&record).expect("record serialization");
            writeln!(out, "{line}").map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
        }
        Ok(())
    }

    /// Rebuild with a per-image object filter, keeping images whose object
    /// list becomes empty.
    pub(crate) fn filter_objects(
        &self,
        mut keep: impl FnMut(&ImageAnnotations, &GtObject) -> bool,
    ) -> GroundTruthSet {
        let images = self
            .images
            .iter()
            .map(|img| ImageAnnotations {
                image_id: img.image_id.clone(),
                width: img.width,
                height: img.height,
                objects: img
                    .objects
                    .iter()
                    .filter(|o| keep(img, o))
                    .cloned()
                    .collect(),
            })
            .collect();
        GroundTruthSet::from_images(images).expect("ids unchanged by filtering")
    }
}

/// Dispatch over the supported on-disk formats.
pub fn load_ground_truth(path: &Path, format: GroundTruthFormat) -> Result<GroundTruthSet> {
    match format {
        GroundTruthFormat::Jsonl => GroundTruthSet::load_jsonl(path),
        GroundTruthFormat::VocXmlDir => GroundTruthSet::load_voc_dir(path),
    }
}

fn annotations_from_record(
    record: ImageRecord,
    path: &Path,
    line: usize,
) -> Result<ImageAnnotations> {
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
    if let Some(labels) = &record.labels {
        if labels.len() != record.boxes.len() {
            return Err(parse_err(format!(
                "image '{}': {} labels for {} boxes",
                record.image_id,
                labels.len(),
                record.boxes.len()
            )));
        }
    }
    if let Some(difficult) = &record.difficult {
        if difficult.len() != record.boxes.len() {
            return Err(parse_err(format!(
                "image '{}': {} difficult flags for {} boxes",
                record.image_id,
                difficult.len(),
                record.boxes.len()
            )));
        }
    }
    let mut objects = Vec::with_capacity(record.boxes.len());
    let mut clamped = false;
    for (i, coords) in record.boxes.iter().enumerate() {
        if coords.len() != 4 {
            return Err(parse_err(format!(
                "image '{}': ground-truth box {i} has {} values, expected 4",
                record.image_id,
                coords.len()
            )));
        }
        let bbox = BoundingBox::new(coords[0], coords[1], coords[2], coords[3])
            .map_err(|e| parse_err(format!("image '{}': box {i}: {e}", record.image_id)))?;
        let clipped = bbox.clip_to_image(width as f64, height as f64);
        if clipped != bbox {
            clamped = true;
        }
        objects.push(GtObject {
            label: record.labels.as_ref().map(|l| l[i].clone()),
            bbox: clipped,
            difficult: record.difficult.as_ref().map(|d| d[i]).unwrap_or(false),
        });
    }
    if clamped {
        log::warn!(
            "image '{}': annotations clamped to {}x{} bounds",
            record.image_id,
            width,
            height
        );
    }
    Ok(ImageAnnotations {
        image_id: record.image_id,
        width,
        height,
        objects,
    })
}

fn record_from_annotations(img: &ImageAnnotations) -> ImageRecord {
    let any_label = img.objects.iter().any(|o| o.label.is_some());
    let any_difficult = img.objects.iter().any(|o| o.difficult);
    ImageRecord {
        image_id: img.image_id.clone(),
        width: Some(img.width),
        height: Some(img.height),
        boxes: img
            .objects
            .iter()
            .map(|o| vec![o.bbox.x0(), o.bbox.y0(), o.bbox.x1(), o.bbox.y1()])
            .collect(),
        labels: any_label.then(|| {
            img.objects
                .iter()
                .map(|o| o.label.clone().unwrap_or_default())
                .collect()
        }),
        difficult: any_difficult.then(|| img.objects.iter().map(|o| o.difficult).collect()),
    }
}

fn parse_voc_xml(path: &Path) -> Result<ImageAnnotations> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        message,
    };
    let doc = roxmltree::Document::parse(&text).map_err(|e| parse_err(e.to_string()))?;
    let root = doc.root_element();
    let image_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let size = root
        .children()
        .find(|n| n.has_tag_name("size"))
        .ok_or_else(|| Error::MissingSize {
            path: path.to_path_buf(),
            image_id: image_id.clone(),
        })?;
    let dim = |name: &str| -> Result<u32> {
        size.children()
            .find(|n| n.has_tag_name(name))
            .and_then(|n| n.text())
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| Error::MissingSize {
                path: path.to_path_buf(),
                image_id: image_id.clone(),
            })
    };
    let width = dim("width")?;
    let height = dim("height")?;

    let mut objects = Vec::new();
    for obj in root.children().filter(|n| n.has_tag_name("object")) {
        let label = obj
            .children()
            .find(|n| n.has_tag_name("name"))
            .and_then(|n| n.text())
            .map(|t| t.trim().to_owned())
            .ok_or_else(|| parse_err("object without <name>".into()))?;
        let difficult = obj
            .children()
            .find(|n| n.has_tag_name("difficult"))
            .and_then(|n| n.text())
            .map(|t| t.trim() == "1")
            .unwrap_or(false);
        let bndbox = obj
            .children()
            .find(|n| n.has_tag_name("bndbox"))
            .ok_or_else(|| parse_err(format!("object '{label}' without <bndbox>")))?;
        let coord = |name: &str| -> Result<f64> {
            bndbox
                .children()
                .find(|n| n.has_tag_name(name))
                .and_then(|n| n.text())
                .and_then(|t| t.trim().parse().ok())
                .ok_or_else(|| parse_err(format!("object '{label}': bad <{name}>")))
        };
        let bbox = BoundingBox::new(
            coord("xmin")? - 1.0,
            coord("ymin")? - 1.0,
            coord("xmax")?,
            coord("ymax")?,
        )
        .map_err(|e| parse_err(format!("image '{image_id}': {e}")))?
        .clip_to_image(width as f64, height as f64);
        objects.push(GtObject {
            label: Some(label),
            bbox,
            difficult,
        });
    }
    Ok(ImageAnnotations {
        image_id,
        width,
        height,
        objects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_file(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, contents).unwrap();
        p
    }

    #[test]
    fn jsonl_single_image() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            r#"{"image_id":"a","width":100,"height":80,"boxes":[[0,0,10,10],[5,5,20,30]],"labels":["cat","dog"]}"#,
        );
        let gt = GroundTruthSet::load_jsonl(&p).unwrap();
        assert_eq!(gt.images().len(), 1);
        assert_eq!(gt.total_annotations(), 2);
        assert_eq!(gt.classes().len(), 2);
    }

    #[test]
    fn jsonl_invalid_box_names_image() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            r#"{"image_id":"bad-one","width":100,"height":80,"boxes":[[10,0,4,10]]}"#,
        );
        let err = GroundTruthSet::load_jsonl(&p).unwrap_err().to_string();
        assert!(err.contains("bad-one"), "{err}");
    }

    #[test]
    fn jsonl_missing_size() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            r#"{"image_id":"a","boxes":[[0,0,1,1]]}"#,
        );
        assert!(matches!(
            GroundTruthSet::load_jsonl(&p),
            Err(Error::MissingSize { .. })
        ));
    }

    #[test]
    fn jsonl_out_of_bounds_clamped() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            r#"{"image_id":"a","width":50,"height":50,"boxes":[[-3,0,60,40]]}"#,
        );
        let gt = GroundTruthSet::load_jsonl(&p).unwrap();
        let b = gt.images()[0].objects[0].bbox;
        assert_eq!((b.x0(), b.x1()), (0.0, 50.0));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            "{\"image_id\":\"a\",\"width\":10,\"height\":10,\"boxes\":[]}\n{\"image_id\":\"a\",\"width\":10,\"height\":10,\"boxes\":[]}",
        );
        assert!(GroundTruthSet::load_jsonl(&p).is_err());
    }

    #[test]
    fn voc_xml_directory() {
        let dir = tempfile::tempdir().unwrap();
        write_file(
            dir.path(),
            "img1.xml",
            "<annotation><size><width>353</width><height>500</height></size>\
             <object><name>dog</name><difficult>0</difficult>\
             <bndbox><xmin>48</xmin><ymin>240</ymin><xmax>195</xmax><ymax>371</ymax></bndbox></object>\
             <object><name>person</name><difficult>1</difficult>\
             <bndbox><xmin>8</xmin><ymin>12</ymin><xmax>352</xmax><ymax>498</ymax></bndbox></object>\
             </annotation>",
        );
        let gt = GroundTruthSet::load_voc_dir(dir.path()).unwrap();
        assert_eq!(gt.images().len(), 1);
        let img = &gt.images()[0];
        assert_eq!(img.image_id, "img1");
        assert_eq!((img.width, img.height), (353, 500));
        // 1-based inclusive (48, 240, 195, 371) -> continuous (47, 239, 195, 371)
        let b = img.objects[0].bbox;
        assert_eq!(
            (b.x0(), b.y0(), b.x1(), b.y1()),
            (47.0, 239.0, 195.0, 371.0)
        );
        assert!(!img.objects[0].difficult);
        assert!(img.objects[1].difficult);
    }

    #[test]
    fn empty_voc_dir_is_valid() {
        let dir = tempfile::tempdir().unwrap();
        let gt = GroundTruthSet::load_voc_dir(dir.path()).unwrap();
        assert!(gt.images().is_empty());
    }

    #[test]
    fn save_load_fixpoint() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_file(
            dir.path(),
            "gt.jsonl",
            r#"{"image_id":"a","width":100,"height":80,"boxes":[[0,0,10.5,10],[5,5,20,30]],"labels":["cat","dog"],"difficult":[false,true]}"#,
        );
        let gt = GroundTruthSet::load_jsonl(&p).unwrap();
        let p1 = dir.path().join("round1.jsonl");
        gt.save_jsonl(&p1).unwrap();
        let gt2 = GroundTruthSet::load_jsonl(&p1).unwrap();
        let p2 = dir.path().join("round2.jsonl");
        gt2.save_jsonl(&p2).unwrap();
        assert_eq!(
            std::fs::read(&p1).unwrap(),
            std::fs::read(&p2).unwrap(),
            "serialized ground truth must be a fixpoint"
        );
    }
}
