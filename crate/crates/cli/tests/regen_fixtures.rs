//! Regenerates the committed mini-dataset fixtures. Run explicitly with:
//! `REGEN_FIXTURES=1 cargo test -p propeval-cli --test regen_fixtures -- --ignored`

mod common;

use std::io::Write;
use std::path::PathBuf;

use propeval::baselines::{estimate_box_stats, sample_gaussian};
use propeval::geometry::BoundingBox;
use propeval::io::{GroundTruthSet, ImageProposals, ProposalSet};

const MINI_SEEDS: std::ops::Range<u64> = 101..111;
const MINI_W: u32 = 200;
const MINI_H: u32 = 150;

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/mini")
}

#[test]
#[ignore = "writes into the source tree; run with REGEN_FIXTURES=1"]
fn regenerate_mini_dataset() {
    if std::env::var("REGEN_FIXTURES").as_deref() != Ok("1") {
        eprintln!("REGEN_FIXTURES not set; leaving fixtures untouched");
        return;
    }
    let dir = fixtures_dir();
    std::fs::create_dir_all(&dir).unwrap();
    common::write_dataset(&dir, MINI_SEEDS, MINI_W, MINI_H);

    // Bundled baseline proposals: Gaussian fitted on the mini annotations.
    let gt = GroundTruthSet::load_jsonl(&dir.join("gt.jsonl")).unwrap();
    let stats = estimate_box_stats(&gt, 0.005, true).unwrap();
    let images: Vec<ImageProposals> = gt
        .images()
        .iter()
        .enumerate()
        .map(|(i, img)| ImageProposals {
            image_id: img.image_id.clone(),
            width: img.width,
            height: img.height,
            boxes: sample_gaussian(&stats, img.width, img.height, 200, 7000 + i as u64),
        })
        .collect();
    ProposalSet::from_images("gaussian", images)
        .unwrap()
        .save_jsonl(&dir.join("proposals_gaussian.jsonl"))
        .unwrap();

    // A small blacklist referencing real image/class pairs.
    let mut bl = std::fs::File::create(dir.join("blacklist.csv")).unwrap();
    writeln!(bl, "image_id,class").unwrap();
    let first = &gt.images()[0];
    if let Some(label) = first.objects.first().and_then(|o| o.label.clone()) {
        writeln!(bl, "{},{label}", first.image_id).unwrap();
    }
    eprintln!("fixtures regenerated under {}", dir.display());
}

#[test]
fn committed_fixtures_are_consistent() {
    // Guards the bundle: ids line up between images, annotations, and
    // proposals, and the proposal boxes are valid for their image sizes.
    let dir = fixtures_dir();
    let gt = GroundTruthSet::load_jsonl(&dir.join("gt.jsonl")).unwrap();
    assert_eq!(gt.images().len(), 10);
    let props = ProposalSet::load_jsonl(&dir.join("proposals_gaussian.jsonl"), "gaussian").unwrap();
    assert_eq!(props.images().len(), 10);
    for img in gt.images() {
        let png = dir.join("images").join(format!("{}.png", img.image_id));
        assert!(png.exists(), "missing {}", png.display());
        let p = props.get(&img.image_id).expect("proposals for every image");
        assert_eq!(p.boxes.len(), 200);
        for b in &p.boxes {
            let w = img.width as f64;
            let h = img.height as f64;
            assert!(b.x0() >= 0.0 && b.y0() >= 0.0 && b.x1() <= w && b.y1() <= h);
        }
        for o in &img.objects {
            let hull = BoundingBox::new(0.0, 0.0, img.width as f64, img.height as f64).unwrap();
            assert!(o.bbox.intersection_area(&hull) > 0.0);
        }
    }
}
