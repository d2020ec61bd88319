//! Shared synthetic-fixture generation for the integration and acceptance
//! suites: deterministic textured images with known object rectangles.
//!
//! Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use std::io::Write;
use std::path::Path;

use image::{Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SynthObject {
    pub label: &'static str,
    pub x0: u32,
    pub y0: u32,
    pub x1: u32,
    pub y1: u32,
}

pub struct SynthImage {
    pub image_id: String,
    pub image: RgbImage,
    pub objects: Vec<SynthObject>,
}

const LABELS: [&str; 3] = ["widget", "gadget", "sprocket"];

/// One deterministic textured scene: gradient background, per-pixel noise,
/// and a few solid rectangles that double as ground-truth objects.
pub fn synth_image(seed: u64, width: u32, height: u32) -> SynthImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: [f64; 3] = [
        rng.random_range(40.0..140.0),
        rng.random_range(40.0..140.0),
        rng.random_range(40.0..140.0),
    ];
    let slope_x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.3..0.3));
    let slope_y: [f64; 3] = std::array::from_fn(|_| rng.random_range(-0.4..0.4));
    let mut image = RgbImage::from_fn(width, height, |_, _| Rgb([0, 0, 0]));
    for y in 0..height {
        for x in 0..width {
            let px = std::array::from_fn(|c| {
                let v = base[c] + slope_x[c] * x as f64 + slope_y[c] * y as f64;
                v.clamp(0.0, 255.0) as u8
            });
            image.put_pixel(x, y, Rgb(px));
        }
    }

    let mut objects = Vec::new();
    let count = rng.random_range(2..=3);
    for i in 0..count {
        let w = rng.random_range(24..=60.min(width - 4));
        let h = rng.random_range(24..=60.min(height - 4));
        let x0 = rng.random_range(0..=width - w);
        let y0 = rng.random_range(0..=height - h);
        let color = Rgb([
            rng.random_range(0..=255u8),
            rng.random_range(0..=255u8),
            rng.random_range(0..=255u8),
        ]);
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                image.put_pixel(x, y, color);
            }
        }
        objects.push(SynthObject {
            label: LABELS[i % LABELS.len()],
            x0,
            y0,
            x1: x0 + w,
            y1: y0 + h,
        });
    }

    // Texture noise on top of everything keeps the superpixel baseline busy.
    for y in 0..height {
        for x in 0..width {
            let p = image.get_pixel_mut(x, y);
            for c in 0..3 {
                let jitter: i16 = rng.random_range(-18..=18);
                p.0[c] = (p.0[c] as i16 + jitter).clamp(0, 255) as u8;
            }
        }
    }

    SynthImage {
        image_id: format!("synth_{seed:04}"),
        image,
        objects,
    }
}

pub fn write_dataset(dir: &Path, seeds: std::ops::Range<u64>, width: u32, height: u32) {
    let images_dir = dir.join("images");
    std::fs::create_dir_all(&images_dir).unwrap();
    let mut gt = std::fs::File::create(dir.join("gt.jsonl")).unwrap();
    for seed in seeds {
        let s = synth_image(seed, width, height);
        s.image
            .save(images_dir.join(format!("{}.png", s.image_id)))
            .unwrap();
        writeln!(gt, "{}", gt_record(&s, width, height)).unwrap();
    }
}

pub fn gt_record(s: &SynthImage, width: u32, height: u32) -> String {
    let boxes: Vec<String> = s
        .objects
        .iter()
        .map(|o| format!("[{},{},{},{}]", o.x0, o.y0, o.x1, o.y1))
        .collect();
    let labels: Vec<String> = s
        .objects
        .iter()
        .map(|o| format!("\"{}\"", o.label))
        .collect();
    format!(
        "{{\"image_id\":\"{}\",\"width\":{width},\"height\":{height},\"boxes\":[{}],\"labels\":[{}]}}",
        s.image_id,
        boxes.join(","),
        labels.join(",")
    )
}

/// Run the compiled binary with the given arguments, panicking on failure.
pub fn run_cli(args: &[&str]) -> std::process::Output {
    let exe = env!("CARGO_BIN_EXE_propeval");
    let output = std::process::Command::new(exe)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawning propeval");
    assert!(
        output.status.success(),
        "propeval {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

/// Run the binary expecting a failure; returns stderr.
pub fn run_cli_expect_error(args: &[&str]) -> String {
    let exe = env!("CARGO_BIN_EXE_propeval");
    let output = std::process::Command::new(exe)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawning propeval");
    assert!(
        !output.status.success(),
        "propeval {args:?} unexpectedly succeeded"
    );
    String::from_utf8_lossy(&output.stderr).into_owned()
}
