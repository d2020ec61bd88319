//! Applying a perturbation to an image.

use image::RgbImage;

use crate::perturb::project::crop_for;
use crate::perturb::resample::{gaussian_blur, resample_rotation, resample_scale};
use crate::perturb::{JpegQuality, Perturbation};

/// Render the perturbed version of an image. Identity parameters return the
/// raster unchanged, byte for byte.
pub fn apply_perturbation(image: &RgbImage, spec: &Perturbation) -> RgbImage {
    if spec.is_identity() {
        return image.clone();
    }
    match spec {
        Perturbation::None | Perturbation::Jpeg(JpegQuality::Lossless) => image.clone(),
        Perturbation::Scale(factor) => resample_scale(image, *factor),
        Perturbation::Blur(sigma) => gaussian_blur(image, *sigma),
        Perturbation::Rotation(deg) => {
            let crop =
                crop_for(spec, image.width(), image.height()).expect("rotation always has a crop");
            resample_rotation(image, *deg, &crop)
        }
        Perturbation::Illumination(percent) => scale_brightness(image, *percent / 100.0),
        Perturbation::Jpeg(JpegQuality::Quality(q)) => jpeg_round_trip(image, *q),
    }
}

/// Multiply the brightness channel of the HSB hexcone model, clamping at
/// full brightness; hue and saturation are preserved even when clipping.
fn scale_brightness(image: &RgbImage, factor: f64) -> RgbImage {
    RgbImage::from_fn(image.width(), image.height(), |x, y| {
        let [r, g, b] = image.get_pixel(x, y).0;
        let (h, s, v) = rgb_to_hsb(r, g, b);
        let (r, g, b) = hsb_to_rgb(h, s, (v * factor).clamp(0.0, 1.0));
        image::Rgb([r, g, b])
    })
}

/// Standard hexcone conversion with B = max(R, G, B) / 255.
fn rgb_to_hsb(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;
    let v = max;
    let s = if max > 0.0 { delta / max } else { 0.0 };
    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * (((gf - bf) / delta).rem_euclid(6.0))
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    (h, s, v)
}

fn hsb_to_rgb(h: f64, s: f64, v: f64) -> (u8, u8, u8) {
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0).rem_euclid(2.0) - 1.0).abs());
    let m = v - c;
    let (rf, gf, bf) = match h {
        h if h < 60.0 => (c, x, 0.0),
        h if h < 120.0 => (x, c, 0.0),
        h if h < 180.0 => (0.0, c, x),
        h if h < 240.0 => (0.0, x, c),
        h if h < 300.0 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let to_u8 = |f: f64| ((f + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    (to_u8(rf), to_u8(gf), to_u8(bf))
}

/// Encode at the given JPEG quality and decode again, keeping the artefacts.
fn jpeg_round_trip(image: &RgbImage, quality: u8) -> RgbImage {
    let mut buf = Vec::new();
    let encoder =
        image::codecs::jpeg::JpegEncoder::new_with_quality(std::io::Cursor::new(&mut buf), quality);
    image
        .write_with_encoder(encoder)
        .expect("in-memory jpeg encode");
    image::load_from_memory(&buf)
        .expect("decode of freshly encoded jpeg")
        .to_rgb8()
}
