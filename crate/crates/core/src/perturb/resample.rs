//! Raster resampling primitives: Catmull-Rom scaling with a box prefilter
//! for downscaling, separable Gaussian blur with symmetric padding, and
//! bilinear rotation sampling.

use image::RgbImage;

use crate::perturb::project::{crop_to_reference, CropRect};

/// Planar f32 view of an RGB image.
pub(crate) struct Planes {
    pub width: usize,
    pub height: usize,
    pub data: [Vec<f32>; 3],
}

impl Planes {
    pub fn from_image(image: &RgbImage) -> Self {
        Self {
            width: image.width() as usize,
            height: image.height() as usize,
            data: std::array::from_fn(|c| image.pixels().map(|p| p.0[c] as f32).collect()),
        }
    }

    pub fn to_image(&self) -> RgbImage {
        RgbImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            let i = y as usize * self.width + x as usize;
            image::Rgb(std::array::from_fn(|c| {
                self.data[c][i].round().clamp(0.0, 255.0) as u8
            }))
        })
    }
}

/// Cubic convolution kernel with a = -0.5 (Catmull-Rom).
fn cubic(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        (1.5 * t - 2.5) * t * t + 1.0
    } else if t < 2.0 {
        ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0
    } else {
        0.0
    }
}

fn clamp_index(i: i64, n: usize) -> usize {
    i.clamp(0, n as i64 - 1) as usize
}

/// Mirror an index into [0, n) with edge repetition, handling kernels wider
/// than the image.
fn mirror_index(i: i64, n: usize) -> usize {
    let period = 2 * n as i64;
    let mut m = i % period;
    if m < 0 {
        m += period;
    }
    if m < n as i64 {
        m as usize
    } else {
        (period - 1 - m) as usize
    }
}

/// Average over a centered window of `width` source pixels (fractional
/// coverage at the ends), per row or column, with clamped borders.
fn box_prefilter_axis(data: &[f32], w: usize, h: usize, window: f64, horizontal: bool) -> Vec<f32> {
    let half = window / 2.0;
    let (outer, inner) = if horizontal { (h, w) } else { (w, h) };
    let at = |o: usize, i: usize| {
        if horizontal {
            data[o * w + i]
        } else {
            data[i * w + o]
        }
    };
    let mut out = vec![0.0f32; data.len()];
    for o in 0..outer {
        for i in 0..inner {
            let lo = i as f64 + 0.5 - half;
            let hi = i as f64 + 0.5 + half;
            let mut acc = 0.0f64;
            let first = lo.floor() as i64;
            let last = (hi.ceil() as i64) - 1;
            for p in first..=last {
                let cover = (hi.min(p as f64 + 1.0) - lo.max(p as f64)).max(0.0);
                acc += cover * at(o, clamp_index(p, inner)) as f64;
            }
            let v = (acc / window) as f32;
            if horizontal {
                out[o * w + i] = v;
            } else {
                out[i * w + o] = v;
            }
        }
    }
    out
}

/// Resample by `factor`: plain Catmull-Rom when enlarging, box-prefiltered
/// Catmull-Rom when shrinking. Output dimensions floor to at least 1 px.
pub(crate) fn resample_scale(image: &RgbImage, factor: f64) -> RgbImage {
    let src = Planes::from_image(image);
    let out_w = ((src.width as f64 * factor).floor() as usize).max(1);
    let out_h = ((src.height as f64 * factor).floor() as usize).max(1);

    let prefiltered: [Vec<f32>; 3] = if factor < 1.0 {
        let window = 1.0 / factor;
        std::array::from_fn(|c| {
            let tmp = box_prefilter_axis(&src.data[c], src.width, src.height, window, true);
            box_prefilter_axis(&tmp, src.width, src.height, window, false)
        })
    } else {
        src.data.clone()
    };

    let mut out = Planes {
        width: out_w,
        height: out_h,
        data: std::array::from_fn(|_| vec![0.0f32; out_w * out_h]),
    };
    for y in 0..out_h {
        // Continuous coordinates divide by the exact factor; pixel p is
        // centered at p + 0.5.
        let sy = (y as f64 + 0.5) / factor - 0.5;
        let y0 = sy.floor() as i64;
        let wy: [f64; 4] = std::array::from_fn(|j| cubic(sy - (y0 - 1 + j as i64) as f64));
        for x in 0..out_w {
            let sx = (x as f64 + 0.5) / factor - 0.5;
            let x0 = sx.floor() as i64;
            let wx: [f64; 4] = std::array::from_fn(|i| cubic(sx - (x0 - 1 + i as i64) as f64));
            for c in 0..3 {
                let mut acc = 0.0f64;
                for (j, wyj) in wy.iter().enumerate() {
                    let row = clamp_index(y0 - 1 + j as i64, src.height);
                    let mut racc = 0.0f64;
                    for (i, wxi) in wx.iter().enumerate() {
                        let col = clamp_index(x0 - 1 + i as i64, src.width);
                        racc += wxi * prefiltered[c][row * src.width + col] as f64;
                    }
                    acc += wyj * racc;
                }
                out.data[c][y * out_w + x] = acc as f32;
            }
        }
    }
    out.to_image()
}

/// Separable Gaussian blur with kernel radius `ceil(10 * sigma)` (total
/// extent about 20 sigma, always odd) and symmetric image padding.
pub(crate) fn gaussian_blur(image: &RgbImage, sigma: f64) -> RgbImage {
    if sigma <= 0.0 {
        return image.clone();
    }
    let radius = (10.0 * sigma).ceil() as i64;
    let kernel: Vec<f64> = {
        let mut k: Vec<f64> = (-radius..=radius)
            .map(|d| (-((d * d) as f64) / (2.0 * sigma * sigma)).exp())
            .collect();
        let sum: f64 = k.iter().sum();
        k.iter_mut().for_each(|v| *v /= sum);
        k
    };

    let src = Planes::from_image(image);
    let (w, h) = (src.width, src.height);
    let data = std::array::from_fn(|c| {
        let mut tmp = vec![0.0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0f64;
                for (ki, &kv) in kernel.iter().enumerate() {
                    let sx = mirror_index(x as i64 + ki as i64 - radius, w);
                    acc += kv * src.data[c][y * w + sx] as f64;
                }
                tmp[y * w + x] = acc as f32;
            }
        }
        let mut plane = vec![0.0f32; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0f64;
                for (ki, &kv) in kernel.iter().enumerate() {
                    let sy = mirror_index(y as i64 + ki as i64 - radius, h);
                    acc += kv * tmp[sy * w + x] as f64;
                }
                plane[y * w + x] = acc as f32;
            }
        }
        plane
    });
    Planes {
        width: w,
        height: h,
        data,
    }
    .to_image()
}

fn bilinear_sample(plane: &[f32], w: usize, h: usize, x: f64, y: f64) -> f64 {
    // Pixel centers at integer + 0.5; clamp outside samples to the border.
    let fx = x - 0.5;
    let fy = y - 0.5;
    let x0 = fx.floor() as i64;
    let y0 = fy.floor() as i64;
    let tx = fx - x0 as f64;
    let ty = fy - y0 as f64;
    let v = |ix: i64, iy: i64| plane[clamp_index(iy, h) * w + clamp_index(ix, w)] as f64;
    let top = v(x0, y0) * (1.0 - tx) + v(x0 + 1, y0) * tx;
    let bottom = v(x0, y0 + 1) * (1.0 - tx) + v(x0 + 1, y0 + 1) * tx;
    top * (1.0 - ty) + bottom * ty
}

/// Render the crop contents rotated by `angle_deg` with bilinear sampling;
/// the output raster has the crop's (floored) dimensions.
pub(crate) fn resample_rotation(image: &RgbImage, angle_deg: f64, crop: &CropRect) -> RgbImage {
    let src = Planes::from_image(image);
    let (out_w, out_h) = crop.output_size();
    RgbImage::from_fn(out_w, out_h, |x, y| {
        let q = (x as f64 + 0.5, y as f64 + 0.5);
        let (px, py) = crop_to_reference(q, angle_deg, crop);
        image::Rgb(std::array::from_fn(|c| {
            bilinear_sample(&src.data[c], src.width, src.height, px, py)
                .round()
                .clamp(0.0, 255.0) as u8
        }))
    })
}
