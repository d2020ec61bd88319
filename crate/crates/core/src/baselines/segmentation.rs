//! Graph-based image segmentation into low-level superpixels.
//!
//! Classic efficient graph segmentation: Gaussian pre-smoothing, an
//! 8-connected grid graph weighted by Euclidean RGB distance, a single
//! ascending sweep over edges merging components whenever the connecting
//! edge is no heavier than the internal difference of either side plus its
//! size-dependent slack `k/|C|`, and a final pass that folds undersized
//! components into their most similar neighbour.

use image::RgbImage;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// Parameters of one segmentation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegParams {
    /// Pre-smoothing standard deviation in pixels.
    pub sigma: f64,
    /// Merge threshold constant; larger k yields larger components.
    pub k: f64,
    /// Minimum component size in pixels, enforced by the final merge pass.
    pub min_size: usize,
}

impl SegParams {
    pub fn new(sigma: f64, k: f64, min_size: usize) -> Result<Self> {
        if sigma < 0.0 {
            return Err(Error::ParamOutOfRange {
                param: "sigma",
                value: sigma,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        if k <= 0.0 {
            return Err(Error::ParamOutOfRange {
                param: "k",
                value: k,
                lo: f64::MIN_POSITIVE,
                hi: f64::INFINITY,
            });
        }
        if min_size == 0 {
            return Err(Error::ParamOutOfRange {
                param: "min_size",
                value: 0.0,
                lo: 1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self { sigma, k, min_size })
    }

    /// The four granularities run by the Superpixels baseline.
    pub fn superpixel_defaults() -> Vec<SegParams> {
        [100.0, 200.0, 300.0, 400.0]
            .into_iter()
            .map(|k| SegParams {
                sigma: 0.8,
                k,
                min_size: 20,
            })
            .collect()
    }
}

/// Dense component labelling of an image. Labels are consecutive from 0 and
/// assigned in raster order of each component's first pixel.
#[derive(Debug, Clone)]
pub struct LabelMap {
    width: u32,
    height: u32,
    labels: Vec<u32>,
    num_components: usize,
}

impl LabelMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn label_at(&self, x: u32, y: u32) -> u32 {
        self.labels[(y * self.width + x) as usize]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn component_count(&self) -> usize {
        self.num_components
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_components];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Tight bounding box of every component, in label order. A pixel (x, y)
    /// occupies the unit cell [x, x+1) x [y, y+1).
    pub fn component_boxes(&self) -> Vec<BoundingBox> {
        let mut bounds = vec![[u32::MAX, u32::MAX, 0u32, 0u32]; self.num_components];
        for y in 0..self.height {
            for x in 0..self.width {
                let b = &mut bounds[self.label_at(x, y) as usize];
                b[0] = b[0].min(x);
                b[1] = b[1].min(y);
                b[2] = b[2].max(x);
                b[3] = b[3].max(y);
            }
        }
        bounds
            .into_iter()
            .map(|[x0, y0, x1, y1]| {
                BoundingBox::new(x0 as f64, y0 as f64, (x1 + 1) as f64, (y1 + 1) as f64)
                    .expect("component bounds are ordered")
            })
            .collect()
    }
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Internal difference plus slack: the largest edge weight accepted so
    /// far plus k / |C|.
    threshold: Vec<f32>,
}

impl DisjointSets {
    fn new(n: usize, k: f32) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            threshold: vec![k; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let (big, small) = if self.size[a as usize] >= self.size[b as usize] {
            (a, b)
        } else {
            (b, a)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
        big
    }
}

#[derive(Clone, Copy)]
struct GridEdge {
    a: u32,
    b: u32,
    weight: f32,
}

fn smoothed_channels(image: &RgbImage, sigma: f64) -> [Vec<f32>; 3] {
    let (w, h) = (image.width() as usize, image.height() as usize);
    let mut channels: [Vec<f32>; 3] =
        std::array::from_fn(|c| image.pixels().map(|p| p.0[c] as f32).collect());
    if sigma > 0.0 {
        let radius = (4.0 * sigma).ceil() as usize;
        let kernel = gaussian_kernel(sigma, radius);
        for ch in &mut channels {
            *ch = convolve_separable_clamped(ch, w, h, &kernel);
        }
    }
    channels
}

fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f32> {
    let mut kernel: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= sum);
    kernel.into_iter().map(|v| v as f32).collect()
}

/// Separable convolution with replicated (clamped) borders.
fn convolve_separable_clamped(data: &[f32], w: usize, h: usize, kernel: &[f32]) -> Vec<f32> {
    let radius = kernel.len() / 2;
    let mut tmp = vec![0.0f32; data.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f32;
            for (ki, &kv) in kernel.iter().enumerate() {
                let sx = (x + ki).saturating_sub(radius).min(w - 1);
                acc += kv * data[y * w + sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0f32; data.len()];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0f32;
            for (ki, &kv) in kernel.iter().enumerate() {
                let sy = (y + ki).saturating_sub(radius).min(h - 1);
                acc += kv * tmp[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

fn color_distance(channels: &[Vec<f32>; 3], a: usize, b: usize) -> f32 {
    let mut acc = 0.0f32;
    for ch in channels {
        let d = ch[a] - ch[b];
        acc += d * d;
    }
    acc.sqrt()
}

/// Segment an RGB image into superpixel components.
pub fn segment_graph(image: &RgbImage, params: &SegParams) -> LabelMap {
    let (w, h) = (image.width() as usize, image.height() as usize);
    assert!(w > 0 && h > 0, "segmentation needs a non-empty image");
    let channels = smoothed_channels(image, params.sigma);

    let mut edges = Vec::with_capacity(4 * w * h);
    let idx = |x: usize, y: usize| y * w + x;
    for y in 0..h {
        for x in 0..w {
            let a = idx(x, y);
            if x + 1 < w {
                edges.push((a, idx(x + 1, y)));
            }
            if y + 1 < h {
                edges.push((a, idx(x, y + 1)));
            }
            if x + 1 < w && y + 1 < h {
                edges.push((a, idx(x + 1, y + 1)));
            }
            if x > 0 && y + 1 < h {
                edges.push((a, idx(x - 1, y + 1)));
            }
        }
    }
    let mut edges: Vec<GridEdge> = edges
        .into_iter()
        .map(|(a, b)| GridEdge {
            a: a as u32,
            b: b as u32,
            weight: color_distance(&channels, a, b),
        })
        .collect();
    edges.sort_by(|e, f| e.weight.total_cmp(&f.weight));

    let k = params.k as f32;
    let mut sets = DisjointSets::new(w * h, k);
    for e in &edges {
        let ra = sets.find(e.a);
        let rb = sets.find(e.b);
        if ra == rb {
            continue;
        }
        if e.weight <= sets.threshold[ra as usize].min(sets.threshold[rb as usize]) {
            let root = sets.union(ra, rb);
            sets.threshold[root as usize] = e.weight + k / sets.size[root as usize] as f32;
        }
    }

    // Fold undersized components into their most similar neighbour: sweeping
    // edges in ascending weight order reaches each small component through
    // its cheapest link first.
    for e in &edges {
        let ra = sets.find(e.a);
        let rb = sets.find(e.b);
        if ra != rb
            && ((sets.size[ra as usize] as usize) < params.min_size
                || (sets.size[rb as usize] as usize) < params.min_size)
        {
            sets.union(ra, rb);
        }
    }

    let mut labels = vec![u32::MAX; w * h];
    let mut next = 0u32;
    let mut root_label = vec![u32::MAX; w * h];
    for i in 0..w * h {
        let root = sets.find(i as u32) as usize;
        if root_label[root] == u32::MAX {
            root_label[root] = next;
            next += 1;
        }
        labels[i] = root_label[root];
    }
    LabelMap {
        width: w as u32,
        height: h as u32,
        labels,
        num_components: next as usize,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    fn constant_image(w: u32, h: u32, color: [u8; 3]) -> RgbImage {
        RgbImage::from_pixel(w, h, Rgb(color))
    }

    fn half_plane_image(w: u32, h: u32) -> RgbImage {
        RgbImage::from_fn(w, h, |x, _| {
            if x < w / 2 {
                Rgb([0, 0, 0])
            } else {
                Rgb([255, 255, 255])
            }
        })
    }

    #[test]
    fn constant_image_is_one_segment() {
        for k in [1.0, 100.0, 10_000.0] {
            let img = constant_image(16, 12, [90, 40, 200]);
            let map = segment_graph(&img, &SegParams::new(0.0, k, 1).unwrap());
            assert_eq!(map.component_count(), 1);
        }
    }

    #[test]
    fn half_planes_split_in_two() {
        let img = half_plane_image(16, 8);
        let map = segment_graph(&img, &SegParams::new(0.0, 10.0, 1).unwrap());
        assert_eq!(map.component_count(), 2);
        for y in 0..8 {
            for x in 0..16 {
                let expected = map.label_at(if x < 8 { 0 } else { 15 }, 0);
                assert_eq!(map.label_at(x, y), expected, "pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn hand_traced_four_by_four() {
        // Left half black, right half white, k small: the only edges below
        // threshold are the zero-weight ones inside each half.
        let img = half_plane_image(4, 4);
        let map = segment_graph(&img, &SegParams::new(0.0, 1.0, 1).unwrap());
        assert_eq!(map.component_count(), 2);
        let boxes = map.component_boxes();
        assert_eq!(boxes[0], BoundingBox::new(0.0, 0.0, 2.0, 4.0).unwrap());
        assert_eq!(boxes[1], BoundingBox::new(2.0, 0.0, 4.0, 4.0).unwrap());
    }

    #[test]
    fn min_size_of_image_forces_single_segment() {
        let img = half_plane_image(10, 10);
        let map = segment_graph(&img, &SegParams::new(0.0, 1.0, 100).unwrap());
        assert_eq!(map.component_count(), 1);
    }

    #[test]
    fn labels_partition_and_respect_min_size() {
        let img = RgbImage::from_fn(32, 24, |x, y| {
            Rgb([
                ((x * 37 + y * 11) % 256) as u8,
                ((x * 5 + y * 73) % 256) as u8,
                ((x * 97 + y * 3) % 256) as u8,
            ])
        });
        let params = SegParams::new(0.5, 150.0, 12).unwrap();
        let map = segment_graph(&img, &params);
        let sizes = map.component_sizes();
        assert_eq!(sizes.iter().sum::<usize>(), 32 * 24);
        assert!(sizes.iter().all(|&s| s >= params.min_size));
    }

    #[test]
    fn component_count_non_increasing_in_k() {
        let img = RgbImage::from_fn(24, 24, |x, y| {
            Rgb([
                ((x * 13 + y * 29) % 256) as u8,
                ((x * 41 + y * 7) % 256) as u8,
                ((x + y * y) % 256) as u8,
            ])
        });
        let mut previous = usize::MAX;
        for k in [10.0, 50.0, 200.0, 1000.0] {
            let map = segment_graph(&img, &SegParams::new(0.0, k, 1).unwrap());
            assert!(map.component_count() <= previous, "k={k}");
            previous = map.component_count();
        }
    }

    #[test]
    fn component_count_non_increasing_in_min_size() {
        let img = RgbImage::from_fn(24, 24, |x, y| {
            Rgb([
                ((x * 13 + y * 29) % 256) as u8,
                ((x * 41 + y * 7) % 256) as u8,
                ((x + y * y) % 256) as u8,
            ])
        });
        let mut previous = usize::MAX;
        for min_size in [1, 8, 32, 128, 576] {
            let map = segment_graph(&img, &SegParams::new(0.0, 50.0, min_size).unwrap());
            assert!(map.component_count() <= previous, "min_size={min_size}");
            previous = map.component_count();
        }
    }

    #[test]
    fn param_validation() {
        assert!(SegParams::new(-1.0, 100.0, 1).is_err());
        assert!(SegParams::new(0.5, 0.0, 1).is_err());
        assert!(SegParams::new(0.5, 100.0, 0).is_err());
    }
}
