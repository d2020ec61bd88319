//! Uniform and Gaussian box samplers.

use nalgebra::{Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::baselines::stats::{box_from_params, BoxParamStats};
use crate::geometry::BoundingBox;

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Raw parameter draws of the uniform baseline, before box conversion and
/// clipping. Exposed so distribution tests can check the unclipped stream.
pub fn uniform_param_stream(stats: &BoxParamStats, n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = rng_for(seed);
    (0..n)
        .map(|_| {
            std::array::from_fn(|i| {
                let [lo, hi] = stats.ranges[i];
                lo + rng.random::<f64>() * (hi - lo)
            })
        })
        .collect()
}

/// Sample boxes with each parameter drawn independently and uniformly over
/// its trimmed training range.
pub fn sample_uniform(
    stats: &BoxParamStats,
    width: u32,
    height: u32,
    n: usize,
    seed: u64,
) -> Vec<BoundingBox> {
    uniform_param_stream(stats, n, seed)
        .into_iter()
        .map(|p| box_from_params(p, width as f64, height as f64, stats.normalized))
        .collect()
}

/// Symmetric square root of the covariance via eigendecomposition, with
/// negative eigenvalues clamped to zero so degenerate fits stay usable.
fn covariance_sqrt(cov: &[[f64; 4]; 4]) -> Matrix4<f64> {
    let m = Matrix4::from_fn(|i, j| cov[i][j]);
    let eig = m.symmetric_eigen();
    let sqrt_vals = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    eig.eigenvectors * sqrt_vals * eig.eigenvectors.transpose()
}

/// Raw parameter draws of the Gaussian baseline, before box conversion and
/// clipping.
pub fn gaussian_param_stream(stats: &BoxParamStats, n: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = rng_for(seed);
    let sqrt = covariance_sqrt(&stats.cov);
    let mean = Vector4::from_column_slice(&stats.mean);
    (0..n)
        .map(|_| {
            let z = Vector4::from_fn(|_, _| rng.sample(StandardNormal));
            let p = mean + sqrt * z;
            [p[0], p[1], p[2], p[3]]
        })
        .collect()
}

/// Sample boxes from the multivariate normal fitted to the training
/// parameters.
pub fn sample_gaussian(
    stats: &BoxParamStats,
    width: u32,
    height: u32,
    n: usize,
    seed: u64,
) -> Vec<BoundingBox> {
    gaussian_param_stream(stats, n, seed)
        .into_iter()
        .map(|p| box_from_params(p, width as f64, height as f64, stats.normalized))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed_stats() -> BoxParamStats {
        BoxParamStats {
            ranges: [[100.0, 500.0], [80.0, 400.0], [30.0, 200.0], [-0.7, 0.7]],
            mean: [300.0, 240.0, 110.0, 0.0],
            cov: [
                [400.0, 0.0, 0.0, 0.0],
                [0.0, 300.0, 0.0, 0.0],
                [0.0, 0.0, 100.0, 0.0],
                [0.0, 0.0, 0.0, 0.04],
            ],
            normalized: false,
        }
    }

    #[test]
    fn zero_count() {
        assert!(sample_uniform(&fixed_stats(), 640, 480, 0, 1).is_empty());
        assert!(sample_gaussian(&fixed_stats(), 640, 480, 0, 1).is_empty());
    }

    #[test]
    fn reproducible_given_seed() {
        let s = fixed_stats();
        assert_eq!(
            sample_uniform(&s, 640, 480, 50, 42),
            sample_uniform(&s, 640, 480, 50, 42)
        );
        assert_eq!(
            sample_gaussian(&s, 640, 480, 50, 42),
            sample_gaussian(&s, 640, 480, 50, 42)
        );
        assert_ne!(
            sample_uniform(&s, 640, 480, 50, 42),
            sample_uniform(&s, 640, 480, 50, 43)
        );
    }

    #[test]
    fn degenerate_ranges_give_identical_boxes() {
        let mut s = fixed_stats();
        s.ranges = [[320.0, 320.0], [240.0, 240.0], [64.0, 64.0], [0.0, 0.0]];
        let boxes = sample_uniform(&s, 640, 480, 10, 7);
        assert!(boxes.windows(2).all(|w| w[0] == w[1]));
        let b = boxes[0];
        assert!((b.width() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn zero_covariance_gives_mean_box() {
        let mut s = fixed_stats();
        s.cov = [[0.0; 4]; 4];
        let boxes = sample_gaussian(&s, 640, 480, 5, 3);
        assert!(boxes.windows(2).all(|w| w[0] == w[1]));
        let b = boxes[0];
        assert!((b.center().0 - 300.0).abs() < 1e-9);
        assert!((b.sqrt_area() - 110.0).abs() < 1e-6);
    }

    #[test]
    fn boxes_stay_inside_image() {
        let s = fixed_stats();
        for b in sample_gaussian(&s, 640, 480, 2000, 11)
            .into_iter()
            .chain(sample_uniform(&s, 640, 480, 2000, 11))
        {
            assert!(b.x0() >= 0.0 && b.y0() >= 0.0);
            assert!(b.x1() <= 640.0 && b.y1() <= 480.0);
            assert!(b.width() > 0.0 && b.height() > 0.0);
        }
    }

    #[test]
    fn uniform_marginals_pass_ks() {
        // Kolmogorov-Smirnov on the unclipped stream against the uniform CDF
        // at significance 0.01 (critical value 1.628 / sqrt(n)).
        let s = fixed_stats();
        let n = 100_000;
        let stream = uniform_param_stream(&s, n, 123);
        for param in [0usize, 2] {
            let [lo, hi] = s.ranges[param];
            let mut values: Vec<f64> = stream.iter().map(|p| p[param]).collect();
            values.sort_by(f64::total_cmp);
            let mut d: f64 = 0.0;
            for (i, v) in values.iter().enumerate() {
                let cdf = (v - lo) / (hi - lo);
                let lo_step = i as f64 / n as f64;
                let hi_step = (i + 1) as f64 / n as f64;
                d = d.max((cdf - lo_step).abs()).max((hi_step - cdf).abs());
            }
            let critical = 1.628 / (n as f64).sqrt();
            assert!(
                d < critical,
                "param {param}: KS statistic {d} >= {critical}"
            );
        }
    }

    #[test]
    fn gaussian_mean_converges() {
        let s = fixed_stats();
        let n = 100_000;
        let stream = gaussian_param_stream(&s, n, 99);
        for i in 0..4 {
            let mean: f64 = stream.iter().map(|p| p[i]).sum::<f64>() / n as f64;
            let sigma = s.cov[i][i].sqrt();
            let tol = 3.0 * sigma / (n as f64).sqrt();
            assert!(
                (mean - s.mean[i]).abs() < tol,
                "param {i}: |{mean} - {}| >= {tol}",
                s.mean[i]
            );
        }
    }

    #[test]
    fn gaussian_identity_covariance_recovered() {
        let s = BoxParamStats {
            ranges: [[0.0, 1.0]; 4],
            mean: [0.0; 4],
            cov: [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
                [0.0, 0.0, 0.0, 1.0],
            ],
            normalized: false,
        };
        let n = 100_000;
        let stream = gaussian_param_stream(&s, n, 2024);
        let mut mean = [0.0; 4];
        for p in &stream {
            for i in 0..4 {
                mean[i] += p[i];
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut cov = [[0.0; 4]; 4];
        for p in &stream {
            for i in 0..4 {
                for j in 0..4 {
                    cov[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]);
                }
            }
        }
        let mut frob_err = 0.0;
        let mut frob_id = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                cov[i][j] /= n as f64 - 1.0;
                let target = if i == j { 1.0 } else { 0.0 };
                frob_err += (cov[i][j] - target) * (cov[i][j] - target);
                frob_id += target * target;
            }
        }
        assert!(
            frob_err.sqrt() < 0.05 * frob_id.sqrt(),
            "Frobenius error {} too large",
            frob_err.sqrt()
        );
    }

    #[test]
    fn negative_eigenvalues_are_clamped() {
        // A slightly indefinite matrix (numerical noise scale) must not panic.
        let mut s = fixed_stats();
        s.cov = [
            [1.0, 1.0, 0.0, 0.0],
            [1.0, 1.0 - 1e-12, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        let boxes = sample_gaussian(&s, 640, 480, 100, 5);
        assert_eq!(boxes.len(), 100);
    }
}
