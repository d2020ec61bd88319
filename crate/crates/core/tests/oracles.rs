//! Oracle checks: every analytic result is re-derived through an
//! independent route (pixel counting, brute-force extraction, Monte-Carlo
//! sampling) before being trusted.

use propeval::geometry::{greedy_match, iou, quad_box_iou, BoundingBox, Quad, Region};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn bb(x0: f64, y0: f64, x1: f64, y1: f64) -> BoundingBox {
    BoundingBox::new(x0, y0, x1, y1).unwrap()
}

/// Count unit pixel cells inside a box (integer corners assumed).
fn pixel_membership_iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let x_lo = a.x0().min(b.x0()) as i64;
    let x_hi = a.x1().max(b.x1()) as i64;
    let y_lo = a.y0().min(b.y0()) as i64;
    let y_hi = a.y1().max(b.y1()) as i64;
    let mut inter = 0u64;
    let mut union = 0u64;
    for y in y_lo..y_hi {
        for x in x_lo..x_hi {
            let cx = x as f64 + 0.5;
            let cy = y as f64 + 0.5;
            let in_a = cx > a.x0() && cx < a.x1() && cy > a.y0() && cy < a.y1();
            let in_b = cx > b.x0() && cx < b.x1() && cy > b.y0() && cy < b.y1();
            if in_a && in_b {
                inter += 1;
            }
            if in_a || in_b {
                union += 1;
            }
        }
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn random_int_box(rng: &mut StdRng, extent: u32) -> BoundingBox {
    let mut xs = [rng.random_range(0..=extent), rng.random_range(0..=extent)];
    let mut ys = [rng.random_range(0..=extent), rng.random_range(0..=extent)];
    xs.sort_unstable();
    ys.sort_unstable();
    bb(xs[0] as f64, ys[0] as f64, xs[1] as f64, ys[1] as f64)
}

#[test]
fn analytic_iou_matches_pixel_counting() {
    let mut rng = StdRng::seed_from_u64(0xB0C5);
    for _ in 0..1000 {
        let a = random_int_box(&mut rng, 100);
        let b = random_int_box(&mut rng, 100);
        let analytic = iou(&a, &b);
        let counted = pixel_membership_iou(&a, &b);
        assert!(
            (analytic - counted).abs() < 1e-12,
            "{a:?} vs {b:?}: analytic {analytic} counted {counted}"
        );
    }
}

#[test]
fn half_shift_example_against_oracle() {
    let a = bb(0.0, 0.0, 10.0, 10.0);
    let b = bb(5.0, 0.0, 15.0, 10.0);
    assert_eq!(pixel_membership_iou(&a, &b), 50.0 / 150.0);
    assert!((iou(&a, &b) - 1.0 / 3.0).abs() < 1e-12);
}

/// Repeated extraction of the globally best remaining pair, ties broken by
/// the smaller first index, then the smaller second index.
fn extract_global_max_matching(a: &[Region], b: &[BoundingBox]) -> Vec<(usize, usize, f64)> {
    let mut a_free: Vec<bool> = vec![true; a.len()];
    let mut b_free: Vec<bool> = vec![true; b.len()];
    let mut out = Vec::new();
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for (ai, ra) in a.iter().enumerate() {
            if !a_free[ai] {
                continue;
            }
            for (bi, rb) in b.iter().enumerate() {
                if !b_free[bi] {
                    continue;
                }
                let v = ra.iou_with_box(rb);
                if v > 0.0 && best.is_none_or(|(_, _, bv)| v > bv) {
                    best = Some((ai, bi, v));
                }
            }
        }
        match best {
            Some((ai, bi, v)) => {
                a_free[ai] = false;
                b_free[bi] = false;
                out.push((ai, bi, v));
            }
            None => break,
        }
    }
    out
}

#[test]
fn greedy_match_equals_extraction_oracle() {
    let mut rng = StdRng::seed_from_u64(0x6EED);
    for case in 0..500 {
        let na = rng.random_range(0..=6);
        let nb = rng.random_range(0..=6);
        // Small integer coordinates provoke plenty of exact IoU ties.
        let a: Vec<Region> = (0..na)
            .map(|_| Region::Box(random_int_box(&mut rng, 12)))
            .collect();
        let b: Vec<BoundingBox> = (0..nb).map(|_| random_int_box(&mut rng, 12)).collect();
        let fast = greedy_match(&a, &b);
        let oracle = extract_global_max_matching(&a, &b);
        let fast_pairs: Vec<(usize, usize, f64)> =
            fast.pairs.iter().map(|p| (p.a, p.b, p.iou)).collect();
        assert_eq!(fast_pairs, oracle, "case {case}");
    }
}

#[test]
fn rotated_square_iou_against_monte_carlo() {
    let quad = {
        let (s, c) = (45f64).to_radians().sin_cos();
        Quad::new(std::array::from_fn(|i| {
            let [x, y]: [f64; 2] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]][i];
            let (dx, dy) = (x - 0.5, y - 0.5);
            [0.5 + c * dx - s * dy, 0.5 + s * dx + c * dy]
        }))
        .unwrap()
    };
    let unit = bb(0.0, 0.0, 1.0, 1.0);
    let analytic = quad_box_iou(&quad, &unit);
    let closed_form = (2.0 * 2f64.sqrt() - 2.0) / (4.0 - 2.0 * 2f64.sqrt());
    assert!((analytic - closed_form).abs() < 1e-6);

    let inside_quad = |x: f64, y: f64| {
        let v = quad.vertices();
        (0..4).all(|i| {
            let p = v[i];
            let q = v[(i + 1) % 4];
            (q[0] - p[0]) * (y - p[1]) - (q[1] - p[1]) * (x - p[0]) >= 0.0
        })
    };
    let mut rng = StdRng::seed_from_u64(0xCAFE);
    let margin = 2f64.sqrt() / 2.0 - 0.5;
    let (lo, hi) = (-margin, 1.0 + margin);
    let mut inter = 0u64;
    let mut union = 0u64;
    for _ in 0..1_000_000 {
        let x = rng.random_range(lo..hi);
        let y = rng.random_range(lo..hi);
        let in_box = x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0;
        let in_quad = inside_quad(x, y);
        if in_box && in_quad {
            inter += 1;
        }
        if in_box || in_quad {
            union += 1;
        }
    }
    let sampled = inter as f64 / union as f64;
    assert!(
        (sampled - analytic).abs() < 2e-3,
        "monte-carlo {sampled} vs analytic {analytic}"
    );
}
