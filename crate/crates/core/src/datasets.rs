//! Bundled 2D point sets.
//!
//! `fish` is a 91-point silhouette resampled from a hand-drawn outline; any
//! other point-set file in the plain-text format can be loaded with
//! [`crate::geometry::load_point_set`].

use rand_distr::{Distribution, Normal};

use crate::geometry::PointSet;
use crate::rng::seeded_rng;

/// Number of points in [`fish`].
pub const FISH_POINTS: usize = 91;

const FISH_TEXT: &str = include_str!("../data/fish.txt");

/// Closed outline of a fish facing +x, counter-clockwise from the snout.
const FISH_OUTLINE: [(f64, f64); 25] = [
    (1.00, 0.00),
    (0.90, 0.18),
    (0.70, 0.32),
    (0.45, 0.40),
    (0.20, 0.42),
    (0.10, 0.55),
    (0.00, 0.40),
    (-0.25, 0.33),
    (-0.50, 0.20),
    (-0.65, 0.08),
    (-0.90, 0.35),
    (-0.95, 0.30),
    (-0.80, 0.00),
    (-0.95, -0.30),
    (-0.90, -0.35),
    (-0.65, -0.08),
    (-0.50, -0.20),
    (-0.25, -0.30),
    (0.00, -0.35),
    (0.10, -0.45),
    (0.20, -0.38),
    (0.45, -0.36),
    (0.70, -0.28),
    (0.90, -0.15),
    (1.00, 0.00),
];

/// The bundled fish silhouette, as stored in `data/fish.txt`.
pub fn fish() -> PointSet {
    PointSet::parse(FISH_TEXT).expect("bundled fish data is well-formed")
}

/// `n` points spaced evenly by arc length along the fish outline.
pub fn fish_outline(n: usize) -> PointSet {
    let seg: Vec<f64> = FISH_OUTLINE
        .windows(2)
        .map(|w| ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt())
        .collect();
    let total: f64 = seg.iter().sum();
    let mut points = Vec::with_capacity(n);
    let (mut i, mut start) = (0, 0.0);
    for p in 0..n {
        let target = total * p as f64 / n as f64;
        while start + seg[i] < target {
            start += seg[i];
            i += 1;
        }
        let f = (target - start) / seg[i];
        let (a, b) = (FISH_OUTLINE[i], FISH_OUTLINE[i + 1]);
        points.push(vec![a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1)]);
    }
    PointSet::new(2, &points).expect("outline points are finite")
}

/// `n` points on a circle, with a radial ripple so that the set has no
/// rotational symmetry.
pub fn ring(n: usize, radius: f64) -> PointSet {
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / n as f64;
            let r = radius * (1.0 + 0.1 * (3.0 * a).sin() + 0.05 * a.cos());
            vec![r * a.cos(), r * a.sin()]
        })
        .collect();
    PointSet::new(2, &points).expect("ring points are finite")
}

/// Regular `nx × ny` lattice with unit spacing.
pub fn grid(nx: usize, ny: usize) -> PointSet {
    let points: Vec<Vec<f64>> = (0..ny)
        .flat_map(|y| (0..nx).map(move |x| vec![x as f64, y as f64]))
        .collect();
    PointSet::new(2, &points).expect("grid points are finite")
}

/// Isotropic Gaussian clusters around the given centers.
pub fn blobs(centers: &[(f64, f64)], per_blob: usize, sigma: f64, seed: u64) -> PointSet {
    let mut rng = seeded_rng(seed, 0);
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    let points: Vec<Vec<f64>> = centers
        .iter()
        .flat_map(|&(cx, cy)| std::iter::repeat_n((cx, cy), per_blob))
        .map(|(cx, cy)| vec![cx + normal.sample(&mut rng), cy + normal.sample(&mut rng)])
        .collect();
    PointSet::new(2, &points).expect("blob points are finite")
}

/// Look up a bundled dataset by name.
pub fn by_name(name: &str) -> Option<PointSet> {
    match name {
        "fish" => Some(fish()),
        "ring" => Some(ring(60, 1.0)),
        "grid" => Some(grid(8, 6)),
        "blobs" => Some(blobs(&[(-1.0, 0.0), (1.0, 0.5), (0.0, -1.0)], 20, 0.25, 7)),
        _ => None,
    }
}
