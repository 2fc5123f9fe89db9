//! Deterministic pseudo-random point sets drawn from a grid density, plus
//! the cell-count statistics both approximation schemes rely on.
//!
//! Randomness engineering is deliberately boring: everything derives from
//! SplitMix64. [`sample_points`] gives point `i` its own substream seeded at
//! `mix64(mix64(seed) + (i+1)·φ64)`, so the `i`-th point is a pure function
//! of `(density, seed, i)` and trials can be generated in any order — or in
//! parallel — with identical results.

use crate::density::Density;

/// Weyl increment used by SplitMix64 (the 64-bit golden ratio).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: bijective avalanche mix of a 64-bit word.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Minimal SplitMix64 generator: a counter walked by the golden-ratio
/// increment and hashed through [`mix64`]. Used for point substreams, trial
/// seed derivation, and randomized tests.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..bound`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// A point of the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// An i.i.d. sample from a density, together with the seed that produced it
/// and a hash identifying the density.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    pub seed: u64,
    pub density_id: String,
}

impl SampleSet {
    /// Wraps externally supplied points (e.g. parsed from a CSV file).
    pub fn from_points(points: Vec<Point>) -> Self {
        Self {
            points,
            seed: 0,
            density_id: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of sample points in each cell of an `m × m` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCounts {
    pub m: usize,
    /// Row-major: `counts[cy * m + cx]`.
    pub counts: Vec<usize>,
}

/// Draws `n` points i.i.d. from the density.
///
/// Each point picks its cell by inverting the cell-probability CDF
/// (`p_k = f_k/m²`) and then a uniform position inside the cell, consuming
/// three values of its private substream. Identical `(density, n, seed)`
/// reproduce bit-identical points; `n = 0` yields an empty set.
pub fn sample_points(density: &Density, n: usize, seed: u64) -> SampleSet {
    let m = density.m();
    let cell_area = density.cell_area();
    // Cumulative cell probabilities; the exact final value is used as the
    // scale so the draw never falls off the end.
    let mut cum = Vec::with_capacity(m * m);
    let mut acc = 0.0;
    for &v in density.values() {
        acc += v * cell_area;
        cum.push(acc);
    }
    let total = acc;

    let master = mix64(seed);
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let sub = mix64(master.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN_GAMMA)));
        let mut rng = SplitMix64::new(sub);
        let target = rng.next_f64() * total;
        // First cell whose cumulative mass exceeds the draw; zero-mass cells
        // have empty intervals and are never selected.
        let k = cum.partition_point(|&c| c <= target).min(m * m - 1);
        let cx = k % m;
        let cy = k / m;
        let x = (cx as f64 + rng.next_f64()) / m as f64;
        let y = (cy as f64 + rng.next_f64()) / m as f64;
        points.push(Point::new(x, y));
    }

    SampleSet {
        points,
        seed,
        density_id: density.content_hash(),
    }
}

/// Bins points into an `m × m` grid: `(x, y)` lands in `(⌊mx⌋, ⌊my⌋)`,
/// clamped to `m − 1` on the closing boundary so no point is dropped.
pub fn cell_counts(sample: &SampleSet, m: usize) -> CellCounts {
    assert!(m >= 1, "grid resolution must be >= 1");
    let mut counts = vec![0usize; m * m];
    for p in &sample.points {
        counts[cell_index(p, m)] += 1;
    }
    CellCounts { m, counts }
}

/// Row-major cell index of a point at resolution `m`.
pub(crate) fn cell_index(p: &Point, m: usize) -> usize {
    let cx = ((p.x * m as f64) as usize).min(m - 1);
    let cy = ((p.y * m as f64) as usize).min(m - 1);
    cy * m + cx
}

/// Per-trial seed for experiment runs: `base_seed ⊕ mix64(n ∥ trial)`.
/// Distinct `(n, trial)` pairs get distinct streams, so no two trials share
/// a point set.
pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    base_seed ^ mix64(((n as u64) << 32) | trial as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;
    use std::collections::HashSet;

    #[test]
    fn sampling_is_deterministic() {
        let d = Density::from_weights(&[3.0, 1.0, 3.0, 1.0], 2).unwrap();
        let a = sample_points(&d, 64, 7);
        let b = sample_points(&d, 64, 7);
        assert_eq!(a, b);
        let c = sample_points(&d, 64, 8);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn empty_sample() {
        let s = sample_points(&Density::uniform(2), 0, 1);
        assert!(s.is_empty());
        assert_eq!(s.seed, 1);
    }

    #[test]
    fn points_land_in_positive_cells() {
        // Zero-mass cells must never receive a point.
        let d = Density::from_weights(&[1.0, 0.0, 0.0, 2.0], 2).unwrap();
        let s = sample_points(&d, 5_000, 3);
        for p in &s.points {
            assert!((0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.y));
            let k = cell_index(p, 2);
            assert!(d.values()[k] > 0.0, "point {p:?} fell in a zero cell");
        }
    }

    #[test]
    fn counts_conserve_points() {
        let d = Density::uniform(4);
        let s = sample_points(&d, 1_000, 5);
        let counts = cell_counts(&s, 4);
        assert_eq!(counts.counts.iter().sum::<usize>(), 1_000);
    }

    #[test]
    fn boundary_points_are_clamped() {
        let s = SampleSet::from_points(vec![
            Point::new(1.0, 1.0),
            Point::new(0.6, 0.6),
            Point::new(0.0, 1.0),
            Point::new(0.5, 0.25),
        ]);
        let c = cell_counts(&s, 4);
        assert_eq!(c.counts.iter().sum::<usize>(), 4);
        assert_eq!(c.counts[4 * 3 + 3], 1); // (1.0, 1.0) clamps to (3, 3)
        assert_eq!(c.counts[4 * 2 + 2], 1); // (0.6, 0.6) in (2, 2)
        assert_eq!(c.counts[4 * 3], 1); // (0.0, 1.0) clamps to (0, 3)
        assert_eq!(c.counts[4 + 2], 1); // (0.5, 0.25) in (2, 1)

        let c1 = cell_counts(&s, 2);
        assert_eq!(c1.counts[2 + 1], 2); // (0.6, 0.6) and clamped (1.0, 1.0)
    }

    #[test]
    fn single_point_binning() {
        let s = SampleSet::from_points(vec![Point::new(0.6, 0.6)]);
        let c = cell_counts(&s, 2);
        assert_eq!(c.counts, vec![0, 0, 0, 1]);
    }

    #[test]
    fn empirical_frequencies_track_cell_probabilities() {
        // 4σ binomial envelope on every cell at n = 1e5.
        let n = 100_000usize;
        for d in [
            Density::uniform(4),
            Density::from_weights(&[3.0, 1.0, 3.0, 1.0], 2).unwrap(),
            Density::from_weights(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0], 3).unwrap(),
        ] {
            let s = sample_points(&d, n, 97);
            let counts = cell_counts(&s, d.m());
            for (k, &c) in counts.counts.iter().enumerate() {
                let p = d.values()[k] * d.cell_area();
                let bound = 4.0 * (p * n as f64).sqrt() / n as f64;
                let dev = (c as f64 / n as f64 - p).abs();
                assert!(dev < bound.max(1e-12), "cell {k}: dev {dev} vs {bound}");
            }
        }
    }

    #[test]
    fn trial_seeds_are_distinct() {
        let mut seen = HashSet::new();
        for n in [16usize, 32, 64, 128] {
            for trial in 0..50 {
                assert!(seen.insert(trial_seed(42, n, trial)));
            }
        }
    }

    #[test]
    fn substreams_are_not_shifted_copies() {
        // Neighboring point substreams must not overlap: the coordinates of
        // consecutive points should share no values.
        let d = Density::uniform(1);
        let s = sample_points(&d, 100, 1234);
        for w in s.points.windows(2) {
            assert_ne!(w[0].x.to_bits(), w[1].x.to_bits());
            assert_ne!(w[0].y.to_bits(), w[1].x.to_bits());
            assert_ne!(w[0].y.to_bits(), w[1].y.to_bits());
        }
    }

    #[test]
    fn uniform_counts_pass_chi_square() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};

        let d = Density::uniform(4);
        let s = sample_points(&d, 10_000, 7);
        let counts = cell_counts(&s, 4);
        let expected = 10_000.0 / 16.0;
        let stat: f64 = counts
            .counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new(15.0).unwrap().cdf(stat);
        assert!(p > 0.001, "chi-square statistic {stat}, p = {p}");
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use crate::density::Density;
    use proptest::prelude::*;

    proptest! {
        /// Identical inputs give bit-identical samples.
        #[test]
        fn sampling_deterministic(n in 0usize..200, seed in any::<u64>()) {
            let d = Density::from_weights(&[2.0, 1.0, 0.5, 3.0], 2).unwrap();
            let a = sample_points(&d, n, seed);
            let b = sample_points(&d, n, seed);
            prop_assert_eq!(a, b);
        }

        /// Binning never drops a point, whatever the resolution.
        #[test]
        fn binning_conserves_points(n in 0usize..300, seed in any::<u64>(), m in 1usize..9) {
            let d = Density::uniform(3);
            let s = sample_points(&d, n, seed);
            let counts = cell_counts(&s, m);
            prop_assert_eq!(counts.counts.iter().sum::<usize>(), n);
        }
    }
}
