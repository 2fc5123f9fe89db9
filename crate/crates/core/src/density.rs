//! Piecewise-constant probability densities on the unit square and the
//! closed-form rate functionals built on their level sets.
//!
//! A [`Density`] is an `m × m` grid of nonnegative cell values normalized so
//! the function integrates to one. Scaling analysis never needs the density
//! pointwise: everything factors through the [`LevelDecomposition`] — the
//! distinct values `z₁ < … < z_S`, the area `h(z_s)` each value occupies, and
//! the running masses below each value. On top of it sit two functionals:
//!
//! - [`Density::latency_rate_integral`]: the `n^{1+α/2}` prefactor bracket
//!   of the power-law repairman objective,
//!   `∫ √z·[(η + √z·h)^{α+1} − η^{α+1}]/(α+1)` summed over levels, where
//!   `η(z) = ∫ √f·1_{f<z}`;
//! - [`Density::coverage_rate`]: the `√n` prefactor for visiting a fraction
//!   `κ` of the points, obtained by filling mass from the highest density
//!   value downward.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Tolerance on `Σ f_k / m² = 1` enforced at construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A piecewise-constant probability density on `[0,1]²`.
///
/// Cell `(cx, cy)` covers `[cx/m, (cx+1)/m) × [cy/m, (cy+1)/m)` and carries
/// the value `values[cy * m + cx]` (row-major). Values are stored
/// normalized: `Σ values[k] / m² = 1` within [`NORMALIZATION_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity")]
pub struct Density {
    m: usize,
    values: Vec<f64>,
}

/// On-disk shape of a density: raw weights are renormalized on load, so
/// hand-written files do not need to integrate to one.
#[derive(Deserialize)]
struct RawDensity {
    m: usize,
    values: Vec<f64>,
}

impl TryFrom<RawDensity> for Density {
    type Error = Error;

    fn try_from(raw: RawDensity) -> Result<Self> {
        Density::from_weights(&raw.values, raw.m)
    }
}

/// Levels of a density sorted ascending, with per-level areas and the
/// cumulative masses strictly below each level.
///
/// Zero-valued cells carry no probability and are excluded: `levels` holds
/// only positive values, and `Σ areas` is the support area.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDecomposition {
    /// Distinct positive cell values `z₁ < … < z_S`. Cells are grouped by
    /// exact (bitwise) equality of their stored values.
    pub levels: Vec<f64>,
    /// `h(z_s)`: area of `{f = z_s}`.
    pub areas: Vec<f64>,
    /// `η_s = ∫ √f · 1_{f < z_s}`.
    pub below_sqrt_mass: Vec<f64>,
    /// `F⁻(z_s) = ∫ f · 1_{f < z_s}`: probability mass strictly below `z_s`.
    pub below_prob: Vec<f64>,
}

/// Result of [`Density::coverage_rate`]: the density threshold `y₀` at which
/// the top-mass fraction reaches `κ`, and the rate value itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRate {
    /// Smallest level `y₀` with `∫ f · 1_{f > y₀} ≤ κ`.
    pub threshold: f64,
    /// `∫ √f · 1_{f > y₀} + (κ − ∫ f · 1_{f > y₀}) / √y₀`.
    pub rate: f64,
}

impl Density {
    /// Builds a density from raw nonnegative weights, scaling them so the
    /// function integrates to one. Relative cell proportions are preserved.
    pub fn from_weights(weights: &[f64], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("grid resolution m must be >= 1".into()));
        }
        if weights.len() != m * m {
            return Err(Error::InvalidDensity(format!(
                "expected {} cell values for m = {}, got {}",
                m * m,
                m,
                weights.len()
            )));
        }
        let mut sum = 0.0;
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidDensity(format!(
                    "cell weights must be finite and nonnegative, got {w}"
                )));
            }
            sum += w;
        }
        if sum <= 0.0 {
            return Err(Error::InvalidDensity("all cell weights are zero".into()));
        }
        // Already-normalized input is kept bit-for-bit, so loading a stored
        // density round-trips exactly.
        let cell_count = (m * m) as f64;
        let values = if (sum / cell_count - 1.0).abs() <= NORMALIZATION_TOL {
            weights.to_vec()
        } else {
            let scale = cell_count / sum;
            weights.iter().map(|w| w * scale).collect()
        };
        Ok(Self { m, values })
    }

    /// The uniform density at resolution `m`.
    pub fn uniform(m: usize) -> Self {
        assert!(m >= 1);
        Self {
            m,
            values: vec![1.0; m * m],
        }
    }

    /// Cell-averages an arbitrary nonnegative function into a grid density.
    ///
    /// Each cell value is the mean of `sampler` over a deterministic
    /// `r × r` midpoint lattice inside the cell, where `r = ⌈√quad_points⌉`
    /// (so at least `quad_points` evaluations per cell); the averages are
    /// then normalized through [`Density::from_weights`].
    pub fn from_function<F>(sampler: F, m: usize, quad_points: usize) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64,
    {
        if m == 0 {
            return Err(Error::Domain("grid resolution m must be >= 1".into()));
        }
        if quad_points == 0 {
            return Err(Error::Domain("quad_points must be >= 1".into()));
        }
        let r = (quad_points as f64).sqrt().ceil() as usize;
        let mut weights = vec![0.0; m * m];
        for cy in 0..m {
            for cx in 0..m {
                let mut acc = 0.0;
                for by in 0..r {
                    for bx in 0..r {
                        let x = (cx as f64 + (bx as f64 + 0.5) / r as f64) / m as f64;
                        let y = (cy as f64 + (by as f64 + 0.5) / r as f64) / m as f64;
                        let v = sampler(x, y);
                        if !v.is_finite() || v < 0.0 {
                            return Err(Error::InvalidFunction { x, y, value: v });
                        }
                        acc += v;
                    }
                }
                weights[cy * m + cx] = acc / (r * r) as f64;
            }
        }
        Self::from_weights(&weights, m)
    }

    /// Grid resolution.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Normalized cell values, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on cell `(cx, cy)`.
    pub fn value_at(&self, cx: usize, cy: usize) -> f64 {
        self.values[cy * self.m + cx]
    }

    /// Area of one cell, `1/m²`.
    pub fn cell_area(&self) -> f64 {
        1.0 / (self.m * self.m) as f64
    }

    /// Area covered by cells with positive value.
    pub fn support_area(&self) -> f64 {
        let positive = self.values.iter().filter(|&&v| v > 0.0).count();
        positive as f64 / (self.m * self.m) as f64
    }

    /// Largest cell value (the sup of the cell-averaged density).
    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// Smallest positive cell value.
    pub fn min_positive_value(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .filter(|&v| v > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Groups cells into level sets and accumulates the running masses the
    /// rate functionals consume. Equality of cell values is exact; callers
    /// wanting near-equal values merged must quantize their inputs.
    pub fn level_decomposition(&self) -> LevelDecomposition {
        let cell_count = (self.m * self.m) as f64;
        let mut sorted: Vec<f64> = self.values.iter().cloned().filter(|&v| v > 0.0).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let mut levels = Vec::new();
        let mut areas = Vec::new();
        let mut below_sqrt_mass = Vec::new();
        let mut below_prob = Vec::new();

        let mut eta = 0.0;
        let mut mass = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let z = sorted[i];
            let mut run = 0usize;
            while i < sorted.len() && sorted[i] == z {
                run += 1;
                i += 1;
            }
            let h = run as f64 / cell_count;
            levels.push(z);
            areas.push(h);
            below_sqrt_mass.push(eta);
            below_prob.push(mass);
            eta += z.sqrt() * h;
            mass += z * h;
        }

        LevelDecomposition {
            levels,
            areas,
            below_sqrt_mass,
            below_prob,
        }
    }

    /// Closed-form rate integral for the power-law latency objective with
    /// exponent `alpha >= 1`.
    ///
    /// Summing the level contribution
    /// `√z·[(η + √z·h)^{α+1} − η^{α+1}]/(α+1)` over the decomposition
    /// evaluates `∫ g_α` exactly for any grid density; see
    /// [`rate_integrand`] for the pointwise form.
    pub fn latency_rate_integral(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let dec = self.level_decomposition();
        let mut total = 0.0;
        for s in 0..dec.levels.len() {
            let z = dec.levels[s];
            let h = dec.areas[s];
            total += h * rate_integrand(z, dec.below_sqrt_mass[s], h, alpha);
        }
        Ok(total)
    }

    /// Rate for visiting a fraction `kappa ∈ (0, 1]` of the points by
    /// covering the densest mass first.
    ///
    /// The cumulative distribution here is the law of the density value at a
    /// sampled point, `F(y) = ∫ f · 1_{f ≤ y}`, so `1 − F(y) ≤ κ` asks that
    /// at most a `κ`-fraction of points land where the density exceeds `y`.
    pub fn coverage_rate(&self, kappa: f64) -> Result<CoverageRate> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::Domain(format!(
                "kappa must lie in (0, 1], got {kappa}"
            )));
        }
        let dec = self.level_decomposition();
        // Scan levels top-down; `above` accumulates the probability mass
        // strictly above the level under consideration. The threshold is the
        // smallest level whose strictly-above mass still fits inside kappa.
        let mut idx = dec.levels.len() - 1;
        let mut chosen_above = 0.0;
        let mut chosen_sqrt = 0.0;
        let mut above = 0.0;
        let mut sqrt_above = 0.0;
        for s in (0..dec.levels.len()).rev() {
            if above <= kappa {
                idx = s;
                chosen_above = above;
                chosen_sqrt = sqrt_above;
                above += dec.levels[s] * dec.areas[s];
                sqrt_above += dec.levels[s].sqrt() * dec.areas[s];
            } else {
                break;
            }
        }
        let y0 = dec.levels[idx];
        let rate = chosen_sqrt + (kappa - chosen_above) / y0.sqrt();
        Ok(CoverageRate {
            threshold: y0,
            rate,
        })
    }

    /// Subdivides every cell into `beta × beta` equal copies of itself.
    ///
    /// The refined density is pointwise identical, so every functional of
    /// the level decomposition is unchanged (bit-for-bit: the level values,
    /// areas, and running masses come out identical).
    pub fn refine(&self, beta: usize) -> Result<Self> {
        if beta == 0 {
            return Err(Error::Domain("refinement factor must be >= 1".into()));
        }
        if beta == 1 {
            return Ok(self.clone());
        }
        let m2 = self.m * beta;
        let mut values = vec![0.0; m2 * m2];
        for cy in 0..self.m {
            for cx in 0..self.m {
                let v = self.values[cy * self.m + cx];
                for by in 0..beta {
                    for bx in 0..beta {
                        values[(cy * beta + by) * m2 + (cx * beta + bx)] = v;
                    }
                }
            }
        }
        Ok(Self { m: m2, values })
    }

    /// Stable content hash (hex SHA-256 over `m` and the cell value bits);
    /// identifies the generating density in sample manifests.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.m as u64).to_le_bytes());
        for v in &self.values {
            hasher.update(v.to_bits().to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}

/// Pointwise rate integrand `g_α` at a point where the density takes the
/// value `z > 0`.
///
/// `below_sqrt` is `∫ √f · 1_{f < z}` and `tie_area` the area of `{f = z}`.
/// Levels of positive area use the averaged form
/// `√z·[(η + √z·h)^{α+1} − η^{α+1}] / ((α+1)·h)`; a level of zero area
/// degenerates to `z · η^α` (the former tends to the latter as `h → 0`).
pub fn rate_integrand(z: f64, below_sqrt: f64, tie_area: f64, alpha: f64) -> f64 {
    if tie_area == 0.0 {
        z * below_sqrt.powf(alpha)
    } else {
        let top = below_sqrt + z.sqrt() * tie_area;
        z.sqrt() * (top.powf(alpha + 1.0) - below_sqrt.powf(alpha + 1.0))
            / ((alpha + 1.0) * tie_area)
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha < 1.0 {
        return Err(Error::Domain(format!(
            "latency exponent alpha must be >= 1, got {alpha}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::SplitMix64;

    fn two_level() -> Density {
        // 3/2 on the left half, 1/2 on the right half.
        Density::from_weights(&[3.0, 1.0, 3.0, 1.0], 2).unwrap()
    }

    #[test]
    fn from_weights_normalizes() {
        let d = Density::from_weights(&[3.0, 1.0, 3.0, 1.0], 2).unwrap();
        assert_eq!(d.values(), &[1.5, 0.5, 1.5, 0.5]);

        let d = Density::from_weights(&[1.0], 1).unwrap();
        assert_eq!(d.values(), &[1.0]);
    }

    #[test]
    fn from_weights_rejects_bad_input() {
        assert!(matches!(
            Density::from_weights(&[0.0, 0.0, 0.0, 0.0], 2),
            Err(Error::InvalidDensity(_))
        ));
        assert!(matches!(
            Density::from_weights(&[1.0, -0.5, 1.0, 1.0], 2),
            Err(Error::InvalidDensity(_))
        ));
        assert!(matches!(
            Density::from_weights(&[1.0, 1.0], 2),
            Err(Error::InvalidDensity(_))
        ));
        assert!(matches!(
            Density::from_weights(&[], 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn normalization_invariant_holds() {
        let d = two_level();
        let avg: f64 = d.values().iter().sum::<f64>() * d.cell_area();
        assert!((avg - 1.0).abs() < NORMALIZATION_TOL);
    }

    #[test]
    fn level_decomposition_uniform() {
        let dec = Density::uniform(3).level_decomposition();
        assert_eq!(dec.levels, vec![1.0]);
        assert_eq!(dec.areas, vec![1.0]);
        assert_eq!(dec.below_sqrt_mass, vec![0.0]);
        assert_eq!(dec.below_prob, vec![0.0]);
    }

    #[test]
    fn level_decomposition_two_level() {
        let dec = two_level().level_decomposition();
        assert_eq!(dec.levels, vec![0.5, 1.5]);
        assert_eq!(dec.areas, vec![0.5, 0.5]);
        assert_eq!(dec.below_prob, vec![0.0, 0.25]);
        assert!((dec.below_sqrt_mass[1] - 0.5f64.sqrt() * 0.5).abs() < 1e-15);
    }

    #[test]
    fn level_decomposition_all_distinct() {
        let d = Density::from_weights(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        let dec = d.level_decomposition();
        assert_eq!(dec.levels.len(), 4);
        assert!(dec.areas.iter().all(|&h| h == 0.25));
        // Monotone running masses.
        assert!(dec.below_sqrt_mass.windows(2).all(|w| w[0] <= w[1]));
        assert!(dec.below_prob.windows(2).all(|w| w[0] <= w[1]));
        let total: f64 = dec.areas.iter().sum();
        assert!((total - d.support_area()).abs() < 1e-15);
    }

    #[test]
    fn rate_integral_uniform() {
        let d = Density::uniform(1);
        assert_eq!(d.latency_rate_integral(1.0).unwrap(), 0.5);
        assert_eq!(d.latency_rate_integral(2.0).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn rate_integral_two_level_matches_hand_value() {
        // Frozen from an independent numerical evaluation of the per-level
        // t-integral ∫₀ʰ z·(η + t√z)^α dt (adaptive quadrature, 1-ulp match).
        let g = two_level().latency_rate_integral(1.0).unwrap();
        assert!((g - 0.5389988801550374).abs() < 1e-12, "got {g}");
    }

    #[test]
    fn rate_integral_partial_support() {
        // Value 1/A on a fraction A of the square gives ∫g₁ = √A / 2.
        let mut w = vec![0.0; 16];
        w[..4].fill(1.0);
        let d = Density::from_weights(&w, 4).unwrap();
        let a = d.support_area();
        assert_eq!(a, 0.25);
        let g = d.latency_rate_integral(1.0).unwrap();
        assert!((g - a.sqrt() / 2.0).abs() < 1e-15, "got {g}");
    }

    #[test]
    fn rate_integral_rejects_small_alpha() {
        assert!(matches!(
            Density::uniform(1).latency_rate_integral(0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn rate_integrand_branches_agree_in_the_limit() {
        // The positive-area form tends to the zero-area form as h → 0.
        let z = 1.7;
        let eta = 0.4;
        for alpha in [1.0, 1.5, 2.0, 3.0] {
            let exact = rate_integrand(z, eta, 0.0, alpha);
            let near = rate_integrand(z, eta, 1e-9, alpha);
            assert!((exact - near).abs() < 1e-6, "alpha={alpha}");
        }
    }

    #[test]
    fn coverage_rate_uniform() {
        let c = Density::uniform(1).coverage_rate(0.5).unwrap();
        assert_eq!(c.threshold, 1.0);
        assert_eq!(c.rate, 0.5);
    }

    #[test]
    fn coverage_rate_two_level() {
        let d = two_level();
        let c = d.coverage_rate(0.25).unwrap();
        assert_eq!(c.threshold, 1.5);
        assert!((c.rate - 0.25 / 1.5f64.sqrt()).abs() < 1e-15);

        let c = d.coverage_rate(0.8).unwrap();
        assert_eq!(c.threshold, 0.5);
        let expected = 1.5f64.sqrt() * 0.5 + (0.8 - 0.75) / 0.5f64.sqrt();
        assert!((c.rate - expected).abs() < 1e-15);
    }

    #[test]
    fn coverage_rate_rejects_bad_kappa() {
        let d = Density::uniform(1);
        assert!(d.coverage_rate(0.0).is_err());
        assert!(d.coverage_rate(1.5).is_err());
        assert!(d.coverage_rate(f64::NAN).is_err());
    }

    #[test]
    fn coverage_rate_increasing_in_kappa() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..5 {
            let w: Vec<f64> = (0..9).map(|_| rng.next_f64() + 0.05).collect();
            let d = Density::from_weights(&w, 3).unwrap();
            let mut prev = 0.0;
            for i in 1..=20 {
                let kappa = i as f64 / 20.0;
                let r = d.coverage_rate(kappa).unwrap().rate;
                assert!(r > prev, "rate must increase: kappa={kappa}");
                prev = r;
            }
        }
    }

    #[test]
    fn refine_is_pointwise_identity() {
        let d = two_level();
        assert_eq!(d.refine(1).unwrap(), d);

        let r = d.refine(2).unwrap();
        assert_eq!(r.m(), 4);
        assert_eq!(r.value_at(0, 0), d.value_at(0, 0));
        assert_eq!(r.value_at(3, 3), d.value_at(1, 1));
        assert!(d.refine(0).is_err());
    }

    #[test]
    fn refine_leaves_functionals_bit_identical() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..10 {
            let m = 1 + (rng.next_u64() % 4) as usize;
            let w: Vec<f64> = (0..m * m).map(|_| rng.next_f64() + 0.01).collect();
            let d = Density::from_weights(&w, m).unwrap();
            for beta in [2usize, 3, 4] {
                let r = d.refine(beta).unwrap();
                for alpha in [1.0, 1.5, 2.0] {
                    let a = d.latency_rate_integral(alpha).unwrap();
                    let b = r.latency_rate_integral(alpha).unwrap();
                    assert_eq!(a.to_bits(), b.to_bits(), "m={m} beta={beta}");
                }
                let ca = d.coverage_rate(0.4).unwrap();
                let cb = r.coverage_rate(0.4).unwrap();
                assert_eq!(ca.rate.to_bits(), cb.rate.to_bits());
                assert_eq!(ca.threshold.to_bits(), cb.threshold.to_bits());
            }
        }
    }

    #[test]
    fn from_function_constant_is_uniform() {
        let d = Density::from_function(|_, _| 4.2, 3, 4).unwrap();
        assert_eq!(d.values(), Density::uniform(3).values());
    }

    #[test]
    fn from_function_half_indicator() {
        // Indicator of the left half with even m: exactly two levels (2, 0).
        let d = Density::from_function(|x, _| if x < 0.5 { 1.0 } else { 0.0 }, 4, 9).unwrap();
        for cy in 0..4 {
            for cx in 0..4 {
                let expect = if cx < 2 { 2.0 } else { 0.0 };
                assert_eq!(d.value_at(cx, cy), expect);
            }
        }
    }

    #[test]
    fn from_function_rejects_bad_values() {
        assert!(matches!(
            Density::from_function(|x, _| x - 0.5, 2, 4),
            Err(Error::InvalidFunction { .. })
        ));
        assert!(matches!(
            Density::from_function(|_, _| f64::NAN, 2, 4),
            Err(Error::InvalidFunction { .. })
        ));
    }

    #[test]
    fn serde_round_trip_preserves_values() {
        let d = two_level();
        let json = serde_json::to_string(&d).unwrap();
        let back: Density = serde_json::from_str(&json).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn serde_load_normalizes_raw_weights() {
        let d: Density = serde_json::from_str(r#"{"m":2,"values":[3,1,3,1]}"#).unwrap();
        assert_eq!(d.values(), &[1.5, 0.5, 1.5, 0.5]);
        assert!(serde_json::from_str::<Density>(r#"{"m":2,"values":[0,0,0,0]}"#).is_err());
    }

    #[test]
    fn content_hash_distinguishes_densities() {
        let a = Density::uniform(2).content_hash();
        let b = two_level().content_hash();
        assert_eq!(a.len(), 64);
        assert_ne!(a, b);
        assert_eq!(a, Density::uniform(2).content_hash());
    }

    /// Monte Carlo quadrature of the pointwise integrand, computed from raw
    /// cell values only (no level decomposition). Returns (mean, std error).
    fn mc_rate_integral(d: &Density, alpha: f64, samples: usize, seed: u64) -> (f64, f64) {
        let m = d.m();
        let values = d.values();
        let cell_area = d.cell_area();
        let mut rng = SplitMix64::new(seed);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let x = rng.next_f64();
            let y = rng.next_f64();
            let v = values[(y * m as f64) as usize * m + (x * m as f64) as usize];
            let g = if v <= 0.0 {
                0.0
            } else {
                let mut below_sqrt = 0.0;
                let mut tie_area = 0.0;
                for &w in values {
                    if w < v {
                        below_sqrt += w.sqrt() * cell_area;
                    } else if w == v {
                        tie_area += cell_area;
                    }
                }
                let top = below_sqrt + v.sqrt() * tie_area;
                v.sqrt() * (top.powf(alpha + 1.0) - below_sqrt.powf(alpha + 1.0))
                    / ((alpha + 1.0) * tie_area)
            };
            sum += g;
            sum_sq += g * g;
        }
        let n = samples as f64;
        let mean = sum / n;
        let var = (sum_sq - n * mean * mean) / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    #[test]
    fn rate_integral_matches_quadrature_on_random_densities() {
        let mut rng = SplitMix64::new(2718);
        for trial in 0..10 {
            let m = 2 + (rng.next_u64() % 7) as usize; // 2..=8
            let weights: Vec<f64> = (0..m * m).map(|_| rng.next_f64() * 3.0 + 0.01).collect();
            let d = Density::from_weights(&weights, m).unwrap();
            for alpha in [1.0, 1.5, 2.0, 3.0] {
                let closed = d.latency_rate_integral(alpha).unwrap();
                let (mc, se) = mc_rate_integral(&d, alpha, 100_000, 40 + trial);
                assert!(
                    (closed - mc).abs() <= 3.0 * se.max(1e-9),
                    "trial {trial} m {m} alpha {alpha}: closed {closed} vs MC {mc} ± {se}"
                );
            }
        }
    }
}
