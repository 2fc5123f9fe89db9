//! Tour objectives: open-path length, total latency, and the power-law
//! latency sum.
//!
//! A tour here is always an open path — the service vehicle starts at its
//! first point (latency zero there) and never returns to a depot. Tours may
//! be partial: objectives are evaluated over the visited points only.

use serde::{Deserialize, Serialize};

use crate::density::check_alpha;
use crate::sampling::SampleSet;
use crate::{Error, Result};

/// An ordered visit sequence; indices refer to a `SampleSet`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Validates that the order is nonempty with distinct indices.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        if order.is_empty() {
            return Err(Error::InvalidTour(
                "tour must visit at least one point".into(),
            ));
        }
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTour("tour repeats an index".into()));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a Tour is nonempty by construction
    }

    pub fn reversed(&self) -> Tour {
        let mut order = self.order.clone();
        order.reverse();
        Tour { order }
    }
}

/// Which objective a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    PathLength,
    Latency,
    PowerLatency,
}

/// A labeled objective value; `alpha` is set for the power-latency kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub kind: ObjectiveKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub value: f64,
}

fn check_indices(sample: &SampleSet, tour: &Tour) -> Result<()> {
    for &i in tour.order() {
        if i >= sample.len() {
            return Err(Error::InvalidTour(format!(
                "index {i} out of range for {} points",
                sample.len()
            )));
        }
    }
    Ok(())
}

/// Euclidean length of the open path `Σ |x_{i+1} − x_i|`; zero for a
/// single-point tour.
pub fn path_length(sample: &SampleSet, tour: &Tour) -> Result<f64> {
    check_indices(sample, tour)?;
    let pts = &sample.points;
    let mut total = 0.0;
    for w in tour.order().windows(2) {
        total += pts[w[0]].dist(&pts[w[1]]);
    }
    Ok(total)
}

/// Shared latency accumulation: applies `f` to the distance traveled before
/// each visit (zero for the first point) and sums. Using one fold for both
/// objectives keeps `power_latency` at `alpha = 1` bit-identical to
/// `total_latency`.
fn latency_fold<F: Fn(f64) -> f64>(sample: &SampleSet, tour: &Tour, f: F) -> Result<f64> {
    check_indices(sample, tour)?;
    let pts = &sample.points;
    let order = tour.order();
    let mut traveled = 0.0;
    let mut acc = f(0.0);
    for w in order.windows(2) {
        traveled += pts[w[0]].dist(&pts[w[1]]);
        acc += f(traveled);
    }
    Ok(acc)
}

/// Sum of latencies `Σ lᵢ`, where `lᵢ` is the path length traveled before
/// reaching the `i`-th visited point (`l₁ = 0`). Partial tours are evaluated
/// over their own length.
pub fn total_latency(sample: &SampleSet, tour: &Tour) -> Result<f64> {
    let value = latency_fold(sample, tour, |l| l)?;
    // Equivalent weighted-edge form, kept as a cross-check.
    debug_assert!({
        let pts = &sample.points;
        let k = tour.len();
        let mut weighted = 0.0;
        for (i, w) in tour.order().windows(2).enumerate() {
            weighted += (k - 1 - i) as f64 * pts[w[0]].dist(&pts[w[1]]);
        }
        (weighted - value).abs() <= 1e-12 * value.max(1.0)
    });
    Ok(value)
}

/// Power-law latency sum `Σ lᵢ^α` for `alpha >= 1`; equals
/// [`total_latency`] exactly at `alpha = 1`.
pub fn power_latency(sample: &SampleSet, tour: &Tour, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        latency_fold(sample, tour, |l| l)
    } else {
        latency_fold(sample, tour, |l| l.powf(alpha))
    }
}

/// All three objectives of a tour, labeled.
pub fn evaluate_all(sample: &SampleSet, tour: &Tour, alpha: f64) -> Result<Vec<ObjectiveValue>> {
    Ok(vec![
        ObjectiveValue {
            kind: ObjectiveKind::PathLength,
            alpha: None,
            value: path_length(sample, tour)?,
        },
        ObjectiveValue {
            kind: ObjectiveKind::Latency,
            alpha: None,
            value: total_latency(sample, tour)?,
        },
        ObjectiveValue {
            kind: ObjectiveKind::PowerLatency,
            alpha: Some(alpha),
            value: power_latency(sample, tour, alpha)?,
        },
    ])
}


#[cfg(test)]
mod proptests {
    use super::*;
    use crate::sampling::Point;
    use proptest::prelude::*;

    fn instance() -> impl Strategy<Value = (Vec<Point>, Vec<usize>)> {
        (2usize..=12).prop_flat_map(|n| {
            let points = prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n)
                .prop_map(|ps| ps.into_iter().map(|(x, y)| Point::new(x, y)).collect());
            let order = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
            (points, order)
        })
    }

    proptest! {
        /// Reversing a tour preserves its path length.
        #[test]
        fn path_length_reversal_invariant((points, order) in instance()) {
            let s = SampleSet::from_points(points);
            let t = Tour::new(order).unwrap();
            let a = path_length(&s, &t).unwrap();
            let b = path_length(&s, &t.reversed()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }

        /// The unit exponent collapses to plain latency, bit for bit.
        #[test]
        fn unit_exponent_is_latency((points, order) in instance()) {
            let s = SampleSet::from_points(points);
            let t = Tour::new(order).unwrap();
            let lat = total_latency(&s, &t).unwrap();
            let pow = power_latency(&s, &t, 1.0).unwrap();
            prop_assert_eq!(lat.to_bits(), pow.to_bits());
        }

        /// Both latency formulas agree on arbitrary tours.
        #[test]
        fn latency_formulas_agree((points, order) in instance()) {
            let s = SampleSet::from_points(points);
            let k = order.len();
            let t = Tour::new(order).unwrap();
            let by_prefix = total_latency(&s, &t).unwrap();
            let mut weighted = 0.0;
            for (i, w) in t.order().windows(2).enumerate() {
                weighted += (k - 1 - i) as f64 * s.points[w[0]].dist(&s.points[w[1]]);
            }
            prop_assert!((by_prefix - weighted).abs() <= 1e-12 * by_prefix.max(1.0));
        }
    }
}
