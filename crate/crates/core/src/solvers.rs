//! Exact brute-force solvers for small instances and the heuristic path
//! builder the approximation schemes call into.
//!
//! The exact solvers are oracles: correctness and determinism over speed.
//! Ties are always broken toward the lexicographically smallest visit
//! order, so every solver returns one well-defined tour.

use crate::objectives::Tour;
use crate::sampling::{Point, SampleSet};
use crate::{density::check_alpha, Error, Result};

/// Subset dynamic programming is held to at most this many points.
pub const EXACT_PATH_MAX_POINTS: usize = 12;

/// Full-order enumeration for the latency-power objective is held to at most
/// this many points. Prefix length is a continuous state, so subset
/// memoization is unsound for exponents above one; we enumerate orders
/// instead.
pub const EXACT_LATENCY_MAX_POINTS: usize = 10;

/// Shortest open path through all points, exact.
///
/// Subset DP over at most [`EXACT_PATH_MAX_POINTS`] points; both endpoints
/// are free. Instances with fewer than two points return the trivial tour.
pub fn exact_tsp_path(sample: &SampleSet) -> Result<Tour> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::Infeasible("no points to visit".into()));
    }
    if n == 1 {
        return Tour::new(vec![0]);
    }
    if n > EXACT_PATH_MAX_POINTS {
        return Err(Error::BudgetExceeded(format!(
            "exact path solver handles at most {EXACT_PATH_MAX_POINTS} points, got {n}"
        )));
    }
    let subset: Vec<usize> = (0..n).collect();
    let (_, order) = exact_path_over(&sample.points, &subset);
    Tour::new(order)
}

/// Shortest open path visiting exactly `k` of the `n` points, exact.
///
/// Enumerates every `k`-subset and solves each by subset DP; `k = 2`
/// collapses to the closest pair and `k = n` to [`exact_tsp_path`].
pub fn exact_k_tsp(sample: &SampleSet, k: usize) -> Result<Tour> {
    let n = sample.len();
    if k < 2 {
        return Err(Error::Domain(format!("k must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Infeasible(format!(
            "cannot visit k = {k} of n = {n} points"
        )));
    }
    if n > EXACT_PATH_MAX_POINTS {
        return Err(Error::BudgetExceeded(format!(
            "exact k-TSP solver handles at most {EXACT_PATH_MAX_POINTS} points, got {n}"
        )));
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    let full: u32 = 1 << n;
    for mask in 0u32..full {
        if mask.count_ones() as usize != k {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let (len, order) = exact_path_over(&sample.points, &subset);
        let replace = match &best {
            None => true,
            Some((bl, bo)) => len < *bl || (len == *bl && order < *bo),
        };
        if replace {
            best = Some((len, order));
        }
    }
    let (_, order) = best.expect("k >= 2 and k <= n guarantee a candidate");
    Tour::new(order)
}

/// Exact minimizer of the power-law latency sum `Σ lᵢ^α`.
///
/// Enumerates all `n!` visit orders lexicographically and keeps the first
/// optimum, for at most [`EXACT_LATENCY_MAX_POINTS`] points.
pub fn exact_power_trp(sample: &SampleSet, alpha: f64) -> Result<Tour> {
    check_alpha(alpha)?;
    let n = sample.len();
    if n == 0 {
        return Err(Error::Infeasible("no points to visit".into()));
    }
    if n == 1 {
        return Tour::new(vec![0]);
    }
    if n > EXACT_LATENCY_MAX_POINTS {
        return Err(Error::BudgetExceeded(format!(
            "exact latency-power solver handles at most {EXACT_LATENCY_MAX_POINTS} points, got {n}"
        )));
    }

    let dist = dist_matrix(&sample.points);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best_order = order.clone();
    let mut best = power_latency_of(&order, &dist, n, alpha);
    while next_permutation(&mut order) {
        let value = power_latency_of(&order, &dist, n, alpha);
        if value < best {
            best = value;
            best_order.copy_from_slice(&order);
        }
    }
    Tour::new(best_order)
}

/// Nearest-neighbor construction from the subset's lowest index, improved by
/// first-improvement 2-opt until no swap helps (capped at `50·|subset|`
/// passes). Never worse than the nearest-neighbor path it starts from.
pub fn heuristic_tsp_path(sample: &SampleSet, subset: &[usize]) -> Tour {
    assert!(
        !subset.is_empty(),
        "heuristic path needs at least one point"
    );
    let start = *subset.iter().min().unwrap();
    let order = heuristic_path_from(&sample.points, subset, start);
    Tour::new(order).expect("subset indices are distinct")
}

/// Nearest-neighbor path from `start`, then 2-opt. Shared by the public
/// heuristic and the sweep scheme (which picks its own start per cell).
pub(crate) fn heuristic_path_from(points: &[Point], subset: &[usize], start: usize) -> Vec<usize> {
    debug_assert!(subset.contains(&start));
    let k = subset.len();
    let mut order = Vec::with_capacity(k);
    let mut remaining: Vec<usize> = subset.iter().cloned().filter(|&i| i != start).collect();
    remaining.sort_unstable();
    let mut current = start;
    order.push(start);
    while !remaining.is_empty() {
        let mut pick = 0;
        let mut best = f64::INFINITY;
        for (slot, &cand) in remaining.iter().enumerate() {
            let d = points[current].dist(&points[cand]);
            if d < best {
                best = d;
                pick = slot;
            }
        }
        current = remaining.remove(pick);
        order.push(current);
    }
    two_opt(points, &mut order);
    order
}

/// First-improvement 2-opt for an open path: reverses `order[i..=j]`
/// whenever the two boundary edges get strictly shorter.
fn two_opt(points: &[Point], order: &mut [usize]) {
    let len = order.len();
    if len < 3 {
        return;
    }
    let d = |a: usize, b: usize| points[a].dist(&points[b]);
    let max_passes = 50 * len;
    for _ in 0..max_passes {
        let mut improved = false;
        for i in 0..len - 1 {
            for j in i + 1..len {
                if i == 0 && j == len - 1 {
                    continue; // reversing the whole path changes nothing
                }
                let mut delta = 0.0;
                if i > 0 {
                    delta += d(order[i - 1], order[j]) - d(order[i - 1], order[i]);
                }
                if j + 1 < len {
                    delta += d(order[i], order[j + 1]) - d(order[j], order[j + 1]);
                }
                if delta < -1e-12 {
                    order[i..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// Exact shortest open path over `subset` (original indices, assumed sorted
/// ascending). Returns the length and the lexicographically smallest optimal
/// visit order.
///
/// Suffix DP: `g[mask][i]` is the shortest path visiting exactly `mask`
/// starting at local point `i`, which lets the order be rebuilt from the
/// front so lexicographic tie-breaking is a greedy choice.
pub(crate) fn exact_path_over(points: &[Point], subset: &[usize]) -> (f64, Vec<usize>) {
    let k = subset.len();
    debug_assert!((1..=EXACT_PATH_MAX_POINTS).contains(&k));
    debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
    if k == 1 {
        return (0.0, vec![subset[0]]);
    }

    let d = |a: usize, b: usize| points[subset[a]].dist(&points[subset[b]]);
    let full = 1usize << k;
    let mut g = vec![f64::INFINITY; full * k];
    for i in 0..k {
        g[(1 << i) * k + i] = 0.0;
    }
    for mask in 1..full {
        if mask.count_ones() < 2 {
            continue;
        }
        for i in 0..k {
            if mask >> i & 1 == 0 {
                continue;
            }
            let rest = mask & !(1 << i);
            let mut best = f64::INFINITY;
            for j in 0..k {
                if rest >> j & 1 == 0 {
                    continue;
                }
                let cand = d(i, j) + g[rest * k + j];
                if cand < best {
                    best = cand;
                }
            }
            g[mask * k + i] = best;
        }
    }

    let fullmask = full - 1;
    let mut best = f64::INFINITY;
    for i in 0..k {
        best = best.min(g[fullmask * k + i]);
    }

    // Front-first reconstruction: the smallest feasible index at every step
    // yields the lexicographically smallest optimal order.
    let mut order = Vec::with_capacity(k);
    let mut mask = fullmask;
    let mut current = (0..k)
        .find(|&i| g[fullmask * k + i] == best)
        .expect("some start achieves the optimum");
    order.push(subset[current]);
    while mask.count_ones() > 1 {
        let rest = mask & !(1 << current);
        let target = g[mask * k + current];
        let next = (0..k)
            .find(|&j| rest >> j & 1 == 1 && d(current, j) + g[rest * k + j] == target)
            .expect("DP value is attained by some successor");
        order.push(subset[next]);
        mask = rest;
        current = next;
    }
    (best, order)
}

fn dist_matrix(points: &[Point]) -> Vec<f64> {
    let n = points.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = points[i].dist(&points[j]);
        }
    }
    d
}

fn power_latency_of(order: &[usize], dist: &[f64], n: usize, alpha: f64) -> f64 {
    let mut traveled = 0.0;
    let mut acc = 0.0;
    for w in order.windows(2) {
        traveled += dist[w[0] * n + w[1]];
        acc += if alpha == 1.0 {
            traveled
        } else {
            traveled.powf(alpha)
        };
    }
    acc
}

/// Advances `a` to its next lexicographic permutation; false when `a` was
/// already the last one.
fn next_permutation(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}
