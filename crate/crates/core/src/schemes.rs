//! Constant-factor approximation schemes: the densest-cell k-TSP and the
//! decreasing-density sweep for the latency-power objective.
//!
//! Both schemes share one idea — concentration of sampled points in grid
//! cells does the heavy lifting. The k-TSP scheme solves a small path inside
//! the single fullest cell of a carefully sized grid; the sweep visits every
//! cell, densest first, with a heuristic path inside each.

use crate::density::{check_alpha, Density};
use crate::objectives::Tour;
use crate::sampling::{cell_counts, SampleSet};
use crate::solvers::{exact_path_over, heuristic_path_from, heuristic_tsp_path};
use crate::{Error, Result};

/// Largest `k` for which the densest-cell scheme solves the in-cell path
/// exactly rather than heuristically.
const EXACT_IN_CELL_MAX: usize = 10;

/// Grid resolution for the densest-cell scheme:
/// `max(1, ⌊(1/scale)·√(n^{1+1/(k−1)}/(k−1))⌋)`.
///
/// The resolution balances cell occupancy (some cell should hold `k` points)
/// against cell diameter (the path inside pays the cell size). `scale` is a
/// free tuning knob; `1.0` is the neutral choice.
pub fn ktsp_grid_resolution(n: usize, k: usize, scale: f64) -> Result<usize> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::Domain(format!(
            "scale must be a positive real, got {scale}"
        )));
    }
    if k < 2 {
        return Err(Error::Domain(format!("k must be >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::Domain(format!("need n >= k, got n = {n}, k = {k}")));
    }
    let kf = (k - 1) as f64;
    let radicand = (n as f64).powf(1.0 + 1.0 / kf) / kf;
    let m = (radicand.sqrt() / scale).floor() as usize;
    Ok(m.max(1))
}

/// Densest-cell k-TSP scheme.
///
/// Bins the sample at the resolution from [`ktsp_grid_resolution`] and picks
/// the cell with the most points (ties: lowest cell index). If that cell
/// holds fewer than `k` points the grid is coarsened by halving `m` until
/// one does — at `m = 1` the single cell holds all `n ≥ k` points, so the
/// loop always terminates. The tour visits the `k` points of the chosen cell
/// nearest its center (ties: lower index), ordered exactly for `k ≤ 10` and
/// heuristically above that.
pub fn ktsp_densest_cell(sample: &SampleSet, k: usize, scale: f64) -> Result<Tour> {
    let n = sample.len();
    if k < 2 {
        return Err(Error::Domain(format!("k must be >= 2, got {k}")));
    }
    if k > n {
        return Err(Error::Infeasible(format!(
            "cannot visit k = {k} of n = {n} points"
        )));
    }
    let mut m = ktsp_grid_resolution(n, k, scale)?;
    let (cell, m) = loop {
        let counts = cell_counts(sample, m);
        let mut best_cell = 0;
        let mut best_count = 0;
        for (idx, &c) in counts.counts.iter().enumerate() {
            if c > best_count {
                best_count = c;
                best_cell = idx;
            }
        }
        if best_count >= k || m == 1 {
            break (best_cell, m);
        }
        m = (m / 2).max(1);
    };

    let cx = cell % m;
    let cy = cell / m;
    let center_x = (cx as f64 + 0.5) / m as f64;
    let center_y = (cy as f64 + 0.5) / m as f64;

    let mut members: Vec<usize> = (0..n)
        .filter(|&i| crate::sampling::cell_index(&sample.points[i], m) == cell)
        .collect();
    members.sort_by(|&a, &b| {
        let da = (sample.points[a].x - center_x).powi(2) + (sample.points[a].y - center_y).powi(2);
        let db = (sample.points[b].x - center_x).powi(2) + (sample.points[b].y - center_y).powi(2);
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });
    let mut chosen: Vec<usize> = members.into_iter().take(k).collect();
    chosen.sort_unstable();

    if k <= EXACT_IN_CELL_MAX {
        let (_, order) = exact_path_over(&sample.points, &chosen);
        Tour::new(order)
    } else {
        Ok(heuristic_tsp_path(sample, &chosen))
    }
}

/// Block objective `Σᵢ (Σ_{j<i} 1/√w_{σ(j)})^α` for a visit order over
/// weighted blocks. Exposed for the exhaustive ordering tests.
pub fn block_order_objective(weights: &[f64], order: &[usize], alpha: f64) -> f64 {
    let mut acc = 0.0;
    let mut prefix = 0.0_f64;
    for &b in order {
        acc += if alpha == 1.0 {
            prefix
        } else {
            prefix.powf(alpha)
        };
        prefix += 1.0 / weights[b].sqrt();
    }
    acc
}

/// Visit order over weighted blocks minimizing the block objective: sort by
/// decreasing weight, i.e. increasing per-block travel `1/√w` (ties keep the
/// original index order).
pub fn block_visit_order(weights: &[f64], alpha: f64) -> Result<Vec<usize>> {
    check_alpha(alpha)?;
    for &w in weights {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::Domain(format!(
                "block weights must be positive, got {w}"
            )));
        }
    }
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).unwrap().then(a.cmp(&b)));
    Ok(order)
}

/// How the sweep ranks grid cells.
#[derive(Debug, Clone, Copy)]
pub enum SweepOrder<'a> {
    /// Rank by observed point counts — what a deployed scheme can see.
    EmpiricalCounts,
    /// Rank by the known density values; resolution must match the grid.
    KnownDensity(&'a Density),
}

/// Decreasing-density sweep tour over all points.
///
/// Cells of the `m × m` grid are visited in decreasing rank order (ties:
/// lowest cell index); empty cells are skipped. Inside each cell the tour is
/// a heuristic path seeded at the point nearest the previous cell's endpoint
/// (first cell: the lowest-index point) and oriented so its closer end faces
/// that endpoint. The result visits all `n` points exactly once.
pub fn density_sweep_tour(sample: &SampleSet, m: usize, order: SweepOrder) -> Result<Tour> {
    if m == 0 {
        return Err(Error::Domain("grid resolution m must be >= 1".into()));
    }
    if sample.is_empty() {
        return Err(Error::Infeasible("no points to visit".into()));
    }
    let keys: Vec<f64> = match order {
        SweepOrder::EmpiricalCounts => cell_counts(sample, m)
            .counts
            .iter()
            .map(|&c| c as f64)
            .collect(),
        SweepOrder::KnownDensity(d) => {
            if d.m() != m {
                return Err(Error::Config(format!(
                    "ordering density has resolution {} but the sweep grid is {m}",
                    d.m()
                )));
            }
            d.values().to_vec()
        }
    };

    // Points per cell, listed in increasing index order.
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); m * m];
    for (i, p) in sample.points.iter().enumerate() {
        cells[crate::sampling::cell_index(p, m)].push(i);
    }

    let mut rank: Vec<usize> = (0..m * m).collect();
    rank.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap().then(a.cmp(&b)));

    let mut tour: Vec<usize> = Vec::with_capacity(sample.len());
    for cell in rank {
        let members = &cells[cell];
        if members.is_empty() {
            continue;
        }
        let start = match tour.last() {
            None => *members.iter().min().unwrap(),
            Some(&prev) => {
                let prev_pt = &sample.points[prev];
                let mut best = members[0];
                let mut best_d = f64::INFINITY;
                for &i in members {
                    let d = prev_pt.dist(&sample.points[i]);
                    if d < best_d {
                        best_d = d;
                        best = i;
                    }
                }
                best
            }
        };
        let mut path = heuristic_path_from(&sample.points, members, start);
        if let Some(&prev) = tour.last() {
            // Orient the optimized sub-path so its nearer end meets the tour.
            let prev_pt = &sample.points[prev];
            let head = prev_pt.dist(&sample.points[*path.first().unwrap()]);
            let tail = prev_pt.dist(&sample.points[*path.last().unwrap()]);
            if tail < head {
                path.reverse();
            }
        }
        tour.extend(path);
    }
    Tour::new(tour)
}

/// Experimental k-TSP variant for `k` proportional to `n`: run the sweep and
/// stop after `k` visits.
pub fn truncated_sweep_ktsp(
    sample: &SampleSet,
    m: usize,
    order: SweepOrder,
    k: usize,
) -> Result<Tour> {
    if k < 1 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    if k > sample.len() {
        return Err(Error::Infeasible(format!(
            "cannot visit k = {k} of n = {} points",
            sample.len()
        )));
    }
    let full = density_sweep_tour(sample, m, order)?;
    Tour::new(full.order()[..k].to_vec())
}
