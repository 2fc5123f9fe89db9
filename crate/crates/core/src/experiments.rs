//! Monte Carlo scaling experiments: estimate expected objectives over seeded
//! trials, fit log-log slopes, and compare against the closed-form rate
//! functionals.
//!
//! A run is fully described by an [`ExperimentConfig`] (often loaded from
//! JSON). Trials are independent and seeded from `(base_seed, n, trial)`, so
//! the harness may execute them in parallel while producing output
//! bit-identical to a sequential run. Results are emitted as a CSV of
//! per-trial rows plus a JSON summary with means, slopes, brackets, and the
//! outcome of any configured checks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::density::Density;
use crate::objectives::{path_length, power_latency};
use crate::sampling::{sample_points, trial_seed};
use crate::schemes::{density_sweep_tour, ktsp_densest_cell, truncated_sweep_ktsp, SweepOrder};
use crate::solvers::{exact_k_tsp, exact_power_trp};
use crate::{Error, Result};

/// Which objective family an experiment studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// Shortest path visiting `k` of `n` points.
    Ktsp,
    /// Power-law latency sum over all points.
    Psitrp,
    /// Scheme-versus-exact objective ratios on small instances.
    OracleCompare,
}

/// Underlying problem of an `oracle_compare` run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareProblem {
    Ktsp,
    Psitrp,
}

/// Which solver produces the per-trial objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    #[default]
    Scheme,
    Exact,
}

/// Cell-ranking source for the sweep scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    #[default]
    Empirical,
    Density,
}

/// Tunables of the approximation schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeParams {
    /// Grid-scale knob of the densest-cell scheme.
    pub a: f64,
    /// Sweep grid resolution.
    pub m: usize,
    /// Sweep cell ordering.
    pub order: OrderKind,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            m: 1,
            order: OrderKind::Empirical,
        }
    }
}

/// Optional pass/fail criteria evaluated after a run. A config without
/// checks is reporting-only and always "passes".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    /// Fitted log-log slope must land inside `[lo, hi]`.
    pub slope_range: Option<[f64; 2]>,
    /// Every normalized ratio must sit above the closed-form floor.
    pub bracket_floor: bool,
    /// Relative variation of the ratio across the top three `n` values must
    /// stay below this bound.
    pub max_ratio_variation: Option<f64>,
    /// Every scheme/exact ratio must be at least this large.
    pub min_oracle_ratio: Option<f64>,
}

impl ChecksConfig {
    pub fn any_enabled(&self) -> bool {
        self.slope_range.is_some()
            || self.bracket_floor
            || self.max_ratio_variation.is_some()
            || self.min_oracle_ratio.is_some()
    }
}

fn default_schema() -> u32 {
    1
}

fn default_alpha() -> f64 {
    1.0
}

/// Full description of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub problem: Problem,
    /// Required when `problem` is `oracle_compare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareProblem>,
    pub density: Density,
    /// Strictly increasing instance sizes.
    pub n_values: Vec<usize>,
    /// Fixed coverage size for k-TSP runs...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// ...or proportional coverage `k = ⌈ρ·n⌉`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_fraction: Option<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Trials per instance size.
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub scheme: SchemeParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn solver(&self) -> SolverChoice {
        self.solver.unwrap_or_default()
    }

    /// Coverage size for an instance of `n` points.
    pub fn k_for(&self, n: usize) -> usize {
        match (self.k, self.k_fraction) {
            (Some(k), _) => k,
            (None, Some(rho)) => ((rho * n as f64).ceil() as usize).clamp(2, n),
            (None, None) => unreachable!("validated: some k rule is present"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != 1 {
            return Err(Error::Config(format!(
                "unsupported config schema {}",
                self.schema
            )));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values must not be empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n_values must be strictly increasing".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 1.0 {
            return Err(Error::Config(format!(
                "alpha must be >= 1, got {}",
                self.alpha
            )));
        }
        if !self.scheme.a.is_finite() || self.scheme.a <= 0.0 {
            return Err(Error::Config("scheme parameter a must be positive".into()));
        }
        if self.scheme.m < 1 {
            return Err(Error::Config("scheme grid m must be >= 1".into()));
        }
        if self.scheme.order == OrderKind::Density && self.density.m() != self.scheme.m {
            // Only sweeps consult the ordering density, but a mismatched
            // config is wrong regardless of which branch runs.
            if matches!(self.problem, Problem::Psitrp | Problem::OracleCompare)
                || self.k_fraction.is_some()
            {
                return Err(Error::Config(format!(
                    "density-ordered sweep needs density resolution {} to equal scheme m {}",
                    self.density.m(),
                    self.scheme.m
                )));
            }
        }
        let min_n = self.n_values[0];
        let max_n = *self.n_values.last().unwrap();
        match self.problem {
            Problem::Ktsp => {
                if self.n_values.len() < 3 {
                    return Err(Error::Config(
                        "rate runs need at least 3 n_values for a slope fit".into(),
                    ));
                }
                match (self.k, self.k_fraction) {
                    (Some(k), None) => {
                        if k < 2 || k > min_n {
                            return Err(Error::Config(format!(
                                "need 2 <= k <= min(n_values), got k = {k}"
                            )));
                        }
                    }
                    (None, Some(rho)) => {
                        if !(rho > 0.0 && rho <= 1.0) {
                            return Err(Error::Config(format!(
                                "k_fraction must lie in (0, 1], got {rho}"
                            )));
                        }
                    }
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(
                            "give either k or k_fraction, not both".into(),
                        ));
                    }
                    (None, None) => {
                        return Err(Error::Config("k-TSP runs need k or k_fraction".into()));
                    }
                }
                if self.solver() == SolverChoice::Exact
                    && max_n > crate::solvers::EXACT_PATH_MAX_POINTS
                {
                    return Err(Error::Config(format!(
                        "exact k-TSP solver is limited to n <= {}, config asks for {max_n}",
                        crate::solvers::EXACT_PATH_MAX_POINTS
                    )));
                }
            }
            Problem::Psitrp => {
                if self.n_values.len() < 3 {
                    return Err(Error::Config(
                        "rate runs need at least 3 n_values for a slope fit".into(),
                    ));
                }
                if self.solver() == SolverChoice::Exact
                    && max_n > crate::solvers::EXACT_LATENCY_MAX_POINTS
                {
                    return Err(Error::Config(format!(
                        "exact latency solver is limited to n <= {}, config asks for {max_n}",
                        crate::solvers::EXACT_LATENCY_MAX_POINTS
                    )));
                }
            }
            Problem::OracleCompare => {
                let compare = self.compare.ok_or_else(|| {
                    Error::Config("oracle_compare needs a compare problem".into())
                })?;
                if max_n > 10 {
                    return Err(Error::Config(format!(
                        "oracle comparisons need n <= 10, config asks for {max_n}"
                    )));
                }
                if compare == CompareProblem::Ktsp {
                    let k = self.k.ok_or_else(|| {
                        Error::Config("k-TSP oracle comparison needs a fixed k".into())
                    })?;
                    if k < 2 || k > min_n {
                        return Err(Error::Config(format!(
                            "need 2 <= k <= min(n_values), got k = {k}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One solved trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub objective: f64,
    pub solver: &'static str,
}

/// Per-size aggregate statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerN {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub mean: f64,
    pub std_error: f64,
    /// k-TSP: mean scaled by the predicted rate,
    /// `mean · (‖f‖∞ n)^{(1/2)(1+1/(k−1))} / (k−1) · A^{1/(2(k−1))}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized: Option<f64>,
    /// Latency runs: `mean / n^{1+α/2}`; proportional-k runs:
    /// `mean / (√n · coverage rate)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

/// Ordinary least squares fit of `log mean` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    /// 95% confidence half-width from the residual variance; absent when
    /// there are no degrees of freedom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    pub points: usize,
    /// False when fewer than 3 usable points entered the fit.
    pub sufficient: bool,
}

/// Closed-form reference quantities the run is compared against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryRefs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_exponent: Option<f64>,
    /// `∫ g_α` for latency runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_integral: Option<f64>,
    /// Bracket floor `c̃_α · ∫ g_α` with `c̃_α = 1/((πe)^{α/2}(α+1))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket_floor: Option<f64>,
    /// Coverage rate at the configured fraction, for proportional-k runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage_threshold: Option<f64>,
    pub max_density: f64,
    pub support_area: f64,
}

/// Distribution summary of scheme/exact ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioSummary {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a run produced. `rows` back the CSV; the rest serializes into
/// the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
    pub per_n: Vec<PerN>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeFit>,
    pub theory: TheoryRefs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_summary: Option<RatioSummary>,
    /// Relative variation `(max − min)/mean` of the per-n ratio across the
    /// top three `n` values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_variation: Option<f64>,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl ExperimentReport {
    /// Per-trial rows as CSV, one row per `(n, trial, solver)`.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("n,trial,seed,objective,solver\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.trial, r.seed, r.objective, r.solver
            ));
        }
        out
    }

    /// JSON summary (means, slope, brackets, checks, config echo).
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Lower-bound prefactor of the latency-power bracket:
/// `1/((πe)^{α/2}(α+1))`.
pub fn power_trp_floor_constant(alpha: f64) -> f64 {
    1.0 / ((std::f64::consts::PI * std::f64::consts::E).powf(alpha / 2.0) * (alpha + 1.0))
}

/// Predicted log-log slope of the mean k-TSP length in `n` at fixed `k`:
/// `−(1/2)(1 + 1/(k−1))`.
pub fn ktsp_exponent(k: usize) -> f64 {
    -0.5 * (1.0 + 1.0 / (k as f64 - 1.0))
}

/// Runs the configured experiment. Any trial whose solver errors aborts the
/// run; partial means are never reported.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    match cfg.problem {
        Problem::Ktsp => run_ktsp(cfg),
        Problem::Psitrp => run_psitrp(cfg),
        Problem::OracleCompare => run_oracle_compare(cfg),
    }
}

fn jobs(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(cfg.n_values.len() * cfg.trials);
    for (ni, _) in cfg.n_values.iter().enumerate() {
        for t in 0..cfg.trials {
            out.push((ni, t));
        }
    }
    out
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn fit_slope(points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len();
    let nf = n as f64;
    let xbar = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let half_width = if n > 2 {
        let ss_res: f64 = points
            .iter()
            .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
            .sum();
        let se = (ss_res / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0)
            .expect("valid dof")
            .inverse_cdf(0.975);
        Some(t * se)
    } else {
        None
    };
    SlopeFit {
        slope,
        half_width,
        points: n,
        sufficient: n >= 3,
    }
}

fn run_ktsp(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let solver = cfg.solver();
    let rows: Result<Vec<TrialRow>> = jobs(cfg)
        .par_iter()
        .map(|&(ni, trial)| {
            let n = cfg.n_values[ni];
            let k = cfg.k_for(n);
            let seed = trial_seed(cfg.base_seed, n, trial);
            let sample = sample_points(&cfg.density, n, seed);
            let (tour, label) = match (solver, cfg.k_fraction.is_some()) {
                (SolverChoice::Exact, _) => (exact_k_tsp(&sample, k)?, "exact"),
                (SolverChoice::Scheme, false) => {
                    (ktsp_densest_cell(&sample, k, cfg.scheme.a)?, "scheme")
                }
                (SolverChoice::Scheme, true) => {
                    // Proportional coverage is non-local: sweep the densest
                    // cells and stop after k visits.
                    let order = sweep_order(cfg);
                    (
                        truncated_sweep_ktsp(&sample, cfg.scheme.m, order, k)?,
                        "scheme",
                    )
                }
            };
            let objective = path_length(&sample, &tour)?;
            Ok(TrialRow {
                n,
                trial,
                seed,
                objective,
                solver: label,
            })
        })
        .collect();
    let rows = rows?;

    let mut per_n = Vec::new();
    for &n in &cfg.n_values {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.objective)
            .collect();
        let (mean, std_error) = mean_and_se(&values);
        let k = cfg.k_for(n);
        let (normalized, ratio) = if cfg.k_fraction.is_some() {
            let kappa = k as f64 / n as f64;
            let coverage = cfg.density.coverage_rate(kappa)?;
            (None, Some(mean / ((n as f64).sqrt() * coverage.rate)))
        } else {
            let e = -ktsp_exponent(k);
            let f_max = cfg.density.max_value();
            let area = cfg.density.support_area();
            let norm = mean * (f_max * n as f64).powf(e) / (k as f64 - 1.0)
                * area.powf(1.0 / (2.0 * (k as f64 - 1.0)));
            (Some(norm), None)
        };
        per_n.push(PerN {
            n,
            k: Some(k),
            mean,
            std_error,
            normalized,
            ratio,
        });
    }

    let fit_points: Vec<(f64, f64)> = per_n
        .iter()
        .filter(|p| p.mean > 0.0)
        .map(|p| ((p.n as f64).ln(), p.mean.ln()))
        .collect();
    let slope = Some(fit_slope(&fit_points));

    let theory = if let Some(rho) = cfg.k_fraction {
        let coverage = cfg.density.coverage_rate(rho)?;
        TheoryRefs {
            predicted_exponent: Some(0.5),
            rate_integral: None,
            bracket_floor: None,
            coverage_rate: Some(coverage.rate),
            coverage_threshold: Some(coverage.threshold),
            max_density: cfg.density.max_value(),
            support_area: cfg.density.support_area(),
        }
    } else {
        TheoryRefs {
            predicted_exponent: Some(ktsp_exponent(cfg.k.unwrap())),
            rate_integral: None,
            bracket_floor: None,
            coverage_rate: None,
            coverage_threshold: None,
            max_density: cfg.density.max_value(),
            support_area: cfg.density.support_area(),
        }
    };

    finish_report(cfg, rows, per_n, slope, theory, None)
}

fn sweep_order(cfg: &ExperimentConfig) -> SweepOrder<'_> {
    match cfg.scheme.order {
        OrderKind::Empirical => SweepOrder::EmpiricalCounts,
        OrderKind::Density => SweepOrder::KnownDensity(&cfg.density),
    }
}

fn run_psitrp(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let solver = cfg.solver();
    let rows: Result<Vec<TrialRow>> = jobs(cfg)
        .par_iter()
        .map(|&(ni, trial)| {
            let n = cfg.n_values[ni];
            let seed = trial_seed(cfg.base_seed, n, trial);
            let sample = sample_points(&cfg.density, n, seed);
            let (tour, label) = match solver {
                SolverChoice::Exact => (exact_power_trp(&sample, cfg.alpha)?, "exact"),
                SolverChoice::Scheme => (
                    density_sweep_tour(&sample, cfg.scheme.m, sweep_order(cfg))?,
                    "scheme",
                ),
            };
            let objective = power_latency(&sample, &tour, cfg.alpha)?;
            Ok(TrialRow {
                n,
                trial,
                seed,
                objective,
                solver: label,
            })
        })
        .collect();
    let rows = rows?;

    let growth = 1.0 + cfg.alpha / 2.0;
    let mut per_n = Vec::new();
    for &n in &cfg.n_values {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.objective)
            .collect();
        let (mean, std_error) = mean_and_se(&values);
        per_n.push(PerN {
            n,
            k: None,
            mean,
            std_error,
            normalized: None,
            ratio: Some(mean / (n as f64).powf(growth)),
        });
    }

    let fit_points: Vec<(f64, f64)> = per_n
        .iter()
        .filter(|p| p.mean > 0.0)
        .map(|p| ((p.n as f64).ln(), p.mean.ln()))
        .collect();
    let slope = Some(fit_slope(&fit_points));

    let rate_integral = cfg.density.latency_rate_integral(cfg.alpha)?;
    let theory = TheoryRefs {
        predicted_exponent: Some(growth),
        rate_integral: Some(rate_integral),
        bracket_floor: Some(power_trp_floor_constant(cfg.alpha) * rate_integral),
        coverage_rate: None,
        coverage_threshold: None,
        max_density: cfg.density.max_value(),
        support_area: cfg.density.support_area(),
    };

    finish_report(cfg, rows, per_n, slope, theory, None)
}

fn run_oracle_compare(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let compare = cfg.compare.expect("validated");
    let pairs: Result<Vec<(TrialRow, TrialRow, f64)>> = jobs(cfg)
        .par_iter()
        .map(|&(ni, trial)| {
            let n = cfg.n_values[ni];
            let seed = trial_seed(cfg.base_seed, n, trial);
            let sample = sample_points(&cfg.density, n, seed);
            let (scheme_obj, exact_obj) = match compare {
                CompareProblem::Ktsp => {
                    let k = cfg.k_for(n);
                    let scheme = ktsp_densest_cell(&sample, k, cfg.scheme.a)?;
                    let exact = exact_k_tsp(&sample, k)?;
                    (
                        path_length(&sample, &scheme)?,
                        path_length(&sample, &exact)?,
                    )
                }
                CompareProblem::Psitrp => {
                    let scheme = density_sweep_tour(&sample, cfg.scheme.m, sweep_order(cfg))?;
                    let exact = exact_power_trp(&sample, cfg.alpha)?;
                    (
                        power_latency(&sample, &scheme, cfg.alpha)?,
                        power_latency(&sample, &exact, cfg.alpha)?,
                    )
                }
            };
            let ratio = scheme_obj / exact_obj;
            Ok((
                TrialRow {
                    n,
                    trial,
                    seed,
                    objective: scheme_obj,
                    solver: "scheme",
                },
                TrialRow {
                    n,
                    trial,
                    seed,
                    objective: exact_obj,
                    solver: "exact",
                },
                ratio,
            ))
        })
        .collect();
    let pairs = pairs?;

    let mut rows = Vec::with_capacity(pairs.len() * 2);
    let mut ratios = Vec::with_capacity(pairs.len());
    for (scheme_row, exact_row, ratio) in pairs {
        rows.push(scheme_row);
        rows.push(exact_row);
        ratios.push(ratio);
    }

    let mut per_n = Vec::new();
    for &n in &cfg.n_values {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n && r.solver == "scheme")
            .map(|r| r.objective)
            .collect();
        let (mean, std_error) = mean_and_se(&values);
        per_n.push(PerN {
            n,
            k: match compare {
                CompareProblem::Ktsp => Some(cfg.k_for(n)),
                CompareProblem::Psitrp => None,
            },
            mean,
            std_error,
            normalized: None,
            ratio: None,
        });
    }

    let mut sorted = ratios.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };
    let summary = RatioSummary {
        min: sorted[0],
        median,
        max: *sorted.last().unwrap(),
    };

    let theory = TheoryRefs {
        predicted_exponent: None,
        rate_integral: None,
        bracket_floor: None,
        coverage_rate: None,
        coverage_threshold: None,
        max_density: cfg.density.max_value(),
        support_area: cfg.density.support_area(),
    };

    finish_report(cfg, rows, per_n, None, theory, Some(summary))
}

fn finish_report(
    cfg: &ExperimentConfig,
    rows: Vec<TrialRow>,
    per_n: Vec<PerN>,
    slope: Option<SlopeFit>,
    theory: TheoryRefs,
    ratio_summary: Option<RatioSummary>,
) -> Result<ExperimentReport> {
    // Relative variation of the ratio over the top three n values.
    let ratio_variation = {
        let ratios: Vec<f64> = per_n.iter().filter_map(|p| p.ratio).collect();
        let top: Vec<f64> = ratios.iter().rev().take(3).cloned().collect();
        if top.is_empty() {
            None
        } else {
            let max = top.iter().cloned().fold(f64::MIN, f64::max);
            let min = top.iter().cloned().fold(f64::MAX, f64::min);
            let mean = top.iter().sum::<f64>() / top.len() as f64;
            Some((max - min) / mean)
        }
    };

    let mut checks = Vec::new();
    if let Some(cc) = &cfg.checks {
        if let Some([lo, hi]) = cc.slope_range {
            let (passed, detail) = match &slope {
                Some(fit) => (
                    fit.slope >= lo && fit.slope <= hi,
                    format!("slope {:.4} vs [{lo}, {hi}]", fit.slope),
                ),
                None => (false, "no slope fit available".into()),
            };
            checks.push(CheckResult {
                name: "slope_range".into(),
                passed,
                detail,
            });
        }
        if cc.bracket_floor {
            let floor = theory.bracket_floor.unwrap_or(f64::NAN);
            let worst = per_n
                .iter()
                .filter_map(|p| p.ratio)
                .fold(f64::INFINITY, f64::min);
            let passed = floor.is_finite() && worst >= floor;
            checks.push(CheckResult {
                name: "bracket_floor".into(),
                passed,
                detail: format!("min ratio {worst:.5} vs floor {floor:.5}"),
            });
        }
        if let Some(bound) = cc.max_ratio_variation {
            let (passed, detail) = match ratio_variation {
                None => (false, "no ratios available".to_string()),
                Some(variation) => (
                    variation < bound,
                    format!("relative variation {variation:.4} vs bound {bound}"),
                ),
            };
            checks.push(CheckResult {
                name: "max_ratio_variation".into(),
                passed,
                detail,
            });
        }
        if let Some(min_ratio) = cc.min_oracle_ratio {
            let (passed, detail) = match &ratio_summary {
                Some(s) => (
                    s.min >= min_ratio - 1e-9,
                    format!("min ratio {:.6} vs required {min_ratio}", s.min),
                ),
                None => (false, "no scheme/exact ratios available".into()),
            };
            checks.push(CheckResult {
                name: "min_oracle_ratio".into(),
                passed,
                detail,
            });
        }
    }
    let passed = checks.iter().all(|c| c.passed);

    Ok(ExperimentReport {
        schema: 1,
        config: cfg.clone(),
        rows,
        per_n,
        slope,
        theory,
        ratio_summary,
        ratio_variation,
        checks,
        passed,
    })
}
