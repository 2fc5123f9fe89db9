//! Scaling laws for partial-coverage and latency-minimizing tours on random
//! points.
//!
//! The library models point sets drawn from a piecewise-constant density on
//! the unit square and studies two objectives over them:
//!
//! - the k-TSP: the shortest open path visiting `k` out of `n` points;
//! - the power-law repairman tour: all `n` points ordered to minimize
//!   `Σ lᵢ^α`, where `lᵢ` is the distance traveled before reaching point `i`.
//!
//! [`density`] evaluates the closed-form rate functionals that govern how
//! both optima scale with `n`; [`sampling`] generates reproducible
//! instances; [`solvers`] holds exact brute-force oracles for small
//! instances; [`schemes`] implements the constant-factor constructions
//! (densest-cell k-TSP, decreasing-density sweep); [`experiments`] runs
//! Monte Carlo scaling studies and emits CSV/JSON reports. The `tourscale`
//! binary exposes all of it on the command line.

pub mod density;
pub mod experiments;
pub mod objectives;
pub mod sampling;
pub mod schemes;
pub mod solvers;

pub use density::{CoverageRate, Density, LevelDecomposition};
pub use objectives::{ObjectiveKind, ObjectiveValue, Tour};
pub use sampling::{CellCounts, Point, SampleSet};

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The weights cannot form a probability density (wrong length,
    /// negative entries, all-zero mass, ...).
    #[error("invalid density: {0}")]
    InvalidDensity(String),

    /// A user-supplied density function returned a value we cannot average.
    #[error("invalid function value {value} at ({x}, {y})")]
    InvalidFunction { x: f64, y: f64, value: f64 },

    /// A parameter is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tour references points that do not exist or repeats an index.
    #[error("invalid tour: {0}")]
    InvalidTour(String),

    /// The instance is too large for an exact solver.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The request cannot be satisfied by any tour (e.g. k > n).
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An experiment or scheme configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
