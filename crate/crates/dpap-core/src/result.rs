//! Common result type returned by every solver.

use crate::assignment::Assignment;

/// Outcome of a clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// The decoded assignment (always valid).
    pub labels: Assignment,
    /// Joint score of `labels` under the solver's own objective, excluding
    /// any assignment-independent constant.
    pub log_joint: f64,
    /// Message iterations or improvement passes executed.
    pub iterations: usize,
    /// Whether the stopping rule fired before the iteration budget ran out.
    pub converged: bool,
    /// Solver identifier, e.g. `"dpap"`, `"icm1"`, `"ap(d=-10)"`.
    pub algorithm: String,
    pub diagnostics: Diagnostics,
}

/// Optional per-run extras; absent fields cost nothing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest message change in the final iteration, for message passers.
    pub final_delta: Option<f64>,
    /// Objective after each pass, for coordinate-ascent solvers.
    pub pass_scores: Vec<f64>,
}
