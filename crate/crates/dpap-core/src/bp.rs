//! Max-product message passing on the binary assignment grid.
//!
//! The model is a grid of binary variables `h_ij` ("point i picks exemplar
//! j") with three factor families: a one-of-n row constraint per point, a
//! column factor per candidate exemplar that scores occupied clusters with a
//! size prior and forces the exemplar to pick itself, and the per-entry
//! similarity `s(i, j)`. All messages are max-sum in log space, normalized so
//! the off state carries zero; a message value is the advantage of turning
//! the variable on.
//!
//! Column messages look intractable (the factor touches a whole column) but
//! collapse once configurations are grouped by how many other rows are on:
//! for a fixed count the best choice is the top incoming values, so one
//! shared descending sort per column plus a per-recipient walk that skips the
//! recipient's rank answers every size at once. That turns a `2^(n-1)`
//! maximization into `O(n)` per recipient after an `O(n log n)` sort.

use crate::assignment::Assignment;
use crate::error::Result;
use crate::grid::SquareGrid;
use crate::icm::{icm_run, one_pass, IcmConfig, IcmInit};
use crate::likelihood::log_joint;
use crate::prior::{dp_prior, CardinalityPrior, PriorTable};
use crate::result::{Diagnostics, RunResult};
use crate::similarity::SimilarityModel;

/// Upper cap on stored row-constraint messages. A row with a single feasible
/// column produces an unbounded "you must take this one" message; capping it
/// keeps the stored state finite without changing any decode decision.
pub const MESSAGE_CAP: f64 = 1e12;

/// Message grids plus an iteration counter. Entries are finite or negative
/// infinity, never NaN or +inf.
#[derive(Debug, Clone, PartialEq)]
pub struct MessageState {
    mu_to_h: SquareGrid,
    phi_to_h: SquareGrid,
    iteration: usize,
}

impl MessageState {
    /// Zero-initialized messages.
    pub fn new(n: usize) -> Self {
        MessageState { mu_to_h: SquareGrid::zeros(n), phi_to_h: SquareGrid::zeros(n), iteration: 0 }
    }

    pub fn n(&self) -> usize {
        self.mu_to_h.n()
    }

    /// Column-factor message into `h_ij`.
    pub fn mu(&self, i: usize, j: usize) -> f64 {
        self.mu_to_h.at(i, j)
    }

    /// Row-constraint message into `h_ij`.
    pub fn phi(&self, i: usize, j: usize) -> f64 {
        self.phi_to_h.at(i, j)
    }

    pub fn mu_grid(&self) -> &SquareGrid {
        &self.mu_to_h
    }

    pub fn phi_grid(&self) -> &SquareGrid {
        &self.phi_to_h
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }
}

/// Engine configuration. Damping factors blend `new = damping * old +
/// (1 - damping) * computed` and must lie in `[0, 1)`.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub damping_mu: f64,
    pub damping_phi: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub prior: CardinalityPrior,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            damping_mu: 0.7,
            damping_phi: 0.0,
            tol: 1e-5,
            max_iters: 1000,
            prior: dp_prior(),
        }
    }
}

impl EngineConfig {
    fn assert_valid(&self) {
        assert!(
            (0.0..1.0).contains(&self.damping_mu) && (0.0..1.0).contains(&self.damping_phi),
            "damping must lie in [0, 1)"
        );
        assert!(self.tol > 0.0, "tolerance must be positive");
        assert!(self.max_iters >= 1, "need at least one iteration");
    }
}

#[inline]
fn damp(lambda: f64, old: f64, fresh: f64) -> f64 {
    // lambda == 0 must return `fresh` exactly (0 * -inf would be NaN).
    if lambda == 0.0 || old == fresh {
        fresh
    } else {
        lambda * old + (1.0 - lambda) * fresh
    }
}

#[inline]
fn delta(old: f64, new: f64) -> f64 {
    // Equal values (including equal infinities) count as no change.
    if old == new {
        0.0
    } else {
        (old - new).abs()
    }
}

/// Messages from the grid variables into column factor `j`: similarity plus
/// the stored row-constraint message, entry by entry.
pub fn incoming_to_mu(sim: &SimilarityModel, state: &MessageState) -> SquareGrid {
    let n = sim.n();
    assert_eq!(state.n(), n, "state and similarity sizes must match");
    let mut grid = SquareGrid::zeros(n);
    for i in 0..n {
        for j in 0..n {
            grid.set(i, j, sim.s(i, j) + state.phi_to_h.at(i, j));
        }
    }
    grid
}

/// All outgoing messages of column factor `j`, given the incoming on-state
/// values `inc` (one per row; entries finite or negative infinity).
///
/// For the recipient `j` itself the factor forces `h_jj = 1`, so the off
/// state is pinned to the empty column and the on state maximizes over how
/// many other rows join. For any other recipient both states force `h_jj = 1`
/// whenever the column is occupied, and the off state also admits the empty
/// column; the message is the difference of the two maxima.
pub fn mu_column_messages(j: usize, inc: &[f64], prior: &PriorTable) -> Vec<f64> {
    let n = inc.len();
    assert!(j < n, "column index out of range");
    assert!(prior.size() >= n, "prior table must cover sizes up to n");
    debug_assert!(
        inc.iter().all(|v| !v.is_nan() && *v < f64::INFINITY),
        "incoming values must be finite or -inf"
    );

    let mut out = vec![0.0; n];

    // One shared descending sort of the rows other than j. The sort is
    // stable, so equal values keep ascending row order and dropping any one
    // row leaves the rest in the same relative order; every per-recipient
    // result below is then bitwise identical to re-sorting without that row.
    let mut order: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    order.sort_by(|&a, &b| inc[b].total_cmp(&inc[a]));
    let m = order.len();

    // Recipient j: cluster {j} plus the best c of the other rows.
    {
        let mut run = 0.0;
        let mut best = prior.log_weight(1);
        for c in 1..=m {
            run += inc[order[c - 1]];
            let v = run + prior.log_weight(1 + c);
            if v > best {
                best = v;
            }
        }
        out[j] = best;
    }

    let mut rank = vec![usize::MAX; n];
    for (r, &row) in order.iter().enumerate() {
        rank[row] = r;
    }

    let inc_j = inc[j];
    for i in 0..n {
        if i == j {
            continue;
        }
        // Walk sizes c = 0..n-2 over the shared order, skipping the
        // recipient's own rank; `run` is the sum of the c largest incoming
        // values among rows other than i and j.
        let r_i = rank[i];
        let mut run = 0.0;
        let mut best_on = run + prior.log_weight(2);
        let mut best_off = run + prior.log_weight(1);
        for c in 1..m {
            let k = c - 1; // next element of the order with rank r_i removed
            run += inc[order[if k < r_i { k } else { c }]];
            let on = run + prior.log_weight(2 + c);
            if on > best_on {
                best_on = on;
            }
            let off = run + prior.log_weight(1 + c);
            if off > best_off {
                best_off = off;
            }
        }
        let on_state = inc_j + best_on;
        let off_state = (inc_j + best_off).max(0.0);
        out[i] = if on_state == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            on_state - off_state
        };
    }

    out
}

/// All outgoing messages of the one-of-n row constraint, given the incoming
/// on-state values `inc`: `out[j] = -max_{j' != j} inc[j']`, computed with the
/// top two maxima. A row whose other entries are all negative infinity yields
/// +infinity ("this column is forced"); `iterate` caps that value before
/// storing it.
pub fn phi_row_messages(inc: &[f64]) -> Vec<f64> {
    debug_assert!(inc.iter().all(|v| !v.is_nan()), "incoming values must not be NaN");
    let mut best = f64::NEG_INFINITY;
    let mut best_j = 0usize;
    let mut second = f64::NEG_INFINITY;
    for (j, &v) in inc.iter().enumerate() {
        if v > best {
            second = best;
            best = v;
            best_j = j;
        } else if v > second {
            second = v;
        }
    }
    (0..inc.len()).map(|j| if j == best_j { -second } else { -best }).collect()
}

/// One block-synchronous round: update every column message from the stored
/// row messages, then every row message from the fresh column messages.
/// Returns the largest absolute change over both grids.
pub fn iterate(sim: &SimilarityModel, state: &mut MessageState, cfg: &EngineConfig) -> f64 {
    cfg.assert_valid();
    let table = cfg.prior.table(sim.n());
    iterate_with_table(sim, state, cfg, &table)
}

fn iterate_with_table(
    sim: &SimilarityModel,
    state: &mut MessageState,
    cfg: &EngineConfig,
    table: &PriorTable,
) -> f64 {
    let n = sim.n();
    assert_eq!(state.n(), n, "state and similarity sizes must match");
    let mut max_delta = 0.0f64;

    // Column block, from the row-message snapshot.
    let inc_mu = incoming_to_mu(sim, state);
    for j in 0..n {
        let col = inc_mu.column(j);
        let fresh = mu_column_messages(j, &col, table);
        for i in 0..n {
            let old = state.mu_to_h.at(i, j);
            let new = damp(cfg.damping_mu, old, fresh[i]);
            max_delta = max_delta.max(delta(old, new));
            state.mu_to_h.set(i, j, new);
        }
    }

    // Row block, from the fresh column messages.
    for i in 0..n {
        let inc: Vec<f64> = (0..n).map(|j| sim.s(i, j) + state.mu_to_h.at(i, j)).collect();
        let fresh = phi_row_messages(&inc);
        for j in 0..n {
            let capped = fresh[j].min(MESSAGE_CAP);
            let old = state.phi_to_h.at(i, j);
            let new = damp(cfg.damping_phi, old, capped);
            max_delta = max_delta.max(delta(old, new));
            state.phi_to_h.set(i, j, new);
        }
    }

    state.iteration += 1;
    max_delta
}

/// Pass budget for the decode repair below. The ascent almost always stops
/// after a handful of passes; the cap only bounds pathological cases.
const DECODE_REPAIR_MAX_PASSES: usize = 100;

/// Read an assignment out of the current messages. Per row, entries with
/// positive belief are tentatively on; multiple or zero ons fall back to the
/// row's best belief (lowest index on ties). The tentative labels are then
/// repaired into a valid assignment and the blocked ascent runs to its
/// fixpoint, so the decode is always valid and locally optimal.
pub fn decode(sim: &SimilarityModel, state: &MessageState, prior: &CardinalityPrior) -> Assignment {
    let n = sim.n();
    assert_eq!(state.n(), n, "state and similarity sizes must match");
    let mut raw = vec![0usize; n];
    for i in 0..n {
        let mut on_best: Option<(usize, f64)> = None;
        let mut overall = (0usize, f64::NEG_INFINITY);
        for j in 0..n {
            let b = sim.s(i, j) + state.mu_to_h.at(i, j) + state.phi_to_h.at(i, j);
            if b > overall.1 {
                overall = (j, b);
            }
            if b > 0.0 && on_best.map_or(true, |(_, cur)| b > cur) {
                on_best = Some((j, b));
            }
        }
        raw[i] = on_best.map_or(overall.0, |(j, _)| j);
    }
    let repaired = one_pass(sim, prior, &raw).expect("decode labels are in range");
    let ascended = icm_run(
        sim,
        prior,
        &IcmConfig { init: IcmInit::Given(repaired), max_passes: DECODE_REPAIR_MAX_PASSES },
    )
    .expect("repaired labels are valid");
    ascended.labels
}

/// Run message passing to convergence (or `max_iters`), then decode.
/// `log_joint` on the result excludes the assignment-independent constant.
pub fn run(sim: &SimilarityModel, cfg: &EngineConfig) -> RunResult {
    cfg.assert_valid();
    let n = sim.n();
    if n == 1 {
        // A lone point is always its own exemplar.
        let labels = Assignment::validate(vec![0]).expect("singleton is valid");
        let lj = log_joint(sim, &labels, &cfg.prior, 1.0, false);
        return RunResult {
            labels,
            log_joint: lj,
            iterations: 1,
            converged: true,
            algorithm: "dpap".into(),
            diagnostics: Diagnostics { final_delta: Some(0.0), pass_scores: vec![] },
        };
    }

    let table = cfg.prior.table(n);
    let mut state = MessageState::new(n);
    let mut converged = false;
    let mut iterations = 0;
    let mut final_delta = f64::INFINITY;
    for it in 1..=cfg.max_iters {
        let d = iterate_with_table(sim, &mut state, cfg, &table);
        iterations = it;
        final_delta = d;
        if d < cfg.tol {
            converged = true;
            break;
        }
    }
    let labels = decode(sim, &state, &cfg.prior);
    let lj = log_joint(sim, &labels, &cfg.prior, 1.0, false);
    RunResult {
        labels,
        log_joint: lj,
        iterations,
        converged,
        algorithm: "dpap".into(),
        diagnostics: Diagnostics { final_delta: Some(final_delta), pass_scores: vec![] },
    }
}

/// Convenience: decode directly from a run's final state. Exposed for tests
/// and tooling that drive `iterate` manually.
pub fn run_result_from_state(
    sim: &SimilarityModel,
    state: &MessageState,
    cfg: &EngineConfig,
    converged: bool,
    final_delta: f64,
) -> Result<RunResult> {
    let labels = decode(sim, state, &cfg.prior);
    let lj = log_joint(sim, &labels, &cfg.prior, 1.0, false);
    Ok(RunResult {
        labels,
        log_joint: lj,
        iterations: state.iteration(),
        converged,
        algorithm: "dpap".into(),
        diagnostics: Diagnostics { final_delta: Some(final_delta), pass_scores: vec![] },
    })
}
