//! Joint log-likelihood of an assignment under a similarity matrix and a
//! cluster-size prior.
//!
//! The score is `sum_i s(i, c_i) + sum_k prior(N_k)`, one prior term per
//! occupied cluster. Exemplars contribute their diagonal preference
//! `s(k, k)`; members contribute `s(i, c_i)`. The optional additive constant
//! `log Gamma(alpha) - log Gamma(n + alpha)` does not depend on the
//! assignment, so optimizers leave it off; turn it on to report absolute
//! model log-likelihoods.

use crate::assignment::Assignment;
use crate::prior::ClusterSizeWeight;
use crate::similarity::SimilarityModel;
use statrs::function::gamma::ln_gamma;

/// Score `a` against `sim` and `prior`. Negative infinity (not an error) when
/// the assignment uses a forbidden similarity entry or cluster size.
pub fn log_joint<W: ClusterSizeWeight + ?Sized>(
    sim: &SimilarityModel,
    a: &Assignment,
    prior: &W,
    alpha: f64,
    include_constant: bool,
) -> f64 {
    assert_eq!(a.n(), sim.n(), "assignment and similarity sizes must match");
    assert!(alpha.is_finite() && alpha > 0.0, "alpha must be positive");
    let mut total = score_labels(sim, a.labels(), prior);
    if include_constant {
        total += ln_gamma(alpha) - ln_gamma(sim.n() as f64 + alpha);
    }
    total
}

/// Assignment-dependent part of the score, on raw labels. The caller
/// guarantees the labels are valid; used on the optimizer hot paths.
pub(crate) fn score_labels<W: ClusterSizeWeight + ?Sized>(
    sim: &SimilarityModel,
    labels: &[usize],
    prior: &W,
) -> f64 {
    let n = labels.len();
    let mut total = 0.0;
    let mut sizes = vec![0usize; n];
    for (i, &c) in labels.iter().enumerate() {
        total += sim.s(i, c);
        sizes[c] += 1;
    }
    for (k, &sz) in sizes.iter().enumerate() {
        if labels[k] == k {
            total += prior.log_weight(sz);
        }
    }
    total
}
