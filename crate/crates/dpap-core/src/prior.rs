//! Cluster-size priors.
//!
//! A prior assigns a log-weight to each occupied cluster size `K >= 1`; the
//! engines add one weight per cluster on top of the similarity terms. The
//! empty-cluster case is handled by the engines (a column with no members
//! contributes nothing), so priors never see `K = 0`.

use crate::error::{Error, Result};
use statrs::function::factorial::ln_factorial;

/// How a table prior extends past its last explicit entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRule {
    /// Sizes beyond the table reuse the last entry.
    RepeatLast,
    /// Sizes beyond the table are forbidden.
    NegInfinity,
}

#[derive(Debug, Clone, PartialEq)]
enum PriorKind {
    /// `log Gamma(K) - log K`: the size weight of a collapsed
    /// Dirichlet-process mixture (concentration enters via the similarity
    /// diagonal, not here).
    DirichletProcess,
    /// Identically zero: reduces the objective to the plain sum of
    /// similarities, i.e. the classic affinity-propagation objective.
    Zero,
    /// Explicit per-size log-weights with a tail rule.
    Table { weights: Vec<f64>, tail: TailRule },
}

/// A cluster-size prior. Immutable after construction and freely shared.
#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityPrior {
    name: String,
    kind: PriorKind,
}

/// Dirichlet-process size weights: `log Gamma(K) - log K`.
pub fn dp_prior() -> CardinalityPrior {
    CardinalityPrior { name: "dp".into(), kind: PriorKind::DirichletProcess }
}

/// The zero prior; with it the joint score is exactly `sum_i s(i, c_i)`.
pub fn ap_prior() -> CardinalityPrior {
    CardinalityPrior { name: "ap".into(), kind: PriorKind::Zero }
}

/// Explicit table of log-weights; `weights[k - 1]` is the weight of size `k`.
/// Entries may be negative infinity to forbid a size, never NaN or +inf.
pub fn table_prior(weights: Vec<f64>, tail: TailRule) -> Result<CardinalityPrior> {
    if weights.is_empty() {
        return Err(Error::EmptyTable);
    }
    for (idx, w) in weights.iter().enumerate() {
        if w.is_nan() || *w == f64::INFINITY {
            return Err(Error::BadConfig {
                detail: format!("table weight {} must be finite or -inf", idx + 1),
            });
        }
    }
    Ok(CardinalityPrior { name: "table".into(), kind: PriorKind::Table { weights, tail } })
}

impl CardinalityPrior {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Log-weight of an occupied cluster of size `k >= 1`.
    pub fn log_weight(&self, k: usize) -> f64 {
        assert!(k >= 1, "cluster size must be at least 1");
        match &self.kind {
            // log Gamma(k) = log (k-1)!; the factorial form is exact at the
            // small sizes the worked examples pin down (weight 0 at size 1).
            PriorKind::DirichletProcess => ln_factorial((k - 1) as u64) - (k as f64).ln(),
            PriorKind::Zero => 0.0,
            PriorKind::Table { weights, tail } => {
                if k <= weights.len() {
                    weights[k - 1]
                } else {
                    match tail {
                        TailRule::RepeatLast => *weights.last().unwrap(),
                        TailRule::NegInfinity => f64::NEG_INFINITY,
                    }
                }
            }
        }
    }

    /// Memoize log-weights for sizes `1..=n`. The message kernel queries
    /// every size per recipient, so engines precompute this once per run.
    pub fn table(&self, n: usize) -> PriorTable {
        PriorTable { w: (1..=n).map(|k| self.log_weight(k)).collect() }
    }
}

/// Log-weights of sizes `1..=n`, precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorTable {
    w: Vec<f64>,
}

impl PriorTable {
    /// Largest size covered.
    pub fn size(&self) -> usize {
        self.w.len()
    }

    #[inline]
    pub fn log_weight(&self, k: usize) -> f64 {
        debug_assert!(k >= 1 && k <= self.w.len(), "size {k} outside table");
        self.w[k - 1]
    }
}

/// Anything that can weight an occupied cluster size.
pub trait ClusterSizeWeight {
    fn log_weight(&self, k: usize) -> f64;
}

impl ClusterSizeWeight for CardinalityPrior {
    fn log_weight(&self, k: usize) -> f64 {
        CardinalityPrior::log_weight(self, k)
    }
}

impl ClusterSizeWeight for PriorTable {
    fn log_weight(&self, k: usize) -> f64 {
        PriorTable::log_weight(self, k)
    }
}
