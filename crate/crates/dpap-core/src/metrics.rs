//! Evaluation metrics for comparing clusterings: pair-counting agreement,
//! objective gap against the ground truth, and cluster-size histograms.

use std::collections::BTreeMap;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::likelihood::log_joint;
use crate::prior::ClusterSizeWeight;
use crate::similarity::SimilarityModel;

/// Fraction of point pairs on which two clusterings agree (both together or
/// both apart). Needs at least two points for there to be a pair.
pub fn rand_index(a: &Assignment, b: &Assignment) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch { expected: a.n(), got: b.n() });
    }
    let n = a.n();
    if n < 2 {
        return Err(Error::TooFewPoints { n });
    }
    let (la, lb) = (a.labels(), b.labels());
    let mut agree = 0u64;
    for i in 0..n {
        for j in (i + 1)..n {
            if (la[i] == la[j]) == (lb[i] == lb[j]) {
                agree += 1;
            }
        }
    }
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(agree as f64 / pairs as f64)
}

/// Joint-score advantage of `found` over `truth` under the given prior
/// (positive when the solver beat the generating assignment). The
/// assignment-independent constant cancels and is excluded.
pub fn delta_loglik<W: ClusterSizeWeight + ?Sized>(
    sim: &SimilarityModel,
    found: &Assignment,
    truth: &Assignment,
    prior: &W,
) -> Result<f64> {
    if found.n() != sim.n() {
        return Err(Error::SizeMismatch { expected: sim.n(), got: found.n() });
    }
    if truth.n() != sim.n() {
        return Err(Error::SizeMismatch { expected: sim.n(), got: truth.n() });
    }
    Ok(log_joint(sim, found, prior, 1.0, false) - log_joint(sim, truth, prior, 1.0, false))
}

/// Counts of cluster sizes, accumulated across assignments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SizeHistogram {
    counts: BTreeMap<usize, u64>,
}

impl SizeHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add every cluster of one assignment.
    pub fn add(&mut self, a: &Assignment) {
        for (_, size) in a.cluster_sizes() {
            *self.counts.entry(size).or_insert(0) += 1;
        }
    }

    /// Fold another histogram into this one.
    pub fn merge(&mut self, other: &SizeHistogram) {
        for (&size, &count) in &other.counts {
            *self.counts.entry(size).or_insert(0) += count;
        }
    }

    /// (size, count) pairs in ascending size order.
    pub fn counts(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    /// Total number of clusters counted.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

/// Build one histogram from a batch of assignments.
pub fn size_histogram(assignments: &[Assignment]) -> SizeHistogram {
    let mut h = SizeHistogram::new();
    for a in assignments {
        h.add(a);
    }
    h
}

/// Total-variation distance between two size histograms viewed as
/// distributions over sizes: half the sum of absolute frequency differences.
/// Ranges over [0, 1]; comparing two empty histograms is an error, and an
/// empty histogram is at distance 1 from any non-empty one.
pub fn histogram_distance(a: &SizeHistogram, b: &SizeHistogram) -> Result<f64> {
    let (ta, tb) = (a.total(), b.total());
    if ta == 0 && tb == 0 {
        return Err(Error::EmptyHistograms);
    }
    if ta == 0 || tb == 0 {
        return Ok(1.0);
    }
    let mut keys: Vec<usize> = a.counts().map(|(s, _)| s).collect();
    keys.extend(b.counts().map(|(s, _)| s));
    keys.sort_unstable();
    keys.dedup();
    let mut sum = 0.0;
    for size in keys {
        let pa = *a.counts.get(&size).unwrap_or(&0) as f64 / ta as f64;
        let pb = *b.counts.get(&size).unwrap_or(&0) as f64 / tb as f64;
        sum += (pa - pb).abs();
    }
    Ok(0.5 * sum)
}

/// One benchmark measurement: an algorithm's result on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub dataset_id: usize,
    pub algorithm: String,
    pub rand_index: f64,
    pub delta_loglik: f64,
    pub n_clusters: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Seconds; zero when timing collection is disabled.
    pub wall_time: f64,
}
