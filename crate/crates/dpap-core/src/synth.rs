//! Synthetic data for the benchmark harness: partitions drawn from a Chinese
//! restaurant process, spherical-Gaussian points around per-cluster
//! exemplars, and the matching similarity matrix.
//!
//! Generation is fully determined by the seed. The draw order is part of the
//! contract (tests and the CLI depend on byte-identical reruns): first `n`
//! uniforms for the partition, then per cluster in order of first appearance
//! one exemplar choice and `dim` normals for the exemplar location, then per
//! non-exemplar point in ascending index order `dim` normals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::similarity::{ModelParams, SimilarityModel};

/// Generator settings. `seed` fully determines the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Concentration of the partition process.
    pub alpha: f64,
    pub dim: usize,
    /// Variance of exemplar locations around the origin (per coordinate).
    pub base_variance: f64,
    /// Variance of cluster members around their exemplar (per coordinate).
    pub cond_variance: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { n: 100, alpha: 1.0, dim: 2, base_variance: 1.0, cond_variance: 0.5, seed: 0 }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::BadConfig { detail: "n must be at least 1".into() });
        }
        if self.dim == 0 {
            return Err(Error::BadConfig { detail: "dim must be at least 1".into() });
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::BadConfig { detail: format!("alpha must be positive, got {}", self.alpha) });
        }
        for (name, v) in [("base_variance", self.base_variance), ("cond_variance", self.cond_variance)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::BadConfig { detail: format!("{name} must be positive, got {v}") });
            }
        }
        Ok(())
    }
}

/// A generated dataset: the settings that produced it, the points, and the
/// ground-truth assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: GenConfig,
    pub points: Vec<Vec<f64>>,
    pub truth: Assignment,
}

/// Draw a partition of `n` points from a Chinese restaurant process with
/// concentration `alpha`. The result maps each point to a cluster id; ids are
/// assigned in order of first appearance, so they form `0..k` and the first
/// point always gets id 0.
pub fn sample_partition<R: Rng + ?Sized>(n: usize, alpha: f64, rng: &mut R) -> Vec<usize> {
    assert!(n >= 1, "need at least one point");
    assert!(alpha.is_finite() && alpha > 0.0, "alpha must be positive");
    let mut ids = Vec::with_capacity(n);
    let mut counts: Vec<usize> = Vec::new();
    for i in 0..n {
        // Point i joins cluster g with probability N_g / (i + alpha) and
        // opens a new cluster with probability alpha / (i + alpha).
        let u = rng.random::<f64>() * (i as f64 + alpha);
        let mut acc = 0.0;
        let mut chosen = counts.len();
        for (g, &c) in counts.iter().enumerate() {
            acc += c as f64;
            if u < acc {
                chosen = g;
                break;
            }
        }
        if chosen == counts.len() {
            counts.push(1);
        } else {
            counts[chosen] += 1;
        }
        ids.push(chosen);
    }
    ids
}

/// Expected number of clusters in a partition of `n` points at concentration
/// `alpha`: the sum of `alpha / (alpha + i)` over `i = 0..n`.
pub fn expected_clusters(n: usize, alpha: f64) -> f64 {
    (0..n).map(|i| alpha / (alpha + i as f64)).sum()
}

/// Generate one dataset from `cfg` (see the module docs for the draw order).
pub fn sample_dataset(cfg: &GenConfig) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ids = sample_partition(cfg.n, cfg.alpha, &mut rng);
    let k = ids.iter().copied().max().expect("non-empty") + 1;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &g) in ids.iter().enumerate() {
        members[g].push(i);
    }

    let base_sd = cfg.base_variance.sqrt();
    let cond_sd = cfg.cond_variance.sqrt();
    let mut exemplar_of = vec![0usize; k];
    let mut exemplar_point: Vec<Vec<f64>> = vec![Vec::new(); k];
    for g in 0..k {
        let pick = rng.random_range(0..members[g].len());
        exemplar_of[g] = members[g][pick];
        let coords: Vec<f64> =
            (0..cfg.dim).map(|_| base_sd * rng.sample::<f64, _>(StandardNormal)).collect();
        exemplar_point[g] = coords;
    }

    let mut points: Vec<Vec<f64>> = vec![Vec::new(); cfg.n];
    let mut labels = vec![0usize; cfg.n];
    for g in 0..k {
        points[exemplar_of[g]] = exemplar_point[g].clone();
    }
    for (i, &g) in ids.iter().enumerate() {
        labels[i] = exemplar_of[g];
        if i == exemplar_of[g] {
            continue;
        }
        points[i] = exemplar_point[g]
            .iter()
            .map(|&c| c + cond_sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
    }

    let truth = Assignment::validate(labels).expect("exemplars point at themselves");
    Ok(Dataset { config: cfg.clone(), points, truth })
}

/// Generate `count` datasets with seeds `cfg.seed`, `cfg.seed + 1`, ….
pub fn sample_batch(cfg: &GenConfig, count: usize) -> Result<Vec<Dataset>> {
    (0..count)
        .map(|i| sample_dataset(&GenConfig { seed: cfg.seed.wrapping_add(i as u64), ..cfg.clone() }))
        .collect()
}

/// Build the model similarity matrix that matches a dataset's generator
/// settings (spherical Gaussians plus the partition-process preferences).
pub fn build_similarity(dataset: &Dataset) -> Result<SimilarityModel> {
    let cfg = &dataset.config;
    let params = ModelParams::spherical_gaussian(cfg.alpha, cfg.base_variance, cfg.cond_variance)?;
    SimilarityModel::from_model(&dataset.points, &params)
}
