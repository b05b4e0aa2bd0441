//! Shared input builders for the criterion benchmarks in `benches/`.

use dpap_core::{build_similarity, sample_dataset, GenConfig, SimilarityModel};

/// Deterministic synthetic similarity model with `n` points and default
/// generator settings.
pub fn bench_similarity(n: usize, seed: u64) -> SimilarityModel {
    let cfg = GenConfig { n, seed, ..GenConfig::default() };
    let ds = sample_dataset(&cfg).expect("benchmark dataset");
    build_similarity(&ds).expect("benchmark similarity")
}
