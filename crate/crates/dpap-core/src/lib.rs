//! Exemplar clustering with a nonparametric cluster-count prior.
//!
//! The centerpiece is a max-product message passer ([`bp`]) over a binary
//! assignment grid whose column factors carry a cluster-size prior — with the
//! Dirichlet-process prior this clusters without fixing the number of
//! clusters up front. Around it sit a greedy coordinate-ascent solver
//! ([`icm`]) sharing the same objective, a classic affinity-propagation
//! baseline ([`ap`]) that needs its cluster count steered by a diagonal
//! offset, a synthetic-data generator ([`synth`]), evaluation metrics
//! ([`metrics`]), and a similarity composer for superpixel graphs
//! ([`segsim`]).
//!
//! Conventions used throughout: similarities live in log space with `-inf`
//! marking forbidden pairs (never NaN or `+inf`); an assignment maps each
//! point to its cluster's exemplar, and exemplars point at themselves;
//! indices are 0-based.

pub mod ap;
pub mod assignment;
pub mod bp;
pub mod error;
pub mod grid;
pub mod icm;
pub mod likelihood;
pub mod metrics;
pub mod prior;
pub mod result;
pub mod segsim;
pub mod similarity;
pub mod synth;

pub use ap::{ap_run, ap_sweep, ApConfig, AP_D_GRID};
pub use assignment::Assignment;
pub use bp::{
    decode, incoming_to_mu, iterate, mu_column_messages, phi_row_messages, run, EngineConfig,
    MessageState, MESSAGE_CAP,
};
pub use error::{Error, Result};
pub use grid::SquareGrid;
pub use icm::{best_exemplar, icm_best_of_both, icm_run, one_pass, IcmConfig, IcmInit};
pub use likelihood::log_joint;
pub use metrics::{
    delta_loglik, histogram_distance, rand_index, size_histogram, BenchRecord, SizeHistogram,
};
pub use prior::{
    ap_prior, dp_prior, table_prior, CardinalityPrior, ClusterSizeWeight, PriorTable, TailRule,
};
pub use result::{Diagnostics, RunResult};
pub use segsim::{
    auto_taus, color_similarity, compose, shortest_path_similarity, EdgeResponses, SegConfig,
    SuperpixelEdge, SuperpixelGraph,
};
pub use similarity::{ModelParams, SimilarityModel};
pub use synth::{
    build_similarity, expected_clusters, sample_batch, sample_dataset, sample_partition, Dataset,
    GenConfig,
};
