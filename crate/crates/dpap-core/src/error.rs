//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A label points outside `0..n`.
    #[error("label {label} for point {index} is out of range (n = {n})")]
    LabelOutOfRange { index: usize, label: usize, n: usize },

    /// A point maps to a label whose target is not self-assigned.
    #[error("point {index} maps to a non-exemplar label")]
    NonExemplarLabel { index: usize },

    /// A declared exemplar does not belong to the group it represents.
    #[error("exemplar {exemplar} is not a member of its group")]
    ExemplarNotMember { exemplar: usize },

    /// Groups passed to `canonicalize` do not partition the point set.
    #[error("groups do not partition the point set: {detail}")]
    BadPartition { detail: String },

    /// A table prior was built from an empty weight list.
    #[error("empty weight table")]
    EmptyTable,

    /// `best_exemplar` was called on an empty member set.
    #[error("empty member set")]
    EmptyMembers,

    /// Two inputs that must describe the same number of points disagree.
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    /// A similarity matrix violates its construction contract.
    #[error("invalid similarity matrix: {detail}")]
    BadSimilarity { detail: String },

    /// A configuration value violates its documented range.
    #[error("invalid configuration: {detail}")]
    BadConfig { detail: String },

    /// Shortest-path inputs must have non-negative edge weights.
    #[error("edge ({i}, {j}) has negative weight")]
    NegativeEdgeWeight { i: usize, j: usize },

    /// A superpixel graph violates its construction contract.
    #[error("invalid superpixel graph: {detail}")]
    BadGraph { detail: String },

    /// An operation needs at least two points.
    #[error("need at least two points, got {n}")]
    TooFewPoints { n: usize },

    /// Histogram distance is undefined when both histograms are empty.
    #[error("both histograms are empty")]
    EmptyHistograms,
}

pub type Result<T> = std::result::Result<T, Error>;
