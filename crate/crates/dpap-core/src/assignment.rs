//! Exemplar-canonical cluster assignments.
//!
//! An assignment stores one label per point; the label is the index of the
//! point's exemplar. A labelling is valid when every label's target is
//! self-assigned (`labels[labels[i]] == labels[i]`), so a point is an
//! exemplar exactly when it carries its own index. Labels are 0-based
//! throughout the library; file formats that use 1-based indices convert at
//! the I/O boundary.

use crate::error::{Error, Result};

/// A validated exemplar assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    labels: Vec<usize>,
}

impl Assignment {
    /// Validate a labelling. Bounds are checked first; then every label must
    /// point at a self-assigned exemplar. Errors identify the first
    /// violating point in index order.
    pub fn validate(labels: Vec<usize>) -> Result<Self> {
        let n = labels.len();
        for (index, &label) in labels.iter().enumerate() {
            if label >= n {
                return Err(Error::LabelOutOfRange { index, label, n });
            }
        }
        for (index, &label) in labels.iter().enumerate() {
            if labels[label] != label {
                return Err(Error::NonExemplarLabel { index });
            }
        }
        Ok(Assignment { labels })
    }

    /// Build canonical labels from explicit groups and their exemplars.
    /// `groups[k]` lists the members of group `k` and `exemplars[k]` must be
    /// one of them; the groups must partition `0..n`.
    pub fn canonicalize(groups: &[Vec<usize>], exemplars: &[usize]) -> Result<Self> {
        if groups.len() != exemplars.len() {
            return Err(Error::SizeMismatch { expected: groups.len(), got: exemplars.len() });
        }
        let n: usize = groups.iter().map(|g| g.len()).sum();
        let mut labels = vec![usize::MAX; n];
        for (group, &exemplar) in groups.iter().zip(exemplars) {
            if !group.contains(&exemplar) {
                return Err(Error::ExemplarNotMember { exemplar });
            }
            for &member in group {
                if member >= n {
                    return Err(Error::BadPartition {
                        detail: format!("member {member} out of range (n = {n})"),
                    });
                }
                if labels[member] != usize::MAX {
                    return Err(Error::BadPartition {
                        detail: format!("point {member} appears in more than one group"),
                    });
                }
                labels[member] = exemplar;
            }
        }
        // Every slot filled exactly once; groups partition the point set.
        debug_assert!(labels.iter().all(|&l| l != usize::MAX));
        Ok(Assignment { labels })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Exemplar indices in ascending order.
    pub fn exemplars(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.labels[i] == i).collect()
    }

    /// `(exemplar, group size)` pairs in ascending exemplar order.
    pub fn cluster_sizes(&self) -> Vec<(usize, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for &label in &self.labels {
            *counts.entry(label).or_insert(0usize) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn n_clusters(&self) -> usize {
        self.exemplars().len()
    }
}
