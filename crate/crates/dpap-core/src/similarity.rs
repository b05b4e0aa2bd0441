//! Pairwise similarity matrices in log space.
//!
//! Entry `s(i, j)` with `i != j` scores assigning point `i` to exemplar `j`
//! (a conditional log-density when model-derived). The diagonal `s(j, j)`
//! is the exemplar preference; for model-derived matrices it holds
//! `log(alpha) + log base_density(x_j)`. Off-diagonal entries may be
//! negative infinity to forbid an assignment outright; the diagonal must
//! stay finite so every point can always become its own exemplar.

use crate::error::{Error, Result};
use crate::grid::SquareGrid;

/// Dense pairwise similarity matrix. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityModel {
    grid: SquareGrid,
}

impl SimilarityModel {
    /// Build from a row-major flat buffer of length `n * n`.
    pub fn from_flat(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadSimilarity { detail: "need at least one point".into() });
        }
        if data.len() != n * n {
            return Err(Error::BadSimilarity {
                detail: format!("expected {} entries, got {}", n * n, data.len()),
            });
        }
        let grid = SquareGrid::from_flat(n, data);
        for i in 0..n {
            if !grid.at(i, i).is_finite() {
                return Err(Error::BadSimilarity {
                    detail: format!("diagonal entry ({i}, {i}) must be finite"),
                });
            }
            for j in 0..n {
                let v = grid.at(i, j);
                if v.is_nan() || v == f64::INFINITY {
                    return Err(Error::BadSimilarity {
                        detail: format!("entry ({i}, {j}) must be finite or -inf"),
                    });
                }
            }
        }
        Ok(SimilarityModel { grid })
    }

    /// Build from nested rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::BadSimilarity {
                    detail: format!("row {i} has {} entries, expected {n}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(n, data)
    }

    /// Expand a sparse off-diagonal support into a dense matrix, filling
    /// missing off-diagonal entries with negative infinity.
    pub fn from_sparse<I>(n: usize, diagonal: &[f64], entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if diagonal.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: diagonal.len() });
        }
        let mut data = vec![f64::NEG_INFINITY; n * n];
        for (j, &d) in diagonal.iter().enumerate() {
            data[j * n + j] = d;
        }
        for (i, j, v) in entries {
            if i >= n || j >= n {
                return Err(Error::BadSimilarity {
                    detail: format!("sparse entry ({i}, {j}) out of range (n = {n})"),
                });
            }
            data[i * n + j] = v;
        }
        Self::from_flat(n, data)
    }

    /// Score points against an explicit generative model.
    pub fn from_model(points: &[Vec<f64>], params: &ModelParams) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::BadSimilarity { detail: "need at least one point".into() });
        }
        let log_alpha = params.alpha.ln();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = if i == j {
                    log_alpha + (params.base_log_density)(&points[i])
                } else {
                    (params.conditional_log_density)(&points[i], &points[j])
                };
            }
        }
        Self::from_flat(n, data)
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    #[inline]
    pub fn s(&self, i: usize, j: usize) -> f64 {
        self.grid.at(i, j)
    }

    pub fn grid(&self) -> &SquareGrid {
        &self.grid
    }

    /// Copy with `d` added to every diagonal entry.
    pub fn with_diagonal_offset(&self, d: f64) -> Self {
        assert!(d.is_finite(), "diagonal offset must be finite");
        let mut grid = self.grid.clone();
        for j in 0..grid.n() {
            grid.set(j, j, grid.at(j, j) + d);
        }
        SimilarityModel { grid }
    }

    /// Copy with every diagonal entry replaced by `p`.
    pub fn with_uniform_diagonal(&self, p: f64) -> Self {
        assert!(p.is_finite(), "diagonal preference must be finite");
        let mut grid = self.grid.clone();
        for j in 0..grid.n() {
            grid.set(j, j, p);
        }
        SimilarityModel { grid }
    }

    /// Copy with every entry multiplied by `factor > 0`; negative-infinity
    /// entries stay negative infinity.
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor.is_finite() && factor > 0.0, "scale must be positive and finite");
        let n = self.n();
        let mut data = Vec::with_capacity(n * n);
        for v in self.grid.as_slice() {
            data.push(if *v == f64::NEG_INFINITY { *v } else { factor * v });
        }
        SimilarityModel { grid: SquareGrid::from_flat(n, data) }
    }
}

/// Generative model pieces used to derive a similarity matrix from points.
pub struct ModelParams {
    /// Concentration of the partition prior; enters diagonal preferences as
    /// `log(alpha)`.
    pub alpha: f64,
    /// `log P(x; G0)`: log-density of a point under the exemplar base measure.
    pub base_log_density: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    /// `log P(x | e)`: log-density of a point given its exemplar's location.
    pub conditional_log_density: Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
}

impl ModelParams {
    pub fn new(
        alpha: f64,
        base_log_density: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
        conditional_log_density: Box<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>,
    ) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::BadConfig { detail: format!("alpha must be positive, got {alpha}") });
        }
        Ok(ModelParams { alpha, base_log_density, conditional_log_density })
    }

    /// Spherical-Gaussian model: exemplars from `N(0, base_variance * I)`,
    /// members from `N(exemplar, cond_variance * I)`.
    pub fn spherical_gaussian(alpha: f64, base_variance: f64, cond_variance: f64) -> Result<Self> {
        if !(base_variance.is_finite() && base_variance > 0.0) {
            return Err(Error::BadConfig {
                detail: format!("base_variance must be positive, got {base_variance}"),
            });
        }
        if !(cond_variance.is_finite() && cond_variance > 0.0) {
            return Err(Error::BadConfig {
                detail: format!("cond_variance must be positive, got {cond_variance}"),
            });
        }
        let base = move |x: &[f64]| gaussian_log_density(x, None, base_variance);
        let cond = move |x: &[f64], e: &[f64]| gaussian_log_density(x, Some(e), cond_variance);
        ModelParams::new(alpha, Box::new(base), Box::new(cond))
    }
}

/// Log-density of `x` under a spherical Gaussian centred at `mean`
/// (origin when `None`) with per-dimension variance `variance`.
fn gaussian_log_density(x: &[f64], mean: Option<&[f64]>, variance: f64) -> f64 {
    let dim = x.len() as f64;
    let mut sq = 0.0;
    match mean {
        Some(m) => {
            for (a, b) in x.iter().zip(m) {
                let d = a - b;
                sq += d * d;
            }
        }
        None => {
            for a in x {
                sq += a * a;
            }
        }
    }
    -0.5 * dim * (2.0 * std::f64::consts::PI * variance).ln() - sq / (2.0 * variance)
}
