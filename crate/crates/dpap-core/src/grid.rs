//! Dense square grid of `f64`, used for similarity matrices and message state.

/// Row-major `n x n` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareGrid {
    n: usize,
    data: Vec<f64>,
}

impl SquareGrid {
    /// All entries zero.
    pub fn zeros(n: usize) -> Self {
        SquareGrid { n, data: vec![0.0; n * n] }
    }

    /// Take ownership of a row-major buffer of length `n * n`.
    pub fn from_flat(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "flat buffer must hold n*n entries");
        SquareGrid { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Row `i` as a contiguous slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Column `j` collected into a fresh vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.at(i, j)).collect()
    }
}
