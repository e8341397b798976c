use std::collections::BTreeMap;

use serde::Serialize;

/// Symmetric matrix in coordinate form. Only `row ≤ col` is stored; entries
/// added at the same position are summed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SparseSymmetricMatrix {
    dim: usize,
    map: BTreeMap<(usize, usize), f64>,
}

impl SparseSymmetricMatrix {
    pub fn new(dim: usize) -> Self {
        SparseSymmetricMatrix { dim, map: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.dim && j < self.dim, "index out of range");
        *self.map.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.map.get(&(i.min(j), i.max(j))).copied().unwrap_or(0.0)
    }

    /// Stored `(row, col, value)` triples with `row ≤ col`, sorted.
    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        self.map.iter().map(|(&(i, j), &v)| (i, j, v)).collect()
    }

    pub fn nnz(&self) -> usize {
        self.map.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for (&(i, j), &v) in &self.map {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest relative row sum, `max_i |Σ_j a_ij| / max_i a_ii`.
    pub fn row_sum_defect(&self) -> f64 {
        let r = self.mul_vec(&vec![1.0; self.dim]);
        let diag = (0..self.dim).map(|i| self.get(i, i).abs()).fold(0.0, f64::max);
        r.iter().map(|x| x.abs()).fold(0.0, f64::max) / diag.max(f64::MIN_POSITIVE)
    }
}
