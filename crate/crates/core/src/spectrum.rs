//! Sorted Steklov spectra with boundary length and normalized values.

use std::fmt::Write as _;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Relative clustering tolerance for exactly known spectra.
pub const EXACT_CLUSTER_TOL: f64 = 1e-9;
/// Relative clustering tolerance for finite-element spectra.
pub const FEM_CLUSTER_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Ascending, `eigenvalues[0]` is σ₀.
    pub eigenvalues: Vec<f64>,
    pub boundary_length: f64,
    /// `σ̄_k = σ_k · L`.
    pub normalized: Vec<f64>,
    /// Boundary traces, one per eigenvalue, in boundary-dof order.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    /// Relative tolerance used to group eigenvalues into clusters.
    pub cluster_tol: f64,
}

impl Spectrum {
    /// Sorts `eigenvalues` and derives the normalized list.
    pub fn new(mut eigenvalues: Vec<f64>, boundary_length: f64, cluster_tol: f64) -> Self {
        eigenvalues.sort_by(|a, b| a.total_cmp(b));
        let normalized = eigenvalues.iter().map(|s| s * boundary_length).collect();
        Spectrum { eigenvalues, boundary_length, normalized, eigenvectors: None, cluster_tol }
    }

    /// Neutral element of [`merge_spectra`].
    pub fn empty() -> Self {
        Spectrum::new(Vec::new(), 0.0, EXACT_CLUSTER_TOL)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `σ_k`.
    pub fn sigma(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// `σ̄_k`.
    pub fn sigma_bar(&self, k: usize) -> f64 {
        self.normalized[k]
    }

    fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.cluster_tol * a.abs().max(b.abs()) + 1e-12
    }

    /// Index ranges of consecutive eigenvalues that agree within the tolerance.
    pub fn clusters(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.eigenvalues.len() {
            if i == self.eigenvalues.len() || !self.close(self.eigenvalues[i - 1], self.eigenvalues[i]) {
                if i > start {
                    out.push(start..i);
                }
                start = i;
            }
        }
        out
    }

    /// Size of the cluster containing index `k`.
    pub fn multiplicity(&self, k: usize) -> usize {
        self.clusters().into_iter().find(|r| r.contains(&k)).map_or(0, |r| r.len())
    }

    /// CSV with header `k,sigma,sigma_bar,multiplicity`.
    pub fn to_csv(&self) -> String {
        let clusters = self.clusters();
        let mut s = String::from("k,sigma,sigma_bar,multiplicity\n");
        for r in &clusters {
            for k in r.clone() {
                writeln!(s, "{k},{:?},{:?},{}", self.eigenvalues[k], self.normalized[k], r.len()).unwrap();
            }
        }
        s
    }

    /// Keeps the first `count` eigenpairs.
    pub fn truncated(&self, count: usize) -> Spectrum {
        let n = count.min(self.len());
        let mut s = Spectrum::new(self.eigenvalues[..n].to_vec(), self.boundary_length, self.cluster_tol);
        s.eigenvectors = self.eigenvectors.as_ref().map(|v| v[..n].to_vec());
        s
    }
}

/// Spectrum of a disjoint union: sorted multiset union, boundary lengths add.
pub fn merge_spectra(parts: &[Spectrum]) -> Spectrum {
    let eigenvalues = parts.iter().flat_map(|p| p.eigenvalues.iter().copied()).collect();
    let length = parts.iter().map(|p| p.boundary_length).sum();
    let tol = parts.iter().map(|p| p.cluster_tol).fold(EXACT_CLUSTER_TOL, f64::max);
    Spectrum::new(eigenvalues, length, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_and_csv() {
        let s = Spectrum::new(vec![1.0, 0.0, 1.0 + 1e-12, 2.0], 2.0, EXACT_CLUSTER_TOL);
        assert_eq!(s.clusters(), vec![0..1, 1..3, 3..4]);
        assert_eq!(s.multiplicity(2), 2);
        let csv = s.to_csv();
        assert!(csv.starts_with("k,sigma,sigma_bar,multiplicity\n0,0.0,0.0,1\n"));
        assert_eq!(csv.lines().count(), 5);
    }

    #[test]
    fn merge_adds_lengths() {
        let a = Spectrum::new(vec![0.0, 1.0], 1.0, EXACT_CLUSTER_TOL);
        let b = Spectrum::new(vec![0.0, 0.5], 2.0, EXACT_CLUSTER_TOL);
        let m = merge_spectra(&[a.clone(), b]);
        assert_eq!(m.eigenvalues, vec![0.0, 0.0, 0.5, 1.0]);
        assert_eq!(m.boundary_length, 3.0);
        assert_eq!(m.normalized[3], 3.0);
        assert_eq!(merge_spectra(&[a.clone(), Spectrum::empty()]), a);
    }
}
