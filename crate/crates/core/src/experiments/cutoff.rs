//! Energy of the logarithmic cutoff on the annulus `ρ < r < √ρ`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dtn::assemble_stiffness;
use crate::error::{invalid, Error, Result};
use crate::geometry::mesh::SurfaceMesh;

#[derive(Debug, Clone, Serialize)]
pub struct CutoffRow {
    pub rho: f64,
    pub energy: f64,
    /// `2π / log(1/√ρ)`.
    pub exact: f64,
    pub ratio: f64,
    pub n_vertices: usize,
}

/// `φ(r) = (log r − log ρ) / (−log √ρ)`, which runs from 0 at `r = ρ` to 1 at `r = √ρ`.
pub fn cutoff(rho: f64, r: f64) -> f64 {
    (r.ln() - rho.ln()) / (-(rho.sqrt().ln()))
}

/// Log-polar mesh of the annulus with about `resolution` relative spacing in
/// both the radial and the angular direction.
fn log_polar_annulus(rho: f64, resolution: f64) -> Result<SurfaceMesh> {
    let (s0, s1) = (rho.ln(), rho.sqrt().ln());
    let na = (2.0 * PI / resolution).ceil() as usize;
    let nr = ((s1 - s0) / resolution).ceil() as usize;
    let mut vertices = Vec::with_capacity((nr + 1) * na);
    for i in 0..=nr {
        let r = (s0 + (s1 - s0) * i as f64 / nr as f64).exp();
        // alternate rings are rotated by half a cell for better-shaped triangles
        let shift = if i % 2 == 1 { 0.5 } else { 0.0 };
        for j in 0..na {
            let th = 2.0 * PI * (j as f64 + shift) / na as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
    }
    let id = |i: usize, j: usize| i * na + j % na;
    let mut triangles = Vec::with_capacity(2 * nr * na);
    for i in 0..nr {
        for j in 0..na {
            if i % 2 == 0 {
                triangles.push([id(i, j), id(i, j + 1), id(i + 1, j)]);
                triangles.push([id(i, j + 1), id(i + 1, j + 1), id(i + 1, j)]);
            } else {
                triangles.push([id(i, j), id(i + 1, j + 1), id(i + 1, j)]);
                triangles.push([id(i, j), id(i, j + 1), id(i + 1, j + 1)]);
            }
        }
    }
    for t in triangles.iter_mut() {
        let [a, b, c] = t.map(|v| vertices[v]);
        if (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]) < 0.0 {
            t.swap(1, 2);
        }
    }
    let n = vertices.len();
    SurfaceMesh::new(vertices, triangles, Vec::new(), vec![1.0; n])
}

/// P1 Dirichlet energy of the interpolated cutoff, compared with `2π / log(1/√ρ)`.
pub fn cutoff_energy_law(rhos: &[f64], r0: f64, resolution: f64) -> Result<Vec<CutoffRow>> {
    if !(resolution > 0.0) {
        return Err(invalid(format!("resolution must be positive, got {resolution}")));
    }
    if resolution > 0.25 {
        return Err(Error::Resolution(format!("relative spacing {resolution} cannot resolve the logarithm")));
    }
    rhos.iter()
        .map(|&rho| {
            if !(rho > 0.0 && rho < 1.0 && rho.sqrt() < r0) {
                return Err(invalid(format!("need 0 < ρ < 1 and √ρ < r0, got ρ = {rho}, r0 = {r0}")));
            }
            let mesh = log_polar_annulus(rho, resolution)?;
            let a = assemble_stiffness(&mesh)?;
            let li = mesh.logical_index();
            let phi: Vec<f64> = (0..li.n_dofs())
                .map(|d| {
                    let p = mesh.vertices[li.dof_rep[d]];
                    cutoff(rho, (p[0] * p[0] + p[1] * p[1]).sqrt())
                })
                .collect();
            let ap = a.mul_vec(&phi);
            let energy: f64 = phi.iter().zip(&ap).map(|(x, y)| x * y).sum();
            let exact = 2.0 * PI / (1.0 / rho.sqrt()).ln();
            Ok(CutoffRow { rho, energy, exact, ratio: energy / exact, n_vertices: mesh.vertices.len() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_endpoints() {
        assert!(cutoff(1e-4, 1e-4).abs() < 1e-15);
        assert!((cutoff(1e-4, 1e-2) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coarse_resolution_is_refused() {
        assert!(matches!(cutoff_energy_law(&[1e-4], 1.0, 0.5), Err(Error::Resolution(_))));
    }
}
