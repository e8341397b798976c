//! Neck-parameter sweeps of glued families toward their disjoint-union limits.

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::closed_form_spectrum;
use crate::dtn::DtnProblem;
use crate::error::{invalid, Result};
use crate::geometry::glue::{glue_boundary, glue_interior, GluedMesh, GluingConfig};
use crate::geometry::metric::{MetricSpec, NeckKind, Site};
use crate::geometry::{boundary_length, build_mesh};
use crate::spectrum::{merge_spectra, Spectrum};

/// Errors below this count as converged when judging monotonicity.
const CONVERGED: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub boundary_length: f64,
    pub n_vertices: usize,
    #[serde(skip)]
    pub spectrum: Option<Spectrum>,
    pub eigenvalues: Vec<f64>,
    /// `|σ_j − σ_j^∞| / max(|σ_j^∞|, s)` for `j ≤ k`, where `s` is the
    /// smallest positive target eigenvalue.
    pub errors: Vec<f64>,
    /// `|σ̄_k − σ̄_k^∞| / σ̄_k^∞`.
    pub normalized_error: f64,
    /// `|L − L^∞| / L^∞`.
    pub length_error: f64,
    /// Share of the boundary `L²` mass of eigenfunction `j ≤ k` carried by neck boundary.
    pub neck_fractions: Vec<f64>,
    #[serde(skip)]
    pub neck_mass: Vec<f64>,
    #[serde(skip)]
    pub boundary_mass: Vec<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub description: String,
    pub neck: NeckKind,
    pub k: usize,
    pub rhos: Vec<f64>,
    pub resolution: f64,
    pub target: Spectrum,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows that produced a spectrum.
    pub fn solved(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.failure.is_none())
    }

    pub fn last(&self) -> Option<&SweepRow> {
        self.rows.last().filter(|r| r.failure.is_none())
    }
}

/// Whether the last three values (or all, if fewer) strictly decrease.
pub fn eventually_decreasing(errors: &[f64]) -> bool {
    if errors.is_empty() {
        return false;
    }
    let tail = &errors[errors.len().saturating_sub(3)..];
    tail.windows(2).all(|w| w[1] < w[0] || w[1] < CONVERGED)
}

fn component_spectrum(spec: &MetricSpec, count: usize, resolution: f64) -> Result<Spectrum> {
    match closed_form_spectrum(spec, count) {
        Ok(s) => Ok(s),
        Err(_) => Ok(DtnProblem::new(&build_mesh(spec, resolution)?)?.spectrum(count)?.truncated(count)),
    }
}

/// Spectrum of the disjoint union of `components`.
pub fn disjoint_union_spectrum(components: &[MetricSpec], count: usize, resolution: f64) -> Result<Spectrum> {
    let parts = components
        .iter()
        .map(|c| component_spectrum(c, count, resolution))
        .collect::<Result<Vec<_>>>()?;
    let mut s = merge_spectra(&parts).truncated(count);
    s.eigenvectors = None;
    Ok(s)
}

fn neck_mass(g: &GluedMesh, p: &DtnProblem) -> Vec<f64> {
    let li = g.mesh.logical_index();
    let mut by_dof = vec![0.0; li.n_dofs()];
    for (e, len) in g.mesh.boundary_edge_lengths() {
        if g.is_neck_triangle(e.triangle) {
            by_dof[li.dof[e.raw[0]]] += 0.5 * len;
            by_dof[li.dof[e.raw[1]]] += 0.5 * len;
        }
    }
    p.boundary.iter().map(|&d| by_dof[d]).collect()
}

fn fractions(sp: &Spectrum, mass: &[f64], neck: &[f64], k: usize) -> Vec<f64> {
    let vecs = sp.eigenvectors.as_ref().expect("solver returns traces");
    vecs.iter()
        .take(k + 1)
        .map(|u| {
            let total: f64 = u.iter().zip(mass).map(|(x, m)| m * x * x).sum();
            let on_neck: f64 = u.iter().zip(neck).map(|(x, m)| m * x * x).sum();
            (on_neck / total).clamp(0.0, 1.0)
        })
        .collect()
}

fn run_row(
    components: &[MetricSpec],
    attachments: &[(Site, Site)],
    neck: NeckKind,
    k: usize,
    rho: f64,
    resolution: f64,
    target: &Spectrum,
) -> Result<SweepRow> {
    let config = GluingConfig::new(attachments.to_vec(), rho, resolution);
    let g = match neck {
        NeckKind::BoundarySquare => glue_boundary(components, &config)?,
        NeckKind::InteriorCylinder => glue_interior(components, &config)?,
    };
    let p = DtnProblem::new(&g.mesh)?;
    let sp = p.spectrum(k + 1)?;
    let neck_mass = neck_mass(&g, &p);
    let scale = target.eigenvalues.iter().copied().filter(|&s| s > 1e-12).fold(f64::INFINITY, f64::min);
    let scale = if scale.is_finite() { scale } else { 1.0 };
    let errors = (0..=k)
        .map(|j| (sp.sigma(j) - target.sigma(j)).abs() / target.sigma(j).abs().max(scale))
        .collect();
    let l = boundary_length(&g.mesh);
    let nt = target.sigma_bar(k);
    Ok(SweepRow {
        rho,
        boundary_length: l,
        n_vertices: g.mesh.vertices.len(),
        eigenvalues: sp.eigenvalues.clone(),
        errors,
        normalized_error: if nt > 0.0 { (sp.sigma_bar(k) - nt).abs() / nt } else { sp.sigma_bar(k).abs() },
        length_error: (l - target.boundary_length).abs() / target.boundary_length,
        neck_fractions: fractions(&sp, &p.mass, &neck_mass, k),
        neck_mass,
        boundary_mass: p.mass.clone(),
        spectrum: Some(sp),
        failure: None,
    })
}

/// Builds the ρ-family for each `rho` (strictly decreasing), solves it and
/// compares with the disjoint-union spectrum of the components. Failures at
/// individual ρ are recorded in the row.
pub fn sweep(
    components: &[MetricSpec],
    attachments: &[(Site, Site)],
    neck: NeckKind,
    k: usize,
    rhos: &[f64],
    resolution: f64,
) -> Result<SweepResult> {
    if components.is_empty() {
        return Err(invalid("sweep needs at least one component"));
    }
    if rhos.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("ρ list must be strictly decreasing"));
    }
    for c in components {
        c.validate()?;
    }
    let target = disjoint_union_spectrum(components, k + 1, resolution)?;
    let rows = rhos
        .par_iter()
        .map(|&rho| {
            run_row(components, attachments, neck, k, rho, resolution, &target).unwrap_or_else(|e| SweepRow {
                rho,
                boundary_length: f64::NAN,
                n_vertices: 0,
                spectrum: None,
                eigenvalues: Vec::new(),
                errors: Vec::new(),
                normalized_error: f64::NAN,
                length_error: f64::NAN,
                neck_fractions: Vec::new(),
                neck_mass: Vec::new(),
                boundary_mass: Vec::new(),
                failure: Some(e.to_string()),
            })
        })
        .collect();
    let description = format!("{} components, {} necks", components.len(), attachments.len());
    Ok(SweepResult { description, neck, k, rhos: rhos.to_vec(), resolution, target, rows })
}

/// Boundary-neck sweep.
pub fn glue_sweep(
    components: &[MetricSpec],
    attachments: &[(Site, Site)],
    k: usize,
    rhos: &[f64],
    resolution: f64,
) -> Result<SweepResult> {
    sweep(components, attachments, NeckKind::BoundarySquare, k, rhos, resolution)
}

/// Interior-neck sweep.
pub fn interior_glue_sweep(
    components: &[MetricSpec],
    attachments: &[(Site, Site)],
    k: usize,
    rhos: &[f64],
    resolution: f64,
) -> Result<SweepResult> {
    sweep(components, attachments, NeckKind::InteriorCylinder, k, rhos, resolution)
}

/// Neck boundary-mass fractions for `j ≤ k`, one list per ρ, and whether each
/// `j` decreases along the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct NeckMassReport {
    pub rhos: Vec<f64>,
    pub fractions: Vec<Vec<f64>>,
    pub decreasing: Vec<bool>,
}

pub fn neck_mass_diagnostic(sweep: &SweepResult, k: usize) -> Result<NeckMassReport> {
    let mut rhos = Vec::new();
    let mut fr = Vec::new();
    for row in sweep.solved() {
        let sp = row.spectrum.as_ref().ok_or_else(|| invalid("sweep row without spectrum"))?;
        if sp.eigenvectors.is_none() {
            return Err(invalid("sweep carries no eigenvectors"));
        }
        if k >= sp.len() {
            return Err(invalid(format!("sweep has only {} eigenfunctions", sp.len())));
        }
        fr.push(fractions(sp, &row.boundary_mass, &row.neck_mass, k));
        rhos.push(row.rho);
    }
    let decreasing = (0..=k)
        .map(|j| fr.windows(2).all(|w| w[1][j] <= w[0][j]))
        .collect();
    Ok(NeckMassReport { rhos, fractions: fr, decreasing })
}
