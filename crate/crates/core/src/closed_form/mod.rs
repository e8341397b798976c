//! Exact spectra of circle-invariant metrics on the annulus and the Möbius
//! band, their transcendental constants and their suprema over the height.
//!
//! Separating variables `u = f(t) e^{inθ}` on a flat cylinder of height `T`
//! leaves one eigenvalue per Fourier mode and parity of `f`:
//!
//! | surface  | profile            | eigenvalue       |
//! |----------|--------------------|------------------|
//! | cylinder | `cosh n(t − T/2)`  | `n tanh(nT/2)`   |
//! | cylinder | `sinh n(t − T/2)`  | `n coth(nT/2)`   |
//! | cylinder | `t − T/2`          | `2/T`            |
//! | Möbius   | `cosh nt`, n even  | `n tanh(nT)`     |
//! | Möbius   | `sinh nt`, n odd   | `n coth(nT)`     |
//!
//! at unit boundary density. The Möbius band is the cylinder `[−T, T] × S¹`
//! modulo `(t, θ) ↦ (−t, θ + π)`, which keeps exactly the modes listed.

mod roots;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::metric::{AngularDensity, MetricSpec};
use crate::spectrum::{merge_spectra, Spectrum, EXACT_CLUSTER_TOL};

pub use roots::{constant_tk, constants, solve_bracketed_root, t_1_0, t_k, t_k_1, Constant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    /// The annulus `[0,T] × S¹`.
    Cylinder,
    Mobius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchType {
    /// Even profile in the height variable, a `tanh` family.
    Even,
    /// Odd profile, a `coth` family.
    Odd,
    /// The non-constant mode-zero function on the cylinder.
    ZeroLinear,
}

/// One Fourier-mode eigenvalue family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Branch {
    pub surface: SurfaceKind,
    pub mode: u32,
    pub branch_type: BranchType,
}

impl Branch {
    /// Eigenvalue at height `t`, unit boundary density.
    pub fn value(&self, t: f64) -> f64 {
        let n = self.mode as f64;
        let h = match self.surface {
            SurfaceKind::Cylinder => 0.5 * t,
            SurfaceKind::Mobius => t,
        };
        match self.branch_type {
            BranchType::Even => n * (n * h).tanh(),
            BranchType::Odd => n / (n * h).tanh(),
            BranchType::ZeroLinear => 2.0 / t,
        }
    }

    /// Value as `T → ∞`.
    pub fn limit(&self) -> f64 {
        match self.branch_type {
            BranchType::ZeroLinear => 0.0,
            _ => self.mode as f64,
        }
    }

    /// `limit() − value(t)` without cancellation; positive for increasing branches
    /// even where `value(t)` rounds to the limit.
    pub fn gap_to_limit(&self, t: f64) -> f64 {
        let n = self.mode as f64;
        let x = match self.surface {
            SurfaceKind::Cylinder => n * t,
            SurfaceKind::Mobius => 2.0 * n * t,
        };
        match self.branch_type {
            BranchType::Even => 2.0 * n / (x.exp() + 1.0),
            BranchType::Odd => -2.0 * n / x.exp_m1(),
            BranchType::ZeroLinear => -2.0 / t,
        }
    }

    pub fn multiplicity(&self) -> usize {
        if self.mode == 0 {
            1
        } else {
            2
        }
    }
}

/// All branches with mode at most `n_max`, including the constant mode.
pub fn branches(surface: SurfaceKind, n_max: u32) -> Vec<Branch> {
    let b = |mode, branch_type| Branch { surface, mode, branch_type };
    let mut out = vec![b(0, BranchType::Even)];
    match surface {
        SurfaceKind::Cylinder => {
            out.push(b(0, BranchType::ZeroLinear));
            for n in 1..=n_max {
                out.push(b(n, BranchType::Even));
                out.push(b(n, BranchType::Odd));
            }
        }
        SurfaceKind::Mobius => {
            for n in 1..=n_max {
                out.push(b(n, if n % 2 == 0 { BranchType::Even } else { BranchType::Odd }));
            }
        }
    }
    out
}

/// Boundary length at unit density.
pub fn unit_boundary_length(surface: SurfaceKind) -> f64 {
    match surface {
        SurfaceKind::Cylinder => 4.0 * PI,
        SurfaceKind::Mobius => 2.0 * PI,
    }
}

/// The `count` smallest eigenvalues at height `t` (unit density), each with
/// the branch it comes from, multiplicities expanded.
pub fn branch_values(surface: SurfaceKind, t: f64, count: usize) -> Result<Vec<(f64, Branch)>> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("height must be positive, got {t}")));
    }
    if count == 0 {
        return Err(invalid("count must be at least 1"));
    }
    let n_max = count as u32 + 8;
    let mut vals: Vec<(f64, Branch)> = branches(surface, n_max)
        .into_iter()
        .flat_map(|b| std::iter::repeat_n((b.value(t), b), b.multiplicity()))
        .collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0));
    vals.truncate(count);
    // every branch value of a larger mode is at least that of the even branch
    let next = n_max as f64 + 1.0;
    let floor = match surface {
        SurfaceKind::Cylinder => next * (0.5 * next * t).tanh(),
        SurfaceKind::Mobius => next * (next * t).tanh(),
    };
    if vals.len() < count || vals.last().unwrap().0 > floor {
        return Err(Error::Internal(format!("mode cutoff {n_max} too small at T = {t}")));
    }
    Ok(vals)
}

/// Spectrum of the flat cylinder `[0,T] × S¹` with constant boundary density `rho_b`.
pub fn cylinder_spectrum(t: f64, rho_b: f64, count: usize) -> Result<Spectrum> {
    if !(rho_b > 0.0 && rho_b.is_finite()) {
        return Err(invalid(format!("boundary density must be positive, got {rho_b}")));
    }
    let vals = branch_values(SurfaceKind::Cylinder, t, count)?;
    Ok(Spectrum::new(
        vals.iter().map(|v| v.0 / rho_b).collect(),
        4.0 * PI * rho_b,
        EXACT_CLUSTER_TOL,
    ))
}

/// Möbius band of height `T` at unit boundary density.
pub fn mobius_spectrum(t: f64, count: usize) -> Result<Spectrum> {
    weighted_mobius_spectrum(t, 1.0, count)
}

pub fn weighted_mobius_spectrum(t: f64, density: f64, count: usize) -> Result<Spectrum> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(invalid(format!("boundary density must be positive, got {density}")));
    }
    let vals = branch_values(SurfaceKind::Mobius, t, count)?;
    Ok(Spectrum::new(
        vals.iter().map(|v| v.0 / density).collect(),
        2.0 * PI * density,
        EXACT_CLUSTER_TOL,
    ))
}

/// Round unit disk with constant boundary density: `σ_k = ⌈k/2⌉ / c`.
pub fn disk_spectrum(density: f64, count: usize) -> Result<Spectrum> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(invalid(format!("boundary density must be positive, got {density}")));
    }
    Ok(Spectrum::new(
        (0..count).map(|k| k.div_ceil(2) as f64 / density).collect(),
        2.0 * PI * density,
        EXACT_CLUSTER_TOL,
    ))
}

/// Closed-form spectrum when one is known: constant-density disks, cylinders
/// with equal constant densities, Möbius bands, and the disjoint-union limit
/// of a glued family.
pub fn closed_form_spectrum(spec: &MetricSpec, count: usize) -> Result<Spectrum> {
    spec.validate()?;
    match spec {
        MetricSpec::UnitDisk { conformal_factor: AngularDensity::Constant(c) } => disk_spectrum(*c, count),
        MetricSpec::FlatCylinder { height, bottom: AngularDensity::Constant(a), top: AngularDensity::Constant(b) }
            if a == b =>
        {
            cylinder_spectrum(*height, *a, count)
        }
        MetricSpec::MobiusCylinder { height, density } => weighted_mobius_spectrum(*height, *density, count),
        MetricSpec::GluedFamily { components, .. } => {
            let parts = components
                .iter()
                .map(|c| closed_form_spectrum(c, count))
                .collect::<Result<Vec<_>>>()?;
            Ok(merge_spectra(&parts).truncated(count))
        }
        _ => Err(invalid("no closed form for this metric")),
    }
}

/// Supremum of `σ̄_k` over circle-invariant metrics of a given height.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Supremum {
    pub surface: SurfaceKind,
    pub k: usize,
    pub value: f64,
    /// Maximizing height, `None` when the supremum is only approached as `T → ∞`.
    pub maximizer: Option<f64>,
}

impl Supremum {
    pub fn achieved(&self) -> bool {
        self.maximizer.is_some()
    }
}

fn normalized_at(surface: SurfaceKind, k: usize, t: f64) -> f64 {
    let vals = branch_values(surface, t, k + 1).expect("valid height");
    vals[k].0 * unit_boundary_length(surface)
}

fn kth_branch(surface: SurfaceKind, k: usize, t: f64) -> Branch {
    branch_values(surface, t, k + 1).expect("valid height")[k].1
}

/// `sup_T σ̄_k(T)`: log grid on `[1e-3, 1e3]`, golden section around the best
/// grid point, then the branch crossing at the maximum is solved exactly.
pub fn invariant_supremum(surface: SurfaceKind, k: usize) -> Result<Supremum> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let n = 4000;
    let (lo, hi) = (1e-3f64.ln(), 1e3f64.ln());
    let grid: Vec<f64> = (0..=n).map(|i| (lo + (hi - lo) * i as f64 / n as f64).exp()).collect();
    let vals: Vec<f64> = grid.iter().map(|&t| normalized_at(surface, k, t)).collect();
    let best = (0..=n).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    if best == n {
        let mut lim: Vec<f64> = branches(surface, k as u32 + 8)
            .iter()
            .flat_map(|b| std::iter::repeat_n(b.limit(), b.multiplicity()))
            .collect();
        lim.sort_by(f64::total_cmp);
        return Ok(Supremum { surface, k, value: lim[k] * unit_boundary_length(surface), maximizer: None });
    }
    let g = |s: f64| normalized_at(surface, k, s.exp());
    let (mut a, mut b) = (grid[best.saturating_sub(1)].ln(), grid[(best + 1).min(n)].ln());
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-13 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    let t_star = (0.5 * (a + b)).exp();
    let mut best_t = t_star;
    let mut value = normalized_at(surface, k, t_star);
    // crossing polish
    let mut delta = 1e-7;
    while delta < 0.5 {
        let (tl, tr) = (t_star * (1.0 - delta), t_star * (1.0 + delta));
        let (bl, br) = (kth_branch(surface, k, tl), kth_branch(surface, k, tr));
        if bl != br {
            let h = |t: f64| bl.value(t) - br.value(t);
            if h(tl).signum() != h(tr).signum() {
                let root = solve_bracketed_root(h, tl, tr, 0.0)?;
                let v = bl.value(root).min(br.value(root)) * unit_boundary_length(surface);
                if v >= value - 1e-9 * value {
                    best_t = root;
                    value = v;
                }
                break;
            }
        }
        delta *= 4.0;
    }
    Ok(Supremum { surface, k, value, maximizer: Some(best_t) })
}

/// Intrinsic metric of the critical catenoid: `σ₁ = σ₂ = σ₃ = 1`.
pub fn critical_catenoid_metric() -> MetricSpec {
    let t10 = t_1_0();
    MetricSpec::flat_cylinder(2.0 * t10, 1.0 / t10)
}

/// Intrinsic metric of the critical Möbius band: `σ₁ = σ₂ = 1`, length `2π√3`.
pub fn critical_mobius_metric() -> MetricSpec {
    MetricSpec::mobius(t_k_1(2).expect("k = 2"), 3f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_values_increase_in_mode() {
        for surface in [SurfaceKind::Cylinder, SurfaceKind::Mobius] {
            for bt in [BranchType::Even, BranchType::Odd] {
                let v: Vec<f64> = (1..10)
                    .map(|mode| Branch { surface, mode, branch_type: bt }.value(0.7))
                    .collect();
                assert!(v.windows(2).all(|w| w[1] > w[0]));
            }
        }
    }

    #[test]
    fn gap_matches_subtraction_where_both_are_accurate() {
        for surface in [SurfaceKind::Cylinder, SurfaceKind::Mobius] {
            for b in branches(surface, 4) {
                let direct = b.limit() - b.value(0.8);
                assert!((b.gap_to_limit(0.8) - direct).abs() <= 1e-13 * direct.abs().max(1.0), "{b:?}");
            }
        }
        let b = Branch { surface: SurfaceKind::Cylinder, mode: 1, branch_type: BranchType::Even };
        assert_eq!(b.value(50.0), 1.0);
        assert!(b.gap_to_limit(50.0) > 0.0);
    }

    #[test]
    fn mobius_has_no_linear_mode() {
        let v = branch_values(SurfaceKind::Mobius, 1.0, 4).unwrap();
        assert_eq!(v[0].0, 0.0);
        assert!(v[1].0 > 0.9);
        assert!(v.iter().all(|(_, b)| b.branch_type != BranchType::ZeroLinear));
    }

    #[test]
    fn invalid_inputs() {
        assert!(cylinder_spectrum(0.0, 1.0, 3).is_err());
        assert!(cylinder_spectrum(1.0, -1.0, 3).is_err());
        assert!(invariant_supremum(SurfaceKind::Cylinder, 0).is_err());
        let odd = MetricSpec::FlatCylinder {
            height: 1.0,
            bottom: AngularDensity::Constant(1.0),
            top: AngularDensity::Constant(2.0),
        };
        assert!(closed_form_spectrum(&odd, 3).is_err());
    }
}
