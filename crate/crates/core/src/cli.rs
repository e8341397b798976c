//! Command implementations behind the `steklov` binary.
//!
//! Every command validates its whole configuration first, computes, and only
//! then writes files, so a usage error never leaves partial output behind.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::acceptance;
use crate::closed_form::{
    closed_form_spectrum, constant_tk, constants, critical_catenoid_metric, critical_mobius_metric, t_k, SurfaceKind,
};
use crate::dtn::steklov_spectrum;
use crate::error::{invalid, Error, Result};
use crate::experiments::{
    bound_check, cutoff_energy_law, eventually_decreasing, neck_mass_diagnostic, noninvariant_comparison, sweep,
    BoundKind, Report, DEFAULT_RESOLUTION,
};
use crate::geometry::{build_mesh, disk_chain_pairs, AngularDensity, MetricSpec, NeckKind, Site};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Spectrum,
    Sweep,
    Compare,
    Bounds,
    Cutoff,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surface {
    Disk,
    #[serde(alias = "annulus")]
    Cylinder,
    Mobius,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Fem,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Two unit disks joined by a boundary neck.
    TwoDisks,
    /// A chain of `k` unit disks.
    KDisks,
    /// Two unit disks joined at their centres by an interior neck.
    TwoDisksInterior,
    /// The critical catenoid joined to `k − 1` disks.
    CatenoidDisk,
    /// The critical Möbius band joined to `k − 1` disks.
    MobiusCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

macro_rules! kebab_from_str {
    ($($t:ty: $($v:literal)|+;)+) => {$(
        impl std::str::FromStr for $t {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                serde_json::from_value(serde_json::Value::String(s.to_string()))
                    .map_err(|_| format!("expected one of: {}", [$($v),+].join(", ")))
            }
        }
    )+};
}

kebab_from_str! {
    Command: "constants" | "spectrum" | "sweep" | "compare" | "bounds" | "cutoff" | "verify";
    Surface: "disk" | "cylinder" | "annulus" | "mobius";
    Method: "closed-form" | "fem" | "both";
    Preset: "two-disks" | "k-disks" | "two-disks-interior" | "catenoid-disk" | "mobius-critical";
    Format: "json" | "csv";
    BoundKind: "hps-disk" | "karpukhin-annulus";
}

/// Everything a command needs. Field names match the long command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub surface: Option<Surface>,
    /// Cylinder or Möbius height `T`.
    pub height: Option<f64>,
    pub density: f64,
    pub count: usize,
    pub method: Method,
    pub resolution: f64,
    pub rho: Vec<f64>,
    pub k: Option<usize>,
    pub preset: Option<Preset>,
    pub seed: u64,
    pub trials: usize,
    pub bound: Option<BoundKind>,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            surface: None,
            height: None,
            density: 1.0,
            count: 8,
            method: Method::ClosedForm,
            resolution: DEFAULT_RESOLUTION,
            rho: Vec::new(),
            k: None,
            preset: None,
            seed: 0,
            trials: 20,
            bound: None,
            out: PathBuf::from("out"),
            format: Format::Json,
        }
    }

    /// Parses a JSON configuration; unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| invalid(format!("bad configuration: {e}")))
    }
}

/// What a command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub pass: bool,
    pub summary: String,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Constants => cmd_constants(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Compare => cmd_compare(cfg),
        Command::Bounds => cmd_bounds(cfg),
        Command::Cutoff => cmd_cutoff(cfg),
        Command::Verify => cmd_verify(cfg),
    }
}

/// Whether an error comes from bad input rather than from a failed computation.
pub fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidParameter(_) | Error::InvalidGluing(_) | Error::Json(_))
}

/// Writes one file in the requested format.
fn emit(report: &Report, cfg: &RunConfig) -> Result<Outcome> {
    let files = write_report(report, &cfg.out, cfg.format)?;
    Ok(Outcome { files, pass: report.verdict.pass, summary: report.verdict.summary.clone() })
}

/// Experiments always write both the JSON report and the CSV of rows.
fn emit_experiment(report: &Report, cfg: &RunConfig) -> Result<Outcome> {
    let (j, c) = report.write(&cfg.out)?;
    Ok(Outcome { files: vec![j, c], pass: report.verdict.pass, summary: report.verdict.summary.clone() })
}

fn write_report(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>> {
    let stem = report.file_stem();
    let (name, body) = match format {
        Format::Json => (format!("{stem}.json"), report.to_json()?),
        Format::Csv => (format!("{stem}.csv"), report.to_csv()),
    };
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, body)?;
    Ok(vec![path])
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

pub fn cmd_constants(cfg: &RunConfig) -> Result<Outcome> {
    let k_max = cfg.k.unwrap_or(10);
    if k_max < 2 {
        return Err(invalid("--k must be at least 2"));
    }
    let k_max = u32::try_from(k_max).map_err(|_| invalid("--k too large"))?;
    let list = constants(k_max)?;
    let t1 = t_k(1)?;
    let worst = (1..=k_max).map(|k| constant_tk(k).map(|c| c.1)).collect::<Result<Vec<_>>>()?;
    let worst = worst.into_iter().fold(0.0, f64::max);
    let pass = t1 > 1.36 && worst <= 1e-10;
    let summary = format!("t_1 = {t1:.10} (> 1.36: {}), max |k t_k - t_1| = {worst:.1e}", t1 > 1.36);
    emit(&Report::new("constants", &json!({ "k_max": k_max }), &list, pass, summary)?, cfg)
}

fn surface_spec(cfg: &RunConfig) -> Result<MetricSpec> {
    let density = positive("--density", cfg.density)?;
    let surface = cfg.surface.ok_or_else(|| invalid("--surface is required"))?;
    let height = || positive("--T", cfg.height.ok_or_else(|| invalid("--T is required for this surface"))?);
    Ok(match surface {
        Surface::Disk => MetricSpec::UnitDisk { conformal_factor: AngularDensity::Constant(density) },
        Surface::Cylinder => MetricSpec::flat_cylinder(height()?, density),
        Surface::Mobius => MetricSpec::mobius(height()?, density),
    })
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    let spec = surface_spec(cfg)?;
    positive("--resolution", cfg.resolution)?;
    if cfg.count < 2 {
        return Err(invalid("--count must be at least 2"));
    }
    let exact = match cfg.method {
        Method::ClosedForm | Method::Both => Some(closed_form_spectrum(&spec, cfg.count)?),
        Method::Fem => None,
    };
    let fem = match cfg.method {
        Method::Fem | Method::Both => Some(steklov_spectrum(&build_mesh(&spec, cfg.resolution)?, cfg.count)?),
        Method::ClosedForm => None,
    };
    let params = json!({ "metric": spec, "count": cfg.count, "method": cfg.method, "resolution": cfg.resolution });
    let primary = fem.as_ref().or(exact.as_ref()).expect("one method ran");
    let rows: Vec<_> = (0..cfg.count)
        .map(|k| {
            let mut row = json!({
                "k": k,
                "sigma": primary.sigma(k),
                "sigma_bar": primary.sigma_bar(k),
                "multiplicity": primary.multiplicity(k),
            });
            if let (Some(e), Some(f)) = (&exact, &fem) {
                row["closed_form"] = json!(e.sigma(k));
                row["relative_discrepancy"] = json!(discrepancy(f.sigma(k), e.sigma(k), e));
            }
            row
        })
        .collect();
    let (pass, summary) = match (&exact, &fem) {
        (Some(e), Some(f)) => {
            let worst = (0..cfg.count).map(|k| discrepancy(f.sigma(k), e.sigma(k), e)).fold(0.0, f64::max);
            (worst <= 5e-3, format!("worst relative discrepancy {worst:.2e}"))
        }
        _ => (true, format!("σ̄_1 = {:.10}", primary.sigma_bar(1))),
    };
    let report = Report::new("spectrum", &params, &rows, pass, summary)?;
    if cfg.format == Format::Json {
        return emit(&report, cfg);
    }
    // CSV output is the plain spectrum table, one file per method.
    let stem = report.file_stem();
    let mut files = Vec::new();
    let mut out = Vec::new();
    if let Some(e) = &exact {
        out.push((format!("{stem}-closed-form.csv"), e.to_csv()));
    }
    if let Some(f) = &fem {
        out.push((format!("{stem}-fem.csv"), f.to_csv()));
    }
    if fem.is_some() && exact.is_some() {
        out.push((format!("{stem}.csv"), report.to_csv()));
    }
    fs::create_dir_all(&cfg.out)?;
    for (name, body) in out {
        let p = cfg.out.join(name);
        fs::write(&p, body)?;
        files.push(p);
    }
    Ok(Outcome { files, pass, summary: report.verdict.summary })
}

/// Relative discrepancy with `σ_1` as the floor, so the zero eigenvalue is measured absolutely.
fn discrepancy(fem: f64, exact: f64, spectrum: &Spectrum) -> f64 {
    (fem - exact).abs() / exact.abs().max(spectrum.sigma(1))
}

struct Family {
    components: Vec<MetricSpec>,
    attachments: Vec<(Site, Site)>,
    neck: NeckKind,
    k: usize,
    rhos: Vec<f64>,
}

fn disks_to(components: &mut Vec<MetricSpec>, attachments: &mut Vec<(Site, Site)>, start: usize, n: usize) {
    for i in 0..n {
        components.push(MetricSpec::unit_disk());
        attachments.push((Site::boundary(start + i, 0, PI), Site::boundary(start + i + 1, 0, 0.0)));
    }
}

fn family(cfg: &RunConfig) -> Result<Family> {
    let preset = cfg.preset.ok_or_else(|| invalid("--preset is required"))?;
    let boundary_rhos = vec![0.2, 0.1, 0.05, 0.025];
    let f = match preset {
        Preset::TwoDisks => Family {
            components: vec![MetricSpec::unit_disk(); 2],
            attachments: disk_chain_pairs(2),
            neck: NeckKind::BoundarySquare,
            k: cfg.k.unwrap_or(2),
            rhos: boundary_rhos,
        },
        Preset::KDisks => {
            let k = cfg.k.unwrap_or(3);
            if k < 2 {
                return Err(invalid("k-disks needs --k ≥ 2"));
            }
            Family {
                components: vec![MetricSpec::unit_disk(); k],
                attachments: disk_chain_pairs(k),
                neck: NeckKind::BoundarySquare,
                k,
                rhos: vec![0.1, 0.05, 0.025],
            }
        }
        Preset::TwoDisksInterior => Family {
            components: vec![MetricSpec::unit_disk(); 2],
            attachments: vec![(Site::interior(0, [0.0, 0.0]), Site::interior(1, [0.0, 0.0]))],
            neck: NeckKind::InteriorCylinder,
            k: cfg.k.unwrap_or(3),
            rhos: acceptance::INTERIOR_RHOS.to_vec(),
        },
        Preset::CatenoidDisk | Preset::MobiusCritical => {
            let k = cfg.k.unwrap_or(2);
            if k < 2 {
                return Err(invalid("this preset needs --k ≥ 2"));
            }
            let (critical, site) = if preset == Preset::CatenoidDisk {
                (critical_catenoid_metric(), Site::boundary(0, 1, PI))
            } else {
                (critical_mobius_metric(), Site::boundary(0, 0, PI))
            };
            let mut components = vec![critical];
            let mut attachments = Vec::new();
            disks_to(&mut components, &mut attachments, 0, k - 1);
            attachments[0].0 = site;
            Family { components, attachments, neck: NeckKind::BoundarySquare, k, rhos: boundary_rhos }
        }
    };
    Ok(Family { rhos: if cfg.rho.is_empty() { f.rhos } else { cfg.rho.clone() }, ..f })
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    let f = family(cfg)?;
    positive("--resolution", cfg.resolution)?;
    for &r in &f.rhos {
        positive("--rho", r)?;
    }
    let s = sweep(&f.components, &f.attachments, f.neck, f.k, &f.rhos, cfg.resolution)?;
    let k = f.k;
    let diag = neck_mass_diagnostic(&s, k).ok();
    let rows: Vec<_> = s
        .rows
        .iter()
        .map(|r| {
            json!({
                "rho": r.rho,
                "boundary_length": r.boundary_length,
                "n_vertices": r.n_vertices,
                "sigma_bar_k": r.spectrum.as_ref().map(|sp| sp.sigma_bar(k)),
                "target_sigma_bar_k": s.target.sigma_bar(k),
                "normalized_error": r.normalized_error,
                "length_error": r.length_error,
                "max_error": r.errors.iter().copied().fold(0.0, f64::max),
                "eigenvalues": r.eigenvalues,
                "neck_fractions": r.neck_fractions,
                "failure": r.failure,
            })
        })
        .collect();
    let failures = s.rows.iter().filter(|r| r.failure.is_some()).count();
    let (pass, summary) = match (s.neck, s.last()) {
        (_, None) => (false, "no neck radius could be solved".to_string()),
        (NeckKind::BoundarySquare, Some(last)) => {
            let errs: Vec<f64> = s.solved().map(|r| r.normalized_error).collect();
            let dec = eventually_decreasing(&errs);
            (
                failures == 0 && dec && last.normalized_error <= 0.05,
                format!(
                    "σ̄_{k} error at ρ = {:e}: {:.3e}, eventually decreasing: {dec}, neck fractions decreasing: {:?}",
                    last.rho,
                    last.normalized_error,
                    diag.map(|d| d.decreasing)
                ),
            )
        }
        (NeckKind::InteriorCylinder, Some(last)) => {
            let worst = last.errors.iter().copied().fold(0.0, f64::max);
            (failures == 0 && worst <= 0.05, format!("worst σ_j error at ρ = {:e}: {worst:.3e}", last.rho))
        }
    };
    let params = json!({
        "preset": cfg.preset,
        "k": k,
        "rhos": f.rhos,
        "resolution": cfg.resolution,
        "components": f.components,
        "attachments": f.attachments,
        "neck": f.neck,
    });
    emit_experiment(&Report::new("sweep", &params, &rows, pass, summary)?, cfg)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<Outcome> {
    let surface = match cfg.surface {
        Some(Surface::Cylinder) => SurfaceKind::Cylinder,
        Some(Surface::Mobius) => SurfaceKind::Mobius,
        _ => return Err(invalid("--surface must be annulus (cylinder) or mobius")),
    };
    let ks: Vec<usize> = match cfg.k {
        Some(k) if k < 2 => return Err(invalid("--k must be at least 2")),
        Some(k) => vec![k],
        None => (2..=10).collect(),
    };
    let records = ks.iter().map(|&k| noninvariant_comparison(surface, k)).collect::<Result<Vec<_>>>()?;
    let pass = records.iter().all(|r| r.verdict);
    let min = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let params = json!({ "surface": surface, "k": ks });
    emit_experiment(&Report::new("compare", &params, &records, pass, format!("smallest margin {min:.6}"))?, cfg)
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Outcome> {
    let kind = cfg.bound.unwrap_or(BoundKind::HpsDisk);
    let k_max = cfg.k.unwrap_or(5);
    positive("--resolution", cfg.resolution)?;
    if cfg.trials == 0 || k_max == 0 {
        return Err(invalid("--trials and --k must be positive"));
    }
    let r = bound_check(kind, cfg.trials, cfg.seed, k_max, cfg.resolution)?;
    let summary = format!("{} violations, worst ratios {:.4?}", r.violations, r.worst);
    let params = json!({ "bound": kind, "trials": cfg.trials, "seed": cfg.seed, "k_max": k_max, "resolution": cfg.resolution });
    emit_experiment(&Report::new("bounds", &params, &r.trials, r.passed(), summary)?, cfg)
}

pub fn cmd_cutoff(cfg: &RunConfig) -> Result<Outcome> {
    let rhos = if cfg.rho.is_empty() { vec![1e-4, 1e-5, 1e-6] } else { cfg.rho.clone() };
    let rows = cutoff_energy_law(&rhos, 1.0, cfg.resolution)?;
    let pass = rows.iter().all(|r| (r.ratio - 1.0).abs() <= 0.02);
    let worst = rows.iter().map(|r| (r.ratio - 1.0).abs()).fold(0.0, f64::max);
    let params = json!({ "rhos": rhos, "resolution": cfg.resolution });
    emit_experiment(&Report::new("cutoff", &params, &rows, pass, format!("worst |ratio - 1| = {worst:.2e}"))?, cfg)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let outcomes = acceptance::run_all();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let pass = passed == outcomes.len();
    let summary = format!("{passed}/{} criteria pass", outcomes.len());
    // timings vary between runs and are left out of the report
    let rows: Vec<_> =
        outcomes.iter().map(|o| json!({ "id": o.id, "name": o.name, "pass": o.pass, "detail": o.detail })).collect();
    emit_experiment(&Report::new("verify", &json!({}), &rows, pass, summary)?, cfg)
}
