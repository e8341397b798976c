//! Numerical experiments on degenerations, bounds and suprema.

mod bounds;
mod cutoff;
pub mod report;
mod sweep;

pub use bounds::{
    bound_check, noninvariant_comparison, random_density, touching_disks_sharpness, BoundKind, BoundReport, BoundTrial,
    ChainStep, ComparisonRecord, SLACK,
};
pub use cutoff::{cutoff, cutoff_energy_law, CutoffRow};
pub use report::{Report, Verdict};
pub use sweep::{
    disjoint_union_spectrum, eventually_decreasing, glue_sweep, interior_glue_sweep, neck_mass_diagnostic, sweep,
    NeckMassReport, SweepResult, SweepRow,
};

/// Default target edge length for experiment meshes.
pub const DEFAULT_RESOLUTION: f64 = 0.05;
