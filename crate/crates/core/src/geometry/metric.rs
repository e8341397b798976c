use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A positive density on a circle, as a function of the angle θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AngularDensity {
    Constant(f64),
    /// `scale · exp(Σ_m a_m cos(mθ) + b_m sin(mθ))`, with `m` starting at 1.
    LogFourier { scale: f64, cos: Vec<f64>, sin: Vec<f64> },
}

impl AngularDensity {
    pub fn at(&self, theta: f64) -> f64 {
        match self {
            AngularDensity::Constant(c) => *c,
            AngularDensity::LogFourier { scale, cos, sin } => {
                let mut e = 0.0;
                for (m, a) in cos.iter().enumerate() {
                    e += a * ((m + 1) as f64 * theta).cos();
                }
                for (m, b) in sin.iter().enumerate() {
                    e += b * ((m + 1) as f64 * theta).sin();
                }
                scale * e.exp()
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, AngularDensity::Constant(_))
    }

    /// Exact length of the circle `∫₀^{2π} density dθ` for constants, and a
    /// 4096-point trapezoid (spectrally accurate for trigonometric data)
    /// otherwise.
    pub fn circle_length(&self) -> f64 {
        match self {
            AngularDensity::Constant(c) => 2.0 * PI * c,
            _ => {
                let n = 4096;
                (0..n).map(|i| self.at(2.0 * PI * i as f64 / n as f64)).sum::<f64>() * 2.0 * PI / n as f64
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            AngularDensity::Constant(c) if !(*c > 0.0 && c.is_finite()) => {
                Err(invalid(format!("density must be positive, got {c}")))
            }
            AngularDensity::LogFourier { scale, .. } if !(*scale > 0.0 && scale.is_finite()) => {
                Err(invalid(format!("density scale must be positive, got {scale}")))
            }
            _ => Ok(()),
        }
    }
}

/// Where a neck is attached on a component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    /// A point on boundary circle `circle`, at angle `angle`. For the disk and
    /// the Möbius band `circle` is 0; for the cylinder 0 is `t = 0` and 1 is
    /// `t = T`.
    Boundary { circle: usize, angle: f64 },
    /// An interior point in chart coordinates: `(x, y)` on the disk, `(t, θ)`
    /// on the cylinder and Möbius chart.
    Interior { point: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub component: usize,
    pub location: Location,
}

impl Site {
    pub fn boundary(component: usize, circle: usize, angle: f64) -> Self {
        Site { component, location: Location::Boundary { circle, angle } }
    }

    pub fn interior(component: usize, point: [f64; 2]) -> Self {
        Site { component, location: Location::Interior { point } }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NeckKind {
    /// A flat square of side 2ρ glued along two opposite sides.
    BoundarySquare,
    /// A flat cylinder of circumference 2πρ and length 2ρ glued into two holes.
    InteriorCylinder,
}

/// Declarative description of a surface with metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MetricSpec {
    /// `[0,T] × S¹` with the flat metric and boundary densities on `t = 0` and `t = T`.
    FlatCylinder { height: f64, bottom: AngularDensity, top: AngularDensity },
    /// The Euclidean unit disk with an angular conformal factor.
    UnitDisk { conformal_factor: AngularDensity },
    /// `[0,T] × S¹` with `(0,θ) ~ (0,θ+π)`; one boundary circle at `t = T`.
    MobiusCylinder { height: f64, density: f64 },
    GluedFamily {
        components: Vec<MetricSpec>,
        rho: f64,
        attachments: Vec<(Site, Site)>,
        neck: NeckKind,
    },
}

impl MetricSpec {
    pub fn flat_cylinder(height: f64, density: f64) -> Self {
        MetricSpec::FlatCylinder {
            height,
            bottom: AngularDensity::Constant(density),
            top: AngularDensity::Constant(density),
        }
    }

    pub fn unit_disk() -> Self {
        MetricSpec::UnitDisk { conformal_factor: AngularDensity::Constant(1.0) }
    }

    pub fn mobius(height: f64, density: f64) -> Self {
        MetricSpec::MobiusCylinder { height, density }
    }

    /// Number of boundary circles of a single (unglued) component.
    pub fn n_boundary_circles(&self) -> usize {
        match self {
            MetricSpec::FlatCylinder { .. } => 2,
            MetricSpec::UnitDisk { .. } | MetricSpec::MobiusCylinder { .. } => 1,
            MetricSpec::GluedFamily { .. } => 0,
        }
    }

    /// Boundary density at a boundary location of a single component.
    pub fn density_at(&self, circle: usize, angle: f64) -> f64 {
        match self {
            MetricSpec::FlatCylinder { bottom, top, .. } => {
                if circle == 0 {
                    bottom.at(angle)
                } else {
                    top.at(angle)
                }
            }
            MetricSpec::UnitDisk { conformal_factor } => conformal_factor.at(angle),
            MetricSpec::MobiusCylinder { density, .. } => *density,
            MetricSpec::GluedFamily { .. } => f64::NAN,
        }
    }

    /// Continuum boundary length (before polygonal approximation).
    pub fn boundary_length(&self) -> f64 {
        match self {
            MetricSpec::FlatCylinder { bottom, top, .. } => bottom.circle_length() + top.circle_length(),
            MetricSpec::UnitDisk { conformal_factor } => conformal_factor.circle_length(),
            MetricSpec::MobiusCylinder { density, .. } => 2.0 * PI * density,
            MetricSpec::GluedFamily { components, .. } => components.iter().map(|c| c.boundary_length()).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MetricSpec::FlatCylinder { height, bottom, top } => {
                if !(*height > 0.0 && height.is_finite()) {
                    return Err(invalid(format!("cylinder height must be positive, got {height}")));
                }
                bottom.validate()?;
                top.validate()
            }
            MetricSpec::UnitDisk { conformal_factor } => conformal_factor.validate(),
            MetricSpec::MobiusCylinder { height, density } => {
                if !(*height > 0.0 && height.is_finite()) {
                    return Err(invalid(format!("Möbius height must be positive, got {height}")));
                }
                AngularDensity::Constant(*density).validate()
            }
            MetricSpec::GluedFamily { components, rho, attachments, .. } => {
                if components.is_empty() {
                    return Err(invalid("glued family without components"));
                }
                for c in components {
                    if matches!(c, MetricSpec::GluedFamily { .. }) {
                        return Err(invalid("nested glued families are not supported"));
                    }
                    c.validate()?;
                }
                if !(*rho > 0.0) {
                    return Err(invalid(format!("neck parameter must be positive, got {rho}")));
                }
                for (a, b) in attachments {
                    if a.component >= components.len() || b.component >= components.len() {
                        return Err(invalid("attachment refers to a missing component"));
                    }
                }
                Ok(())
            }
        }
    }
}
