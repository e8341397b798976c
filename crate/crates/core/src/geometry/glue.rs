//! Gluing constructions: boundary necks (a flat square of side 2ρ) and
//! interior necks (a flat cylinder of circumference 2πρ).
//!
//! Components are meshed in their own charts and stitched together through
//! vertex identifications. Attachment arcs and hole polygons are generated
//! with exactly the nodes of the neck sides they are glued to.

use std::f64::consts::PI;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::builders::{
    cylinder_chart, disk_chart, mobius_chart, unify_conformal_factor, ArcRequest, Chart, HoleRequest, ARC_SEGMENTS,
};
use crate::geometry::mesh::SurfaceMesh;
use crate::geometry::metric::{Location, MetricSpec, NeckKind, Site};

/// Nodes around each interior neck.
pub const HOLE_NODES: usize = 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GluingConfig {
    pub pairs: Vec<(Site, Site)>,
    /// Neck half-width.
    pub rho: f64,
    /// Radius of the flattened region around each attachment point.
    pub flatten_radius: f64,
    /// Target mesh size away from the necks.
    pub resolution: f64,
}

impl GluingConfig {
    /// Uses `flatten_radius = √ρ`.
    pub fn new(pairs: Vec<(Site, Site)>, rho: f64, resolution: f64) -> Self {
        GluingConfig { pairs, rho, flatten_radius: rho.sqrt(), resolution }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(invalid(format!("neck parameter must be positive, got {}", self.rho)));
        }
        if !(self.flatten_radius > self.rho) {
            return Err(Error::InvalidGluing(format!(
                "flatten radius {} must exceed ρ = {}",
                self.flatten_radius, self.rho
            )));
        }
        Ok(())
    }
}

/// A glued surface and the raw triangle ranges that make up its necks.
#[derive(Debug, Clone)]
pub struct GluedMesh {
    pub mesh: SurfaceMesh,
    pub neck_triangles: Vec<Range<usize>>,
}

impl GluedMesh {
    pub fn is_neck_triangle(&self, t: usize) -> bool {
        self.neck_triangles.iter().any(|r| r.contains(&t))
    }
}

struct Assembly {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    identifications: Vec<(usize, usize)>,
    lambda: Vec<f64>,
}

impl Assembly {
    fn new() -> Self {
        Assembly { vertices: Vec::new(), triangles: Vec::new(), identifications: Vec::new(), lambda: Vec::new() }
    }

    /// Appends a mesh and returns its vertex offset.
    fn push(&mut self, m: &SurfaceMesh) -> usize {
        let off = self.vertices.len();
        self.vertices.extend_from_slice(&m.vertices);
        self.triangles.extend(m.triangles.iter().map(|t| t.map(|v| v + off)));
        self.identifications.extend(m.identifications.iter().map(|&(a, b)| (a + off, b + off)));
        self.lambda.extend_from_slice(&m.conformal_factor);
        off
    }

    fn finish(self) -> Result<SurfaceMesh> {
        let mut m = SurfaceMesh {
            vertices: self.vertices,
            triangles: self.triangles,
            identifications: self.identifications,
            boundary_loops: Vec::new(),
            conformal_factor: self.lambda,
        };
        unify_conformal_factor(&mut m);
        SurfaceMesh::new(m.vertices, m.triangles, m.identifications, m.conformal_factor)
    }
}

/// Structured grid on `[0, lx] × [y0, y0 + ly]` with `nx × ny` cells; vertex
/// `(i, j)` has index `i * (ny + 1) + j`.
fn grid(lx: f64, y0: f64, ly: f64, nx: usize, ny: usize) -> (Vec<[f64; 2]>, Vec<[usize; 3]>) {
    let mut v = Vec::with_capacity((nx + 1) * (ny + 1));
    for i in 0..=nx {
        for j in 0..=ny {
            v.push([lx * i as f64 / nx as f64, y0 + ly * j as f64 / ny as f64]);
        }
    }
    let id = |i: usize, j: usize| i * (ny + 1) + j;
    let mut t = Vec::with_capacity(2 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                t.push([a, b, c]);
                t.push([a, c, d]);
            } else {
                t.push([a, b, d]);
                t.push([b, c, d]);
            }
        }
    }
    (v, t)
}

fn chart_for(spec: &MetricSpec, h: f64, arcs: &[ArcRequest], holes: &[HoleRequest]) -> Result<Chart> {
    match spec {
        MetricSpec::UnitDisk { conformal_factor } => disk_chart(conformal_factor, h, arcs, holes),
        MetricSpec::FlatCylinder { height, bottom, top } => cylinder_chart(*height, bottom, top, h, arcs, holes),
        MetricSpec::MobiusCylinder { height, density } => mobius_chart(*height, *density, h, arcs, holes),
        MetricSpec::GluedFamily { .. } => Err(invalid("cannot glue a glued family")),
    }
}

fn boundary_clearance(spec: &MetricSpec, sites: &[(usize, f64)], circle: usize) -> f64 {
    // smallest physical distance along the boundary circle between attachment
    // points, or to the chart seam at θ = 0 for strip charts
    let on: Vec<f64> = sites
        .iter()
        .filter(|(c, _)| *c == circle)
        .map(|(_, a)| a.rem_euclid(2.0 * PI))
        .collect();
    let density = |th: f64| spec.density_at(circle, th);
    let mut best = f64::INFINITY;
    for i in 0..on.len() {
        for j in 0..i {
            let d = (on[i] - on[j]).abs();
            let d = d.min(2.0 * PI - d);
            best = best.min(d * density(on[i]).min(density(on[j])));
        }
        if !matches!(spec, MetricSpec::UnitDisk { .. }) {
            let d = on[i].min(2.0 * PI - on[i]);
            best = best.min(d * density(on[i]));
        }
    }
    best
}

/// Glues components along boundary arcs through square necks.
pub fn glue_boundary(components: &[MetricSpec], config: &GluingConfig) -> Result<GluedMesh> {
    config.validate()?;
    let rho = config.rho;
    let mut per_component: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); components.len()];
    for (p, pair) in config.pairs.iter().enumerate() {
        for (side, site) in [pair.0, pair.1].iter().enumerate() {
            let Location::Boundary { circle, angle } = site.location else {
                return Err(Error::InvalidGluing("boundary neck requires boundary sites".into()));
            };
            let spec = components
                .get(site.component)
                .ok_or_else(|| invalid(format!("no component {}", site.component)))?;
            spec.validate()?;
            if circle >= spec.n_boundary_circles() {
                return Err(Error::InvalidGluing(format!("component {} has no circle {circle}", site.component)));
            }
            per_component[site.component].push((2 * p + side, circle, angle));
        }
    }

    let mut asm = Assembly::new();
    // raw arc node indices for attachment slot 2p + side
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); 2 * config.pairs.len()];
    for (ci, spec) in components.iter().enumerate() {
        let sites = &per_component[ci];
        let scale = match sites.first() {
            Some(&(_, c, a)) => spec.density_at(c, a),
            None => 1.0,
        };
        for &(_, c, a) in sites {
            let d = spec.density_at(c, a);
            if (d - scale).abs() > 1e-9 * scale {
                return Err(Error::InvalidGluing(format!(
                    "attachment points of component {ci} carry different boundary densities ({scale} vs {d})"
                )));
            }
        }
        let clearance = boundary_clearance(
            spec,
            &sites.iter().map(|&(_, c, a)| (c, a)).collect::<Vec<_>>(),
            0,
        )
        .min(boundary_clearance(spec, &sites.iter().map(|&(_, c, a)| (c, a)).collect::<Vec<_>>(), 1));
        if !sites.is_empty() && !(rho < clearance / 4.0) {
            return Err(Error::InvalidGluing(format!(
                "ρ = {rho} is not below a quarter of the attachment clearance {clearance}"
            )));
        }
        let arcs: Vec<ArcRequest> = sites
            .iter()
            .map(|&(_, circle, angle)| ArcRequest {
                circle,
                angle: angle.rem_euclid(2.0 * PI),
                half_width: rho / scale,
                flatten: config.flatten_radius / scale,
            })
            .collect();
        let chart = chart_for(spec, config.resolution / scale, &arcs, &[])?;
        let mut m = chart.mesh;
        // rescale the chart so that λ = 1 at the attachment points
        for p in m.vertices.iter_mut() {
            p[0] *= scale;
            p[1] *= scale;
        }
        for l in m.conformal_factor.iter_mut() {
            *l /= scale;
        }
        let off = asm.push(&m);
        for (k, &(slot, _, _)) in sites.iter().enumerate() {
            slots[slot] = chart.arcs[k].iter().map(|&v| v + off).collect();
        }
    }

    let mut necks = Vec::new();
    let n = ARC_SEGMENTS;
    for p in 0..config.pairs.len() {
        let (v, t) = grid(2.0 * rho, -rho, 2.0 * rho, n, n);
        let neck = SurfaceMesh {
            conformal_factor: vec![1.0; v.len()],
            vertices: v,
            triangles: t,
            identifications: Vec::new(),
            boundary_loops: Vec::new(),
        };
        let t0 = asm.triangles.len();
        let off = asm.push(&neck);
        necks.push(t0..asm.triangles.len());
        let (a, b) = (&slots[2 * p], &slots[2 * p + 1]);
        if a.len() != n + 1 || b.len() != n + 1 {
            return Err(Error::Internal("attachment arc discretisation does not match the neck".into()));
        }
        for j in 0..=n {
            // side x = 0 upward against the first arc, side x = 2ρ downward against the second
            asm.identifications.push((a[j], off + j));
            asm.identifications.push((b[j], off + n * (n + 1) + (n - j)));
        }
    }
    let mesh = asm.finish()?;
    Ok(GluedMesh { mesh, neck_triangles: necks })
}

/// Glues components through thin cylinders inserted into small holes around
/// interior points. The boundary is left untouched.
pub fn glue_interior(components: &[MetricSpec], config: &GluingConfig) -> Result<GluedMesh> {
    config.validate()?;
    let rho = config.rho;
    let mut per_component: Vec<Vec<(usize, [f64; 2])>> = vec![Vec::new(); components.len()];
    for (p, pair) in config.pairs.iter().enumerate() {
        for (side, site) in [pair.0, pair.1].iter().enumerate() {
            let Location::Interior { point } = site.location else {
                return Err(Error::InvalidGluing("interior neck requires interior sites".into()));
            };
            let spec = components
                .get(site.component)
                .ok_or_else(|| invalid(format!("no component {}", site.component)))?;
            spec.validate()?;
            let clearance = match spec {
                MetricSpec::UnitDisk { .. } => 1.0 - (point[0].powi(2) + point[1].powi(2)).sqrt(),
                MetricSpec::FlatCylinder { height, .. } | MetricSpec::MobiusCylinder { height, .. } => {
                    point[0].min(height - point[0]).min(point[1]).min(2.0 * PI - point[1])
                }
                MetricSpec::GluedFamily { .. } => 0.0,
            };
            if !(2.0 * rho < clearance) {
                return Err(Error::InvalidGluing(format!(
                    "neck of radius {rho} at {point:?} touches the boundary (clearance {clearance})"
                )));
            }
            per_component[site.component].push((2 * p + side, point));
        }
    }
    for sites in &per_component {
        for i in 0..sites.len() {
            for j in 0..i {
                let (a, b) = (sites[i].1, sites[j].1);
                if ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt() <= 4.0 * rho {
                    return Err(Error::InvalidGluing("interior attachment points too close".into()));
                }
            }
        }
    }

    let mut asm = Assembly::new();
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); 2 * config.pairs.len()];
    for (ci, spec) in components.iter().enumerate() {
        let holes: Vec<HoleRequest> = per_component[ci]
            .iter()
            .map(|&(_, center)| HoleRequest { center, radius: rho, nodes: HOLE_NODES })
            .collect();
        let chart = chart_for(spec, config.resolution, &[], &holes)?;
        let off = asm.push(&chart.mesh);
        for (k, &(slot, _)) in per_component[ci].iter().enumerate() {
            slots[slot] = chart.holes[k].iter().map(|&v| v + off).collect();
        }
    }

    let m = HOLE_NODES;
    let length = 2.0 * rho;
    let nx = ((length / (2.0 * PI * rho / m as f64)).ceil() as usize).max(1);
    let mut necks = Vec::new();
    for p in 0..config.pairs.len() {
        let (v, t) = grid(length, 0.0, 2.0 * PI * rho, nx, m);
        let neck = SurfaceMesh {
            conformal_factor: vec![1.0; v.len()],
            vertices: v,
            triangles: t,
            identifications: Vec::new(),
            boundary_loops: Vec::new(),
        };
        let t0 = asm.triangles.len();
        let off = asm.push(&neck);
        necks.push(t0..asm.triangles.len());
        let id = |i: usize, j: usize| off + i * (m + 1) + j;
        for i in 0..=nx {
            asm.identifications.push((id(i, 0), id(i, m)));
        }
        let (a, b) = (&slots[2 * p], &slots[2 * p + 1]);
        for j in 0..m {
            asm.identifications.push((a[j], id(0, j)));
            asm.identifications.push((b[j], id(nx, (m - j) % m)));
        }
    }
    let mesh = asm.finish()?;
    Ok(GluedMesh { mesh, neck_triangles: necks })
}

/// Meshes a [`MetricSpec::GluedFamily`].
pub fn mesh_glued_family(spec: &MetricSpec, resolution: f64) -> Result<GluedMesh> {
    spec.validate()?;
    let MetricSpec::GluedFamily { components, rho, attachments, neck } = spec else {
        return Err(invalid("not a glued family"));
    };
    let config = GluingConfig::new(attachments.clone(), *rho, resolution);
    match neck {
        NeckKind::BoundarySquare => glue_boundary(components, &config),
        NeckKind::InteriorCylinder => glue_interior(components, &config),
    }
}

/// `k` unit disks in a chain, consecutive disks joined at antipodal boundary points.
pub fn disk_chain_pairs(k: usize) -> Vec<(Site, Site)> {
    (1..k).map(|i| (Site::boundary(i - 1, 0, 0.0), Site::boundary(i, 0, PI))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::{boundary_length, validate_mesh};

    #[test]
    fn two_disks_glue_to_one_loop() {
        let comps = vec![MetricSpec::unit_disk(), MetricSpec::unit_disk()];
        let g = glue_boundary(&comps, &GluingConfig::new(disk_chain_pairs(2), 0.1, 0.1)).unwrap();
        let r = validate_mesh(&g.mesh);
        assert!(r.is_clean(), "{r:?}");
        assert_eq!(g.mesh.boundary_loops.len(), 1);
        assert_eq!(g.mesh.n_components(), 1);
        assert_eq!(g.mesh.euler_characteristic(), 1);
        let l = boundary_length(&g.mesh);
        assert!((l / (4.0 * PI) - 1.0).abs() < 0.01, "{l}");
    }

    #[test]
    fn interior_glue_keeps_boundary() {
        let comps = vec![MetricSpec::unit_disk(), MetricSpec::unit_disk()];
        let pairs = vec![(Site::interior(0, [0.0, 0.0]), Site::interior(1, [0.0, 0.0]))];
        let g = glue_interior(&comps, &GluingConfig::new(pairs, 0.05, 0.1)).unwrap();
        assert!(validate_mesh(&g.mesh).is_clean());
        assert_eq!(g.mesh.boundary_loops.len(), 2);
        assert_eq!(g.mesh.n_components(), 1);
        // two disks minus two holes plus a tube: an annulus
        assert_eq!(g.mesh.euler_characteristic(), 0);
    }

    #[test]
    fn oversized_interior_neck_is_rejected() {
        let comps = vec![MetricSpec::unit_disk(), MetricSpec::unit_disk()];
        let pairs = vec![(Site::interior(0, [0.0, 0.0]), Site::interior(1, [0.0, 0.0]))];
        let err = glue_interior(&comps, &GluingConfig::new(pairs, 0.6, 0.1)).unwrap_err();
        assert!(matches!(err, Error::InvalidGluing(_)));
    }

    #[test]
    fn overlapping_arcs_are_rejected() {
        let comps = vec![MetricSpec::unit_disk(), MetricSpec::unit_disk()];
        let pairs = vec![
            (Site::boundary(0, 0, 0.0), Site::boundary(1, 0, 0.0)),
            (Site::boundary(0, 0, 0.1), Site::boundary(1, 0, PI)),
        ];
        let err = glue_boundary(&comps, &GluingConfig::new(pairs, 0.05, 0.1)).unwrap_err();
        assert!(matches!(err, Error::InvalidGluing(_)));
    }
}
