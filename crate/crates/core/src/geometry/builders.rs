//! Chart meshes for the model surfaces.
//!
//! Every builder accepts optional attachment requests so that the gluing code
//! can ask for boundary arcs with prescribed, uniformly spaced nodes and for
//! interior holes with a prescribed number of nodes.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::geometry::mesh::SurfaceMesh;
use crate::geometry::mesher::{area_for_edge, distribute, graded_size, triangulate};
use crate::geometry::metric::{AngularDensity, MetricSpec};

/// Segments on every attachment arc.
pub const ARC_SEGMENTS: usize = 16;
/// Growth of the boundary spacing away from an attachment arc.
const GRADE: f64 = 0.25;

/// A boundary arc request in chart units.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArcRequest {
    pub circle: usize,
    pub angle: f64,
    /// Chart half-length of the glued arc.
    pub half_width: f64,
    /// Chart half-length of the flattened boundary piece around it.
    pub flatten: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct HoleRequest {
    pub center: [f64; 2],
    pub radius: f64,
    pub nodes: usize,
}

/// A chart mesh together with the raw vertex indices of its requested arcs
/// (in boundary-loop direction) and holes (clockwise around the hole centre).
#[derive(Debug, Clone)]
pub(crate) struct Chart {
    pub mesh: SurfaceMesh,
    pub arcs: Vec<Vec<usize>>,
    pub holes: Vec<Vec<usize>>,
}

fn check_resolution(h: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return Err(invalid(format!("resolution must lie in (0, 1), got {h}")));
    }
    Ok(())
}

/// Nodes on a closed curve of length `total`, with parameter 0 always a node.
/// `zones` are `(centre, half_width)` pairs in curve parameter; `fixed` are
/// extra parameters that must be nodes. Returns the sorted node parameters and,
/// for each zone, the index range of its nodes.
fn periodic_nodes(
    total: f64,
    fixed: &[f64],
    zones: &[(f64, f64)],
    h: f64,
) -> (Vec<f64>, Vec<std::ops::Range<usize>>) {
    let fine: Vec<(f64, f64, f64)> = zones
        .iter()
        .map(|&(c, w)| (c - w, c + w, 2.0 * w / ARC_SEGMENTS as f64))
        .collect();
    let size = graded_size(&fine, h, GRADE, Some(total));
    let mut breaks: Vec<f64> = vec![0.0, total];
    breaks.extend(fixed.iter().copied().filter(|&s| s > 0.0 && s < total));
    for z in &fine {
        breaks.push(z.0);
        breaks.push(z.1);
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * total);
    let mut nodes = Vec::new();
    for w in breaks.windows(2) {
        let inside_zone = fine.iter().any(|z| w[0] >= z.0 - 1e-14 && w[1] <= z.1 + 1e-14);
        let seg = if inside_zone {
            (0..=ARC_SEGMENTS)
                .map(|j| w[0] + (w[1] - w[0]) * j as f64 / ARC_SEGMENTS as f64)
                .collect()
        } else {
            distribute(w[0], w[1], &size)
        };
        nodes.extend_from_slice(&seg[..seg.len() - 1]);
    }
    let ranges = fine
        .iter()
        .map(|z| {
            let start = nodes.iter().position(|&s| (s - z.0).abs() < 1e-12 * total.max(1.0)).unwrap();
            start..start + ARC_SEGMENTS + 1
        })
        .collect();
    (nodes, ranges)
}

fn hole_loop(req: &HoleRequest) -> Vec<[f64; 2]> {
    (0..req.nodes)
        .map(|j| {
            let phi = -2.0 * PI * j as f64 / req.nodes as f64;
            [req.center[0] + req.radius * phi.cos(), req.center[1] + req.radius * phi.sin()]
        })
        .collect()
}

fn blend(lambda: &mut [f64], vertices: &[[f64; 2]], anchor: [f64; 2], radius: f64, value: f64) {
    for (l, p) in lambda.iter_mut().zip(vertices) {
        let d = ((p[0] - anchor[0]).powi(2) + (p[1] - anchor[1]).powi(2)).sqrt();
        let w = if d <= radius {
            1.0
        } else if d >= 2.0 * radius {
            0.0
        } else {
            2.0 - d / radius
        };
        *l = w * value + (1.0 - w) * *l;
    }
}

/// Copies the representative's conformal factor onto every identified vertex.
pub(crate) fn unify_conformal_factor(mesh: &mut SurfaceMesh) {
    let li = mesh.logical_index();
    for v in 0..mesh.vertices.len() {
        mesh.conformal_factor[v] = mesh.conformal_factor[li.rep[v]];
    }
}

pub(crate) fn disk_chart(
    field: &AngularDensity,
    h: f64,
    arcs: &[ArcRequest],
    holes: &[HoleRequest],
) -> Result<Chart> {
    check_resolution(h)?;
    // boundary pieces: chord around each arc, circular arcs in between
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by(|&a, &b| arcs[a].angle.rem_euclid(2.0 * PI).partial_cmp(&arcs[b].angle.rem_euclid(2.0 * PI)).unwrap());
    enum Piece {
        Chord { mid: [f64; 2], tangent: [f64; 2], half: f64 },
        Arc { from: f64, to: f64 },
    }
    let mut pieces = Vec::new();
    let mut zone_on_piece = Vec::new();
    if arcs.is_empty() {
        pieces.push(Piece::Arc { from: 0.0, to: 2.0 * PI });
    } else {
        for (pos, &i) in order.iter().enumerate() {
            let a = &arcs[i];
            if !(a.flatten < 1.0 && a.half_width < a.flatten) {
                return Err(Error::InvalidGluing(format!(
                    "flatten radius {} must lie in (half-width {}, 1)",
                    a.flatten, a.half_width
                )));
            }
            let th = a.angle.rem_euclid(2.0 * PI);
            let alpha = a.flatten.asin();
            let c = alpha.cos();
            pieces.push(Piece::Chord {
                mid: [c * th.cos(), c * th.sin()],
                tangent: [-th.sin(), th.cos()],
                half: a.flatten,
            });
            zone_on_piece.push((pieces.len() - 1, i));
            let j = order[(pos + 1) % order.len()];
            let nth = arcs[j].angle.rem_euclid(2.0 * PI) + if pos + 1 == order.len() { 2.0 * PI } else { 0.0 };
            let from = th + alpha;
            let to = nth - arcs[j].flatten.asin();
            if to - from < 1e-9 {
                return Err(Error::InvalidGluing("flattened boundary pieces overlap".into()));
            }
            pieces.push(Piece::Arc { from, to });
        }
    }
    let lengths: Vec<f64> = pieces
        .iter()
        .map(|p| match p {
            Piece::Chord { half, .. } => 2.0 * half,
            Piece::Arc { from, to } => to - from,
        })
        .collect();
    let mut starts = vec![0.0];
    for l in &lengths {
        starts.push(starts.last().unwrap() + l);
    }
    let total = *starts.last().unwrap();
    let mut zones = vec![(0.0, 0.0); arcs.len()];
    for &(p, i) in &zone_on_piece {
        zones[i] = (starts[p] + lengths[p] / 2.0, arcs[i].half_width);
    }
    let (params, ranges) = periodic_nodes(total, &starts[1..starts.len() - 1], &zones, h);
    let position = |s: f64| -> [f64; 2] {
        let k = match starts.iter().rposition(|&st| st <= s) {
            Some(k) if k < pieces.len() => k,
            _ => pieces.len() - 1,
        };
        let local = s - starts[k];
        match &pieces[k] {
            Piece::Chord { mid, tangent, half } => {
                let u = local - half;
                [mid[0] + u * tangent[0], mid[1] + u * tangent[1]]
            }
            Piece::Arc { from, .. } => {
                let th = from + local;
                [th.cos(), th.sin()]
            }
        }
    };
    let outer: Vec<[f64; 2]> = params.iter().map(|&s| position(s)).collect();
    let mut loops = vec![outer];
    for hreq in holes {
        let r = (hreq.center[0].powi(2) + hreq.center[1].powi(2)).sqrt();
        if r + hreq.radius >= 1.0 {
            return Err(Error::InvalidGluing("hole reaches the disk boundary".into()));
        }
        loops.push(hole_loop(hreq));
    }
    let cm = triangulate(&loops, area_for_edge(h))?;
    let mut lambda: Vec<f64> = cm.vertices.iter().map(|p| field.at(p[1].atan2(p[0]))).collect();
    if !field.is_constant() {
        for &(p, i) in &zone_on_piece {
            if let Piece::Chord { mid, .. } = &pieces[p] {
                let a = &arcs[i];
                blend(&mut lambda, &cm.vertices, *mid, a.flatten, field.at(a.angle));
            }
        }
    }
    let mesh = SurfaceMesh::new(cm.vertices, cm.triangles, Vec::new(), lambda)?;
    let arcs_idx = ranges.into_iter().map(|r| r.map(|j| cm.loops[0][j]).collect()).collect();
    let holes_idx = cm.loops[1..].to_vec();
    Ok(Chart { mesh, arcs: arcs_idx, holes: holes_idx })
}

/// Nodes along a circle side of the cylinder/Möbius chart, as θ values in
/// increasing order (always including 0 and excluding 2π), with arc ranges.
fn circle_side(arcs: &[(f64, f64)], h: f64, fixed: &[f64]) -> (Vec<f64>, Vec<std::ops::Range<usize>>) {
    periodic_nodes(2.0 * PI, fixed, arcs, h)
}

fn check_arc_in_chart(a: &ArcRequest) -> Result<()> {
    let th = a.angle;
    if !(th - 2.0 * a.half_width > 0.0 && th + 2.0 * a.half_width < 2.0 * PI) {
        return Err(Error::InvalidGluing(format!(
            "boundary arc at angle {th} crosses the chart seam"
        )));
    }
    Ok(())
}

fn check_hole_in_strip(hreq: &HoleRequest, height: f64) -> Result<()> {
    let [t, th] = hreq.center;
    let margin = 2.0 * hreq.radius;
    if !(t - margin > 0.0 && t + margin < height && th - margin > 0.0 && th + margin < 2.0 * PI) {
        return Err(Error::InvalidGluing(format!(
            "hole at ({t}, {th}) of radius {} touches the chart boundary",
            hreq.radius
        )));
    }
    Ok(())
}

/// Common layout of the strip charts `[0,T] × [0,2π]`.
struct Strip {
    loop_pts: Vec<[f64; 2]>,
    identifications: Vec<(usize, usize)>,
    /// per circle side request, the loop positions of its arc nodes in loop direction
    arcs: Vec<Vec<usize>>,
}

/// `fold = false`: both sides `t = 0` and `t = T` are boundary circles.
/// `fold = true`: the side `t = 0` is folded by `(0,θ) ~ (0,θ+π)`.
fn strip_loop(height: f64, h: f64, arcs: &[ArcRequest], fold: bool) -> Result<Strip> {
    for a in arcs {
        check_arc_in_chart(a)?;
        let max_circle = if fold { 0 } else { 1 };
        if a.circle > max_circle {
            return Err(Error::InvalidGluing(format!("no boundary circle {}", a.circle)));
        }
    }
    // seam nodes in t
    let seam = distribute(0.0, height, &|_| h);
    let ns = seam.len();
    // side at t = T (boundary circle; index 1 on the cylinder, 0 on the Möbius band)
    let top_circle = if fold { 0 } else { 1 };
    let top_req: Vec<(usize, &ArcRequest)> = arcs.iter().enumerate().filter(|(_, a)| a.circle == top_circle).collect();
    let (top, top_ranges) = circle_side(
        &top_req.iter().map(|(_, a)| (a.angle, a.half_width)).collect::<Vec<_>>(),
        h,
        &[],
    );
    let (bottom, bottom_ranges, bottom_req) = if fold {
        let m = (PI / h).ceil().max(2.0) as usize;
        let half: Vec<f64> = (0..m).map(|j| PI * j as f64 / m as f64).collect();
        let mut b = half.clone();
        b.extend(half.iter().map(|y| y + PI));
        (b, Vec::new(), Vec::new())
    } else {
        let req: Vec<(usize, &ArcRequest)> = arcs.iter().enumerate().filter(|(_, a)| a.circle == 0).collect();
        let (b, r) = circle_side(&req.iter().map(|(_, a)| (a.angle, a.half_width)).collect::<Vec<_>>(), h, &[]);
        (b, r, req)
    };

    // CCW loop: seam y=0 (t increasing), side t=T (θ increasing), seam y=2π (t decreasing), side t=0 (θ decreasing)
    let mut pts = Vec::new();
    let seam_a: Vec<usize> = (0..ns).map(|j| {
        pts.push([seam[j], 0.0]);
        pts.len() - 1
    }).collect();
    // t = T side: θ from (exclusive) 0 to (exclusive) 2π
    let top_pos: Vec<usize> = top.iter().skip(1).map(|&th| {
        pts.push([height, th]);
        pts.len() - 1
    }).collect();
    let seam_b: Vec<usize> = (0..ns).rev().map(|j| {
        pts.push([seam[j], 2.0 * PI]);
        pts.len() - 1
    }).collect();
    // t = 0 side, θ decreasing, excluding both corners
    let bottom_pos: Vec<usize> = bottom.iter().skip(1).rev().map(|&th| {
        pts.push([0.0, th]);
        pts.len() - 1
    }).collect();

    let mut ident = Vec::new();
    // seam_b is reversed: seam_b[ns-1-j] is at seam[j]
    for j in 0..ns {
        ident.push((seam_a[j], seam_b[ns - 1 - j]));
    }
    if fold {
        // (0, θ) ~ (0, θ+π); positions of bottom nodes by θ index
        let m = bottom.len() / 2;
        let at = |k: usize| -> usize {
            // θ index k in 0..=2m; 0 and 2m are the corners
            if k == 0 {
                seam_a[0]
            } else if k == 2 * m {
                seam_b[ns - 1]
            } else {
                bottom_pos[bottom.len() - 1 - k]
            }
        };
        for k in 0..=m {
            ident.push((at(k), at(k + m)));
        }
    }
    let mut arc_pos = vec![Vec::new(); arcs.len()];
    for ((idx, _), r) in top_req.iter().zip(top_ranges) {
        // top nodes skip θ=0, arcs never touch 0
        arc_pos[*idx] = r.map(|k| top_pos[k - 1]).collect();
    }
    for ((idx, _), r) in bottom_req.iter().zip(bottom_ranges) {
        // θ decreasing in loop direction
        let mut v: Vec<usize> = r.map(|k| bottom_pos[bottom.len() - 1 - k]).collect();
        v.reverse();
        arc_pos[*idx] = v;
    }
    Ok(Strip { loop_pts: pts, identifications: ident, arcs: arc_pos })
}

fn strip_chart(
    height: f64,
    h: f64,
    arcs: &[ArcRequest],
    holes: &[HoleRequest],
    fold: bool,
    lambda_of: &dyn Fn([f64; 2]) -> f64,
) -> Result<Chart> {
    check_resolution(h)?;
    if !(height > 0.0) {
        return Err(invalid(format!("height must be positive, got {height}")));
    }
    for hreq in holes {
        check_hole_in_strip(hreq, height)?;
    }
    let strip = strip_loop(height, h, arcs, fold)?;
    let mut loops = vec![strip.loop_pts];
    loops.extend(holes.iter().map(hole_loop));
    let cm = triangulate(&loops, area_for_edge(h))?;
    let lambda: Vec<f64> = cm.vertices.iter().map(|&p| lambda_of(p)).collect();
    let ident = strip.identifications.iter().map(|&(a, b)| (cm.loops[0][a], cm.loops[0][b])).collect();
    let mut mesh = SurfaceMesh {
        vertices: cm.vertices,
        triangles: cm.triangles,
        identifications: ident,
        boundary_loops: Vec::new(),
        conformal_factor: lambda,
    };
    unify_conformal_factor(&mut mesh);
    let mesh = SurfaceMesh::new(mesh.vertices, mesh.triangles, mesh.identifications, mesh.conformal_factor)?;
    let arcs_idx = strip.arcs.iter().map(|v| v.iter().map(|&k| cm.loops[0][k]).collect()).collect();
    Ok(Chart { mesh, arcs: arcs_idx, holes: cm.loops[1..].to_vec() })
}

pub(crate) fn cylinder_chart(
    height: f64,
    bottom: &AngularDensity,
    top: &AngularDensity,
    h: f64,
    arcs: &[ArcRequest],
    holes: &[HoleRequest],
) -> Result<Chart> {
    strip_chart(height, h, arcs, holes, false, &|p| {
        let s = (p[0] / height).clamp(0.0, 1.0);
        (1.0 - s) * bottom.at(p[1]) + s * top.at(p[1])
    })
}

pub(crate) fn mobius_chart(
    height: f64,
    density: f64,
    h: f64,
    arcs: &[ArcRequest],
    holes: &[HoleRequest],
) -> Result<Chart> {
    strip_chart(height, h, arcs, holes, true, &|_| density)
}

/// Unit disk with `λ ≡ 1`, boundary nodes spaced by `resolution`.
pub fn build_disk_mesh(resolution: f64) -> Result<SurfaceMesh> {
    Ok(disk_chart(&AngularDensity::Constant(1.0), resolution, &[], &[])?.mesh)
}

/// Unit disk with an angular conformal factor.
pub fn build_weighted_disk_mesh(field: &AngularDensity, resolution: f64) -> Result<SurfaceMesh> {
    Ok(disk_chart(field, resolution, &[], &[])?.mesh)
}

/// Flat cylinder `[0,T] × [0,2π]` with constant boundary density `density`.
pub fn build_cylinder_mesh(height: f64, density: f64, resolution: f64) -> Result<SurfaceMesh> {
    if !(height > 0.0) {
        return Err(invalid(format!("cylinder height must be positive, got {height}")));
    }
    if !(density > 0.0) {
        return Err(invalid(format!("boundary density must be positive, got {density}")));
    }
    let d = AngularDensity::Constant(density);
    Ok(cylinder_chart(height, &d, &d, resolution, &[], &[])?.mesh)
}

/// Möbius band realised on `[0,T] × [0,2π]` with the `t = 0` circle folded antipodally.
pub fn build_mobius_mesh(height: f64, resolution: f64) -> Result<SurfaceMesh> {
    build_weighted_mobius_mesh(height, 1.0, resolution)
}

pub fn build_weighted_mobius_mesh(height: f64, density: f64, resolution: f64) -> Result<SurfaceMesh> {
    if !(height > 0.0) {
        return Err(invalid(format!("Möbius height must be positive, got {height}")));
    }
    if !(density > 0.0) {
        return Err(invalid(format!("boundary density must be positive, got {density}")));
    }
    Ok(mobius_chart(height, density, resolution, &[], &[])?.mesh)
}

/// Mesh for any single-component [`MetricSpec`]; glued families go through
/// [`crate::geometry::glue::mesh_glued_family`].
pub fn build_mesh(spec: &MetricSpec, resolution: f64) -> Result<SurfaceMesh> {
    spec.validate()?;
    match spec {
        MetricSpec::FlatCylinder { height, bottom, top } => {
            Ok(cylinder_chart(*height, bottom, top, resolution, &[], &[])?.mesh)
        }
        MetricSpec::UnitDisk { conformal_factor } => build_weighted_disk_mesh(conformal_factor, resolution),
        MetricSpec::MobiusCylinder { height, density } => build_weighted_mobius_mesh(*height, *density, resolution),
        MetricSpec::GluedFamily { .. } => Ok(crate::geometry::glue::mesh_glued_family(spec, resolution)?.mesh),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mesh::{boundary_length, boundary_loop_lengths, validate_mesh};

    #[test]
    fn disk_boundary_length_and_validity() {
        let m = build_disk_mesh(0.1).unwrap();
        let l = boundary_length(&m);
        assert!((l / (2.0 * PI) - 1.0).abs() < 5e-3, "{l}");
        assert!(validate_mesh(&m).is_clean(), "{:?}", validate_mesh(&m));
        assert_eq!(m.boundary_loops.len(), 1);
        let finer = boundary_length(&build_disk_mesh(0.05).unwrap());
        assert!((2.0 * PI - finer).abs() < (2.0 * PI - l).abs());
    }

    #[test]
    fn cylinder_has_two_circles() {
        let m = build_cylinder_mesh(1.0, 1.0, 0.05).unwrap();
        assert!(validate_mesh(&m).is_clean(), "{:?}", validate_mesh(&m));
        let ls = boundary_loop_lengths(&m);
        assert_eq!(ls.len(), 2);
        for l in ls {
            assert!((l / (2.0 * PI) - 1.0).abs() < 5e-3);
        }
        assert_eq!(m.euler_characteristic(), 0);
    }

    #[test]
    fn degenerate_heights_are_rejected() {
        assert!(matches!(build_cylinder_mesh(0.0, 1.0, 0.1), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_mobius_mesh(-1.0, 0.1), Err(Error::InvalidParameter(_))));
        assert!(matches!(build_disk_mesh(0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn mobius_has_one_circle_and_zero_euler_characteristic() {
        let m = build_mobius_mesh(1.0, 0.1).unwrap();
        assert!(validate_mesh(&m).is_clean(), "{:?}", validate_mesh(&m));
        let ls = boundary_loop_lengths(&m);
        assert_eq!(ls.len(), 1);
        assert!((ls[0] / (2.0 * PI) - 1.0).abs() < 5e-3);
        assert_eq!(m.euler_characteristic(), 0);
        assert_eq!(m.n_components(), 1);
    }

    #[test]
    fn disk_with_arc_requests_places_uniform_arc_nodes() {
        let arcs = [
            ArcRequest { circle: 0, angle: 0.0, half_width: 0.05, flatten: 0.05f64.sqrt() },
            ArcRequest { circle: 0, angle: PI, half_width: 0.05, flatten: 0.05f64.sqrt() },
        ];
        let c = disk_chart(&AngularDensity::Constant(1.0), 0.1, &arcs, &[]).unwrap();
        assert!(validate_mesh(&c.mesh).is_clean());
        for arc in &c.arcs {
            assert_eq!(arc.len(), ARC_SEGMENTS + 1);
            let p0 = c.mesh.vertices[arc[0]];
            let p1 = c.mesh.vertices[*arc.last().unwrap()];
            let d = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
            assert!((d - 0.1).abs() < 1e-12);
        }
    }
}
