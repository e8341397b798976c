//! Planar chart triangulation.
//!
//! Charts are described by closed polygonal loops whose nodes are placed by
//! the caller; refinement never moves or splits those nodes, so that seams
//! and necks can be matched node for node. Interior quality refinement is a
//! constrained Delaunay refinement (spade) with a minimum-angle bound, which
//! grades the mesh away from short boundary segments on its own.

use std::collections::HashMap;

use spade::handles::FixedVertexHandle;
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use crate::error::{Error, Result};

/// Minimum interior angle requested from the refinement.
const ANGLE_LIMIT_DEG: f64 = 25.0;

/// A triangulated planar chart.
#[derive(Debug, Clone)]
pub struct ChartMesh {
    pub vertices: Vec<[f64; 2]>,
    /// Counter-clockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    /// `loops[i][j]` is the vertex index of node `j` of input loop `i`.
    pub loops: Vec<Vec<usize>>,
}

/// Triangulates the region enclosed by `loops` (outer loop plus holes, odd
/// winding is inside) with triangles of area at most `max_area`.
pub fn triangulate(loops: &[Vec<[f64; 2]>], max_area: f64) -> Result<ChartMesh> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut handles: Vec<Vec<FixedVertexHandle>> = Vec::with_capacity(loops.len());
    let mut n_input = 0;
    for lp in loops {
        if lp.len() < 3 {
            return Err(Error::Meshing("boundary loop with fewer than 3 nodes".into()));
        }
        let mut hs = Vec::with_capacity(lp.len());
        for p in lp {
            let h = cdt
                .insert(Point2::new(p[0], p[1]))
                .map_err(|e| Error::Meshing(format!("insertion failed: {e:?}")))?;
            hs.push(h);
        }
        n_input += lp.len();
        handles.push(hs);
    }
    if cdt.num_vertices() != n_input {
        return Err(Error::Meshing("duplicate boundary nodes".into()));
    }
    for hs in &handles {
        for j in 0..hs.len() {
            let (a, b) = (hs[j], hs[(j + 1) % hs.len()]);
            if !cdt.can_add_constraint(a, b) {
                return Err(Error::Meshing("boundary loops intersect".into()));
            }
            cdt.add_constraint(a, b);
        }
    }
    let params = RefinementParameters::<f64>::new()
        .exclude_outer_faces(true)
        .keep_constraint_edges()
        .with_angle_limit(AngleLimit::from_deg(ANGLE_LIMIT_DEG))
        .with_max_allowed_area(max_area)
        .with_max_additional_vertices(20_000_000);
    let result = cdt.refine(params);
    let excluded: std::collections::HashSet<_> = result.excluded_faces.iter().copied().collect();

    let mut remap: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    // input nodes keep their relative order at the front
    for hs in &handles {
        for h in hs {
            let p = cdt.vertex(*h).position();
            remap.insert(h.index(), vertices.len());
            vertices.push([p.x, p.y]);
        }
    }
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let mut tri = [0usize; 3];
        for (k, v) in vs.iter().enumerate() {
            let idx = v.fix().index();
            let id = *remap.entry(idx).or_insert_with(|| {
                let p = v.position();
                vertices.push([p.x, p.y]);
                vertices.len() - 1
            });
            tri[k] = id;
        }
        let [a, b, c] = tri.map(|i| vertices[i]);
        let area2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if area2 < 0.0 {
            tri.swap(1, 2);
        }
        triangles.push(tri);
    }
    if triangles.is_empty() {
        return Err(Error::Meshing("no interior triangles".into()));
    }
    let mut offset = 0;
    let loops_idx = loops
        .iter()
        .map(|lp| {
            let v: Vec<usize> = (offset..offset + lp.len()).collect();
            offset += lp.len();
            v
        })
        .collect();
    Ok(ChartMesh { vertices, triangles, loops: loops_idx })
}

/// Target triangle area for edge length `h` (equilateral).
pub fn area_for_edge(h: f64) -> f64 {
    0.25 * 3f64.sqrt() * h * h
}

/// Places nodes on the parameter interval `[s0, s1]` so that consecutive
/// spacings follow `size(s)`. Both endpoints are included.
pub fn distribute(s0: f64, s1: f64, size: &dyn Fn(f64) -> f64) -> Vec<f64> {
    let len = s1 - s0;
    if len <= 0.0 {
        return vec![s0];
    }
    // cumulative node density Φ(s) = ∫ ds / size(s) by the midpoint rule
    let samples = 4000usize;
    let ds = len / samples as f64;
    let mut phi = Vec::with_capacity(samples + 1);
    phi.push(0.0);
    for i in 0..samples {
        let s = s0 + (i as f64 + 0.5) * ds;
        phi.push(phi[i] + ds / size(s));
    }
    let total = phi[samples];
    let n = total.round().max(1.0) as usize;
    let mut out = Vec::with_capacity(n + 1);
    out.push(s0);
    let mut j = 0;
    for k in 1..n {
        let target = total * k as f64 / n as f64;
        while phi[j + 1] < target {
            j += 1;
        }
        let frac = (target - phi[j]) / (phi[j + 1] - phi[j]);
        out.push(s0 + (j as f64 + frac) * ds);
    }
    out.push(s1);
    out
}

/// Graded size function: `fine` on the marked intervals, growing linearly
/// with slope `grade` away from them, capped at `coarse`.
pub fn graded_size(fine_zones: &[(f64, f64, f64)], coarse: f64, grade: f64, period: Option<f64>) -> impl Fn(f64) -> f64 + '_ {
    move |s: f64| {
        let mut h = coarse;
        for &(a, b, fine) in fine_zones {
            let d = interval_distance(s, a, b, period);
            h = h.min(fine + grade * d);
        }
        h
    }
}

fn interval_distance(s: f64, a: f64, b: f64, period: Option<f64>) -> f64 {
    let direct = if s < a {
        a - s
    } else if s > b {
        s - b
    } else {
        0.0
    };
    match period {
        Some(p) => {
            let shifted_up = interval_distance(s + p, a, b, None);
            let shifted_down = interval_distance(s - p, a, b, None);
            direct.min(shifted_up).min(shifted_down)
        }
        None => direct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distribute_keeps_endpoints_and_spacing() {
        let s = distribute(0.0, 1.0, &|_| 0.1);
        assert_eq!(s.len(), 11);
        assert_eq!(s[0], 0.0);
        assert_eq!(*s.last().unwrap(), 1.0);
        for w in s.windows(2) {
            assert!((w[1] - w[0] - 0.1).abs() < 1e-9);
        }
    }

    #[test]
    fn graded_distribution_is_finer_near_zone() {
        let zones = [(0.0, 0.0, 0.01)];
        let size = graded_size(&zones, 0.2, 0.3, None);
        let s = distribute(0.0, 2.0, &size);
        let first = s[1] - s[0];
        let last = s[s.len() - 1] - s[s.len() - 2];
        assert!(first < 0.02 && last > 0.15, "{first} {last}");
    }

    #[test]
    fn square_is_triangulated_with_fixed_boundary() {
        let lp: Vec<[f64; 2]> = (0..4)
            .flat_map(|side| {
                (0..10).map(move |i| {
                    let t = i as f64 / 10.0;
                    match side {
                        0 => [t, 0.0],
                        1 => [1.0, t],
                        2 => [1.0 - t, 1.0],
                        _ => [0.0, 1.0 - t],
                    }
                })
            })
            .collect();
        let cm = triangulate(std::slice::from_ref(&lp), area_for_edge(0.1)).unwrap();
        let area: f64 = cm
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| cm.vertices[i]);
                0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
            })
            .sum();
        assert!((area - 1.0).abs() < 1e-12);
        for (j, &v) in cm.loops[0].iter().enumerate() {
            assert_eq!(cm.vertices[v], lp[j]);
        }
    }
}
