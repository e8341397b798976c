use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A triangulated surface given in one or more flat charts.
///
/// Raw vertices carry chart coordinates. Vertices listed in `identifications`
/// are merged into a single logical vertex, which is how seams, antipodal
/// folds and gluing necks are represented. A logical vertex is named by the
/// smallest raw index in its class (its *representative*).
///
/// The metric is `λ² · (flat chart metric)` where `λ = conformal_factor[v]`.
/// In two dimensions the Dirichlet energy does not see `λ`, so only its values
/// on the boundary enter any spectral computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<[f64; 2]>,
    pub triangles: Vec<[usize; 3]>,
    pub identifications: Vec<(usize, usize)>,
    /// Closed loops of logical (representative) vertex ids.
    pub boundary_loops: Vec<Vec<usize>>,
    /// One positive value per raw vertex; identified vertices agree.
    pub conformal_factor: Vec<f64>,
}

/// Logical edge `(a, b)` with `a < b`, mapped to `(triangle, raw endpoints)` for each use.
type EdgeTable = HashMap<(usize, usize), Vec<(usize, [usize; 2])>>;

/// Raw-vertex to logical-vertex bookkeeping.
#[derive(Debug, Clone)]
pub struct LogicalIndex {
    /// Representative raw index of each raw vertex.
    pub rep: Vec<usize>,
    /// Compact degree-of-freedom number of each raw vertex.
    pub dof: Vec<usize>,
    /// Representative raw index of each dof.
    pub dof_rep: Vec<usize>,
}

impl LogicalIndex {
    pub fn n_dofs(&self) -> usize {
        self.dof_rep.len()
    }
}

/// A boundary edge as seen from its unique adjacent triangle.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryEdge {
    /// Raw endpoints, oriented as in the triangle (interior on the left).
    pub raw: [usize; 2],
    pub triangle: usize,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

impl SurfaceMesh {
    /// Assembles a mesh and derives its boundary loops from the topology.
    pub fn new(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        identifications: Vec<(usize, usize)>,
        conformal_factor: Vec<f64>,
    ) -> Result<Self> {
        let mut mesh = SurfaceMesh {
            vertices,
            triangles,
            identifications,
            boundary_loops: Vec::new(),
            conformal_factor,
        };
        if mesh.conformal_factor.len() != mesh.vertices.len() {
            return Err(Error::Internal(format!(
                "{} conformal factors for {} vertices",
                mesh.conformal_factor.len(),
                mesh.vertices.len()
            )));
        }
        mesh.boundary_loops = mesh.trace_boundary_loops()?;
        Ok(mesh)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn logical_index(&self) -> LogicalIndex {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        for &(a, b) in &self.identifications {
            if a >= n || b >= n {
                continue;
            }
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                // keep the smaller index as root so that the root is the representative
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        let rep: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let mut dof = vec![usize::MAX; n];
        let mut dof_rep = Vec::new();
        for v in 0..n {
            let r = rep[v];
            if dof[r] == usize::MAX {
                dof[r] = dof_rep.len();
                dof_rep.push(r);
            }
            dof[v] = dof[r];
        }
        LogicalIndex { rep, dof, dof_rep }
    }

    /// Signed chart area of triangle `t`.
    pub fn chart_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    /// Logical edges with the triangles (and local raw endpoints) touching them.
    fn edge_table(&self, li: &LogicalIndex) -> EdgeTable {
        let mut table = EdgeTable::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                let (ra, rb) = (li.rep[a], li.rep[b]);
                let key = if ra < rb { (ra, rb) } else { (rb, ra) };
                table.entry(key).or_default().push((t, [a, b]));
            }
        }
        table
    }

    /// Boundary edges (logical edges with exactly one adjacent triangle),
    /// in a deterministic order.
    pub fn boundary_edges(&self) -> Vec<BoundaryEdge> {
        let li = self.logical_index();
        let table = self.edge_table(&li);
        let mut edges: Vec<BoundaryEdge> = table
            .into_values()
            .filter(|v| v.len() == 1)
            .map(|v| BoundaryEdge { raw: v[0].1, triangle: v[0].0 })
            .collect();
        edges.sort_by_key(|e| (e.triangle, e.raw));
        edges
    }

    fn trace_boundary_loops(&self) -> Result<Vec<Vec<usize>>> {
        let li = self.logical_index();
        let edges = self.boundary_edges();
        let mut next: HashMap<usize, usize> = HashMap::new();
        for e in &edges {
            let (a, b) = (li.rep[e.raw[0]], li.rep[e.raw[1]]);
            if next.insert(a, b).is_some() {
                return Err(Error::Internal(format!(
                    "boundary vertex {a} has two outgoing boundary edges"
                )));
            }
        }
        let mut starts: Vec<usize> = next.keys().copied().collect();
        starts.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        let mut loops = Vec::new();
        for s in starts {
            if seen.contains(&s) {
                continue;
            }
            let mut lp = vec![s];
            seen.insert(s);
            let mut cur = next[&s];
            while cur != s {
                if !seen.insert(cur) {
                    return Err(Error::Internal("boundary loop does not close".into()));
                }
                lp.push(cur);
                cur = *next
                    .get(&cur)
                    .ok_or_else(|| Error::Internal("open boundary chain".into()))?;
            }
            loops.push(lp);
        }
        Ok(loops)
    }

    /// Physical length of every boundary edge: chart length times the mean
    /// endpoint conformal factor.
    pub fn boundary_edge_lengths(&self) -> Vec<(BoundaryEdge, f64)> {
        self.boundary_edges()
            .into_iter()
            .map(|e| {
                let (a, b) = (e.raw[0], e.raw[1]);
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                let chart = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
                let lam = 0.5 * (self.conformal_factor[a] + self.conformal_factor[b]);
                (e, chart * lam)
            })
            .collect()
    }

    /// Euler characteristic of the identified complex.
    pub fn euler_characteristic(&self) -> i64 {
        let li = self.logical_index();
        let edges = self.edge_table(&li).len() as i64;
        li.n_dofs() as i64 - edges + self.triangles.len() as i64
    }

    /// Number of connected components of the identified complex.
    pub fn n_components(&self) -> usize {
        let li = self.logical_index();
        let n = li.n_dofs();
        let mut parent: Vec<usize> = (0..n).collect();
        for tri in &self.triangles {
            let d: Vec<usize> = tri.iter().map(|&v| li.dof[v]).collect();
            for k in 1..3 {
                let (a, b) = (find(&mut parent, d[0]), find(&mut parent, d[k]));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..n).filter(|&v| find(&mut parent, v) == v).count()
    }

    /// Chart coordinates of a logical vertex (those of its representative).
    pub fn position(&self, logical: usize) -> [f64; 2] {
        self.vertices[logical]
    }
}

/// Total physical boundary length.
pub fn boundary_length(mesh: &SurfaceMesh) -> f64 {
    mesh.boundary_edge_lengths().iter().map(|(_, l)| l).sum()
}

/// Physical length of each stored boundary loop, in loop order.
pub fn boundary_loop_lengths(mesh: &SurfaceMesh) -> Vec<f64> {
    let li = mesh.logical_index();
    let mut per_edge: HashMap<(usize, usize), f64> = HashMap::new();
    for (e, l) in mesh.boundary_edge_lengths() {
        per_edge.insert((li.rep[e.raw[0]], li.rep[e.raw[1]]), l);
    }
    mesh.boundary_loops
        .iter()
        .map(|lp| {
            (0..lp.len())
                .map(|i| {
                    let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                    per_edge
                        .get(&(a, b))
                        .or_else(|| per_edge.get(&(b, a)))
                        .copied()
                        .unwrap_or(0.0)
                })
                .sum()
        })
        .collect()
}

/// One failed mesh invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    IndexOutOfRange { triangle: usize },
    ConformalFactorLength { expected: usize, found: usize },
    DegenerateTriangle { triangle: usize, area: f64 },
    RepeatedLogicalVertex { triangle: usize },
    NonManifoldEdge { edge: (usize, usize), triangles: usize },
    BoundaryMismatch { detail: String },
    OpenBoundaryLoop { loop_index: usize },
    NonPositiveConformalFactor { vertex: usize, value: f64 },
    IdentifiedFactorMismatch { pair: (usize, usize) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Result of [`validate_mesh`]; empty when every invariant holds.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MeshReport {
    pub violations: Vec<Violation>,
}

impl MeshReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every structural invariant of a [`SurfaceMesh`]. Never fails; the
/// report lists what is wrong.
pub fn validate_mesh(mesh: &SurfaceMesh) -> MeshReport {
    let mut out = Vec::new();
    let n = mesh.vertices.len();
    if mesh.conformal_factor.len() != n {
        out.push(Violation::ConformalFactorLength {
            expected: n,
            found: mesh.conformal_factor.len(),
        });
        return MeshReport { violations: out };
    }
    for (t, tri) in mesh.triangles.iter().enumerate() {
        if tri.iter().any(|&v| v >= n) {
            out.push(Violation::IndexOutOfRange { triangle: t });
        }
    }
    if mesh.identifications.iter().any(|&(a, b)| a >= n || b >= n) || !out.is_empty() {
        if out.is_empty() {
            out.push(Violation::BoundaryMismatch {
                detail: "identification index out of range".into(),
            });
        }
        return MeshReport { violations: out };
    }
    let li = mesh.logical_index();
    for t in 0..mesh.triangles.len() {
        let area = mesh.chart_area(t);
        if !(area > 0.0) {
            out.push(Violation::DegenerateTriangle { triangle: t, area });
        }
        let [a, b, c] = mesh.triangles[t].map(|v| li.rep[v]);
        if a == b || b == c || a == c {
            out.push(Violation::RepeatedLogicalVertex { triangle: t });
        }
    }
    let table = mesh.edge_table(&li);
    let mut keys: Vec<_> = table.keys().copied().collect();
    keys.sort_unstable();
    let mut boundary: std::collections::BTreeSet<(usize, usize)> = Default::default();
    for k in keys {
        let c = table[&k].len();
        if c > 2 {
            out.push(Violation::NonManifoldEdge { edge: k, triangles: c });
        } else if c == 1 {
            boundary.insert(k);
        }
    }
    let mut listed: std::collections::BTreeSet<(usize, usize)> = Default::default();
    for (i, lp) in mesh.boundary_loops.iter().enumerate() {
        if lp.len() < 3 {
            out.push(Violation::OpenBoundaryLoop { loop_index: i });
            continue;
        }
        for j in 0..lp.len() {
            let (a, b) = (lp[j], lp[(j + 1) % lp.len()]);
            let key = if a < b { (a, b) } else { (b, a) };
            if !boundary.contains(&key) {
                out.push(Violation::OpenBoundaryLoop { loop_index: i });
                break;
            }
            if !listed.insert(key) {
                out.push(Violation::BoundaryMismatch {
                    detail: format!("edge {key:?} listed twice"),
                });
            }
        }
    }
    let missing: Vec<_> = boundary.difference(&listed).copied().collect();
    if !missing.is_empty() {
        out.push(Violation::BoundaryMismatch {
            detail: format!(
                "{} single-triangle edges not covered by boundary loops (first {:?})",
                missing.len(),
                missing[0]
            ),
        });
    }
    for (v, &l) in mesh.conformal_factor.iter().enumerate() {
        if !(l > 0.0 && l.is_finite()) {
            out.push(Violation::NonPositiveConformalFactor { vertex: v, value: l });
        }
    }
    for &(a, b) in &mesh.identifications {
        let (la, lb) = (mesh.conformal_factor[a], mesh.conformal_factor[b]);
        if (la - lb).abs() > 1e-12 * la.abs().max(lb.abs()) {
            out.push(Violation::IdentifiedFactorMismatch { pair: (a, b) });
        }
    }
    MeshReport { violations: out }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> SurfaceMesh {
        SurfaceMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![],
            vec![1.0; 4],
        )
        .unwrap()
    }

    #[test]
    fn square_has_one_loop_of_length_four() {
        let m = square();
        assert_eq!(m.boundary_loops.len(), 1);
        assert!((boundary_length(&m) - 4.0).abs() < 1e-15);
        assert!(validate_mesh(&m).is_clean());
        assert_eq!(m.euler_characteristic(), 1);
    }

    #[test]
    fn seam_identification_makes_a_cylinder() {
        // 3x1 strip with x=0 and x=3 identified
        let v: Vec<[f64; 2]> = (0..2).flat_map(|j| (0..4).map(move |i| [i as f64, j as f64])).collect();
        let mut t = Vec::new();
        for i in 0..3 {
            t.push([i, i + 1, i + 5]);
            t.push([i, i + 5, i + 4]);
        }
        let m = SurfaceMesh::new(v, t, vec![(0, 3), (4, 7)], vec![1.0; 8]).unwrap();
        assert_eq!(m.boundary_loops.len(), 2);
        assert_eq!(m.euler_characteristic(), 0);
        assert!(validate_mesh(&m).is_clean());
    }

    #[test]
    fn mismatched_identified_factor_is_reported() {
        let mut m = square();
        m.identifications.push((0, 0));
        m.conformal_factor[1] = 2.0;
        m.identifications.push((1, 1));
        assert!(validate_mesh(&m).is_clean());
        m.identifications.push((1, 3));
        let r = validate_mesh(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::IdentifiedFactorMismatch { .. })));
    }

    #[test]
    fn flipped_triangle_is_degenerate() {
        let mut m = square();
        m.triangles[0] = [0, 2, 1];
        let r = validate_mesh(&m);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DegenerateTriangle { triangle: 0, .. })));
    }
}
