//! P1 finite elements for the Steklov problem.
//!
//! The stiffness matrix is the cotangent Laplacian of the flat chart; it is
//! the same for every conformal factor. The boundary mass is lumped and
//! carries the factor. Interior unknowns are eliminated by a sparse Cholesky
//! factorization, leaving the dense discrete Dirichlet-to-Neumann matrix on
//! the boundary, whose generalized eigenproblem against the diagonal mass is
//! solved densely.

mod sparse;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};

use crate::error::{invalid, Error, Result};
use crate::geometry::mesh::{LogicalIndex, SurfaceMesh};
use crate::spectrum::{Spectrum, FEM_CLUSTER_TOL};

pub use sparse::SparseSymmetricMatrix;

/// Relative eigenpair residual above which a solve is refused.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Right-hand sides per interior solve.
const BLOCK: usize = 64;

/// Cotangent stiffness on logical vertices (dof numbering of
/// [`SurfaceMesh::logical_index`]).
pub fn assemble_stiffness(mesh: &SurfaceMesh) -> Result<SparseSymmetricMatrix> {
    let li = mesh.logical_index();
    let mut a = SparseSymmetricMatrix::new(li.n_dofs());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let area = mesh.chart_area(t);
        if !(area > 0.0) {
            return Err(Error::Assembly(format!("triangle {t} has chart area {area}")));
        }
        let p = tri.map(|v| mesh.vertices[v]);
        for e in 0..3 {
            let (i, j, k) = (e, (e + 1) % 3, (e + 2) % 3);
            let u = [p[i][0] - p[k][0], p[i][1] - p[k][1]];
            let v = [p[j][0] - p[k][0], p[j][1] - p[k][1]];
            // cot of the angle at k is (u·v) / |u×v|, and |u×v| = 2·area
            let w = 0.5 * (u[0] * v[0] + u[1] * v[1]) / (2.0 * area);
            let (di, dj) = (li.dof[tri[i]], li.dof[tri[j]]);
            a.add(di, dj, -w);
            a.add(di, di, w);
            a.add(dj, dj, w);
        }
    }
    Ok(a)
}

/// Lumped boundary mass: half of each λ-weighted boundary edge goes to each endpoint.
pub fn assemble_boundary_mass(mesh: &SurfaceMesh) -> SparseSymmetricMatrix {
    let li = mesh.logical_index();
    let mut m = SparseSymmetricMatrix::new(li.n_dofs());
    for (e, len) in mesh.boundary_edge_lengths() {
        m.add(li.dof[e.raw[0]], li.dof[e.raw[0]], 0.5 * len);
        m.add(li.dof[e.raw[1]], li.dof[e.raw[1]], 0.5 * len);
    }
    m
}

/// Boundary dofs in boundary-loop order, loops concatenated.
pub fn boundary_dofs(mesh: &SurfaceMesh, li: &LogicalIndex) -> Vec<usize> {
    mesh.boundary_loops.iter().flatten().map(|&v| li.dof[v]).collect()
}

/// Dense DtN matrix and the relative symmetry defect before symmetrization.
#[derive(Debug, Clone)]
pub struct DtnOperator {
    pub matrix: Mat<f64>,
    pub symmetry_defect: f64,
}

/// `A_bb − A_bi A_ii⁻¹ A_ib` for the given boundary dofs (in the given order).
pub fn schur_dtn(stiffness: &SparseSymmetricMatrix, boundary: &[usize]) -> Result<DtnOperator> {
    faer::set_global_parallelism(Par::Seq);
    let n = stiffness.dim();
    let nb = boundary.len();
    let mut bpos = vec![usize::MAX; n];
    for (k, &d) in boundary.iter().enumerate() {
        if d >= n || bpos[d] != usize::MAX {
            return Err(invalid("boundary index set out of range or repeated"));
        }
        bpos[d] = k;
    }
    let mut ipos = vec![usize::MAX; n];
    let mut ni = 0;
    for d in 0..n {
        if bpos[d] == usize::MAX {
            ipos[d] = ni;
            ni += 1;
        }
    }
    let mut dtn = Mat::<f64>::zeros(nb, nb);
    let mut aii = Vec::new();
    // coupling stored per boundary column: (interior row, value)
    let mut aib: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nb];
    for (r, c, v) in stiffness.entries() {
        match (bpos[r], bpos[c]) {
            (usize::MAX, usize::MAX) => {
                let (i, j) = (ipos[r], ipos[c]);
                aii.push(Triplet::new(i.max(j), i.min(j), v));
            }
            (usize::MAX, b) => aib[b].push((ipos[r], v)),
            (b, usize::MAX) => aib[b].push((ipos[c], v)),
            (b1, b2) => {
                dtn[(b1, b2)] += v;
                if b1 != b2 {
                    dtn[(b2, b1)] += v;
                }
            }
        }
    }
    if ni > 0 {
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(ni, ni, &aii)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = a
            .sp_cholesky(Side::Lower)
            .map_err(|e| Error::Factorization(format!("interior block is not positive definite: {e:?}")))?;
        for start in (0..nb).step_by(BLOCK) {
            let width = BLOCK.min(nb - start);
            let mut x = Mat::<f64>::zeros(ni, width);
            for c in 0..width {
                for &(i, v) in &aib[start + c] {
                    x[(i, c)] += v;
                }
            }
            llt.solve_in_place(x.as_mut());
            for (b, col) in aib.iter().enumerate() {
                for &(i, v) in col {
                    for c in 0..width {
                        dtn[(b, start + c)] -= v * x[(i, c)];
                    }
                }
            }
        }
    }
    let mut defect: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..nb {
        for j in 0..i {
            defect = defect.max((dtn[(i, j)] - dtn[(j, i)]).abs());
            let s = 0.5 * (dtn[(i, j)] + dtn[(j, i)]);
            dtn[(i, j)] = s;
            dtn[(j, i)] = s;
        }
        scale = scale.max(dtn[(i, i)].abs());
    }
    Ok(DtnOperator { matrix: dtn, symmetry_defect: if scale > 0.0 { defect / scale } else { 0.0 } })
}

/// A mesh reduced to its boundary: DtN matrix, lumped mass and dof order.
#[derive(Debug, Clone)]
pub struct DtnProblem {
    /// Boundary dofs in boundary-loop order.
    pub boundary: Vec<usize>,
    /// Representative raw vertex of each boundary entry.
    pub boundary_vertices: Vec<usize>,
    /// Lumped mass of each boundary entry.
    pub mass: Vec<f64>,
    pub dtn: DtnOperator,
}

impl DtnProblem {
    pub fn new(mesh: &SurfaceMesh) -> Result<Self> {
        let li = mesh.logical_index();
        let boundary = boundary_dofs(mesh, &li);
        if boundary.is_empty() {
            return Err(invalid("mesh has no boundary"));
        }
        let stiffness = assemble_stiffness(mesh)?;
        let mass_all = assemble_boundary_mass(mesh);
        let mass: Vec<f64> = boundary.iter().map(|&d| mass_all.get(d, d)).collect();
        if mass.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::Assembly("boundary vertex without positive mass".into()));
        }
        let dtn = schur_dtn(&stiffness, &boundary)?;
        let boundary_vertices = boundary.iter().map(|&d| li.dof_rep[d]).collect();
        Ok(DtnProblem { boundary, boundary_vertices, mass, dtn })
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary.len()
    }

    /// Total lumped mass, which equals the boundary length.
    pub fn boundary_length(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `fᵀ D f / fᵀ M f` for a boundary trace in boundary order.
    pub fn rayleigh_quotient(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.n_boundary() {
            return Err(invalid(format!("trace has {} entries, expected {}", f.len(), self.n_boundary())));
        }
        let den: f64 = f.iter().zip(&self.mass).map(|(x, m)| m * x * x).sum();
        if !(den > 0.0) {
            return Err(invalid("trace has zero boundary norm"));
        }
        let d = &self.dtn.matrix;
        let mut num = 0.0;
        for j in 0..f.len() {
            let mut s = 0.0;
            for i in 0..f.len() {
                s += d[(i, j)] * f[i];
            }
            num += s * f[j];
        }
        Ok(num / den)
    }

    /// The `count` smallest eigenpairs of `D u = σ M u`, traces normalized to
    /// unit boundary `L²` norm.
    pub fn spectrum(&self, count: usize) -> Result<Spectrum> {
        let nb = self.n_boundary();
        if count == 0 || count > nb {
            return Err(invalid(format!("count must lie in 1..={nb}, got {count}")));
        }
        faer::set_global_parallelism(Par::Seq);
        let s: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let d = &self.dtn.matrix;
        let c = Mat::<f64>::from_fn(nb, nb, |i, j| s[i] * d[(i, j)] * s[j]);
        let evd = c
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let (vals, vecs) = (evd.S(), evd.U());
        let top = vals[nb - 1].abs().max(1.0);
        let mut eigenvalues = Vec::with_capacity(count);
        let mut traces = Vec::with_capacity(count);
        for k in 0..count {
            let mut sigma = vals[k];
            if sigma < 0.0 && sigma > -1e-12 * top {
                sigma = 0.0;
            }
            let u: Vec<f64> = (0..nb).map(|i| s[i] * vecs[(i, k)]).collect();
            let res = self.residual(&u, sigma);
            if !(res <= RESIDUAL_TOL) {
                return Err(Error::Eigen(format!("eigenpair {k} has relative residual {res:e}")));
            }
            let norm = u.iter().zip(&self.mass).map(|(x, m)| m * x * x).sum::<f64>().sqrt();
            eigenvalues.push(sigma);
            traces.push(u.iter().map(|x| x / norm).collect());
        }
        let mut sp = Spectrum::new(eigenvalues, self.boundary_length(), FEM_CLUSTER_TOL);
        sp.eigenvectors = Some(traces);
        Ok(sp)
    }

    /// `‖D u − σ M u‖ / ‖M u‖`.
    pub fn residual(&self, u: &[f64], sigma: f64) -> f64 {
        let d = &self.dtn.matrix;
        let nb = u.len();
        let mut r2 = 0.0;
        let mut m2 = 0.0;
        for i in 0..nb {
            let mut du = 0.0;
            for j in 0..nb {
                du += d[(i, j)] * u[j];
            }
            let mu = self.mass[i] * u[i];
            r2 += (du - sigma * mu).powi(2);
            m2 += mu * mu;
        }
        (r2 / m2).sqrt()
    }
}

/// Smallest `count` Steklov eigenvalues (σ₀ first) with boundary traces.
pub fn steklov_spectrum(mesh: &SurfaceMesh, count: usize) -> Result<Spectrum> {
    DtnProblem::new(mesh)?.spectrum(count)
}

/// Rayleigh quotient of a boundary trace given in boundary-loop order.
pub fn rayleigh_quotient(mesh: &SurfaceMesh, f: &[f64]) -> Result<f64> {
    DtnProblem::new(mesh)?.rayleigh_quotient(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{boundary_length, build_cylinder_mesh, build_disk_mesh};

    #[test]
    fn equilateral_triangle_weights() {
        let h = 3f64.sqrt() / 2.0;
        let m = SurfaceMesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.5, h]], vec![[0, 1, 2]], vec![], vec![1.0; 3]).unwrap();
        let a = assemble_stiffness(&m).unwrap();
        let w = 0.5 / 3f64.sqrt();
        for i in 0..3 {
            assert!((a.get(i, i) - 2.0 * w).abs() < 1e-15);
            for j in 0..3 {
                if i != j {
                    assert!((a.get(i, j) + w).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn stiffness_kills_constants_and_mass_sums_to_length() {
        let m = build_disk_mesh(0.1).unwrap();
        let a = assemble_stiffness(&m).unwrap();
        let ones = vec![1.0; a.dim()];
        let r = a.mul_vec(&ones);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
        let mass = assemble_boundary_mass(&m);
        assert!((mass.trace() - boundary_length(&m)).abs() < 1e-12);
    }

    #[test]
    fn dtn_annihilates_constants() {
        let m = build_cylinder_mesh(1.0, 1.0, 0.2).unwrap();
        let p = DtnProblem::new(&m).unwrap();
        assert!(p.dtn.symmetry_defect < 1e-12);
        let rq = p.rayleigh_quotient(&vec![1.0; p.n_boundary()]).unwrap();
        assert!(rq.abs() < 1e-10);
    }

    #[test]
    fn count_out_of_range_is_rejected() {
        let m = build_disk_mesh(0.3).unwrap();
        let p = DtnProblem::new(&m).unwrap();
        assert!(p.spectrum(p.n_boundary() + 1).is_err());
        assert!(p.spectrum(0).is_err());
    }
}
