//! Library results against oracles written independently here.

use std::collections::HashMap;
use std::f64::consts::PI;

use steklov::closed_form::{
    cylinder_spectrum, invariant_supremum, mobius_spectrum, t_1_0, t_k, t_k_1, SurfaceKind,
};
use steklov::dtn::DtnProblem;
use steklov::geometry::{build_cylinder_mesh, build_disk_mesh, SurfaceMesh};

fn newton(f: impl Fn(f64) -> f64, mut x: f64) -> f64 {
    for _ in 0..100 {
        let h = 1e-7 * x.abs().max(1e-3);
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        let step = f(x) / d;
        x -= step;
        if step.abs() < 1e-16 * x.abs() {
            break;
        }
    }
    x
}

#[test]
fn roots_agree_with_newton() {
    let coth = |t: f64| 1.0 / t.tanh();
    assert!((t_1_0() - newton(|t| t - coth(t), 1.2)).abs() < 1e-12);
    for k in 2..=10u32 {
        let kf = k as f64;
        let guess = t_k_1(k).unwrap();
        let oracle = newton(|t| kf * (kf * t).tanh() - coth(t), 0.9 / kf);
        assert!((guess - oracle).abs() < 1e-12, "T_{k}_1: {guess} vs {oracle}");
    }
    for k in 1..=10u32 {
        let kf = k as f64;
        let oracle = newton(|t| kf * (kf * t).tanh() - 1.2 / t, 1.37 / kf);
        assert!((t_k(k).unwrap() - oracle).abs() < 1e-12);
    }
}

/// Every separated solution on `[0,T] × S¹` with Fourier mode up to 40, sorted.
fn brute_cylinder(t: f64) -> Vec<f64> {
    let mut v = vec![0.0, 2.0 / t];
    for n in 1..=40 {
        let n = n as f64;
        for s in [n * (n * t / 2.0).tanh(), n / (n * t / 2.0).tanh()] {
            v.push(s);
            v.push(s);
        }
    }
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn cylinder_spectrum_matches_enumeration() {
    for t in [0.1, 0.7, 2.0 * t_1_0(), 3.0, 20.0] {
        let s = cylinder_spectrum(t, 1.0, 30).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(brute_cylinder(t)) {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0), "T = {t}");
        }
        assert!((s.boundary_length - 4.0 * PI).abs() < 1e-12);
    }
}

#[test]
fn mobius_spectrum_matches_enumeration() {
    // odd modes satisfy the Neumann-type condition, even modes the Dirichlet-type one
    for t in [0.3, 0.65848, 1.7] {
        let mut v = vec![0.0];
        for n in 1..=40 {
            let n = n as f64;
            let s = if (n as u32).is_multiple_of(2) { n * (n * t).tanh() } else { n / (n * t).tanh() };
            v.extend([s, s]);
        }
        v.sort_by(f64::total_cmp);
        let s = mobius_spectrum(t, 20).unwrap();
        for (a, b) in s.eigenvalues.iter().zip(&v) {
            assert!((a - b).abs() <= 1e-12 * b.max(1.0));
        }
    }
}

fn grid_max(surface: SurfaceKind, k: usize) -> f64 {
    let l = match surface {
        SurfaceKind::Cylinder => 4.0 * PI,
        SurfaceKind::Mobius => 2.0 * PI,
    };
    let value = |t: f64| {
        let s = match surface {
            SurfaceKind::Cylinder => cylinder_spectrum(t, 1.0, k + 1).unwrap(),
            SurfaceKind::Mobius => mobius_spectrum(t, k + 1).unwrap(),
        };
        s.sigma(k) * l
    };
    let best = |lo: f64, hi: f64| {
        (0..20000)
            .map(|i| {
                let t = lo * (hi / lo).powf(i as f64 / 19999.0);
                (value(t), t)
            })
            .fold((0.0, lo), |a, b| if b.0 > a.0 { b } else { a })
    };
    // a coarse log grid, then a fine one around its best point
    let (_, t) = best(1e-2, 1e2);
    best(t * 0.999, t * 1.001).0
}

#[test]
fn suprema_dominate_a_fine_grid() {
    for surface in [SurfaceKind::Cylinder, SurfaceKind::Mobius] {
        for k in 1..=5 {
            let sup = invariant_supremum(surface, k).unwrap().value;
            let g = grid_max(surface, k);
            assert!(g <= sup + 1e-9 && g >= sup * (1.0 - 1e-6), "{surface:?} k={k}: grid {g}, sup {sup}");
        }
    }
}

/// P1 cotangent stiffness assembled densely from scratch.
fn dense_stiffness(mesh: &SurfaceMesh) -> (Vec<Vec<f64>>, Vec<usize>) {
    let li = mesh.logical_index();
    let n = li.n_dofs();
    let mut a = vec![vec![0.0; n]; n];
    for t in &mesh.triangles {
        let p = t.map(|v| mesh.vertices[v]);
        let area2 = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
        for i in 0..3 {
            for j in 0..3 {
                // ∇φ_i · ∇φ_j · area, from the edge vectors opposite i and j
                let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
                let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
                let ei = [p[i2][0] - p[i1][0], p[i2][1] - p[i1][1]];
                let ej = [p[j2][0] - p[j1][0], p[j2][1] - p[j1][1]];
                a[li.dof[t[i]]][li.dof[t[j]]] += (ei[0] * ej[0] + ei[1] * ej[1]) / (2.0 * area2.abs());
            }
        }
    }
    (a, li.dof)
}

fn schur(a: &[Vec<f64>], boundary: &[usize]) -> Vec<Vec<f64>> {
    let n = a.len();
    let is_b: HashMap<usize, usize> = boundary.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let interior: Vec<usize> = (0..n).filter(|d| !is_b.contains_key(d)).collect();
    let ni = interior.len();
    let nb = boundary.len();
    // solve A_ii X = A_ib by Gaussian elimination on the augmented system
    let mut m: Vec<Vec<f64>> = interior
        .iter()
        .map(|&r| interior.iter().map(|&c| a[r][c]).chain(boundary.iter().map(|&c| a[r][c])).collect())
        .collect();
    for col in 0..ni {
        let piv = (col..ni).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, piv);
        let pivot = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            let f = row[col] / pivot[col];
            if r != col && f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    (0..nb)
        .map(|i| {
            (0..nb)
                .map(|j| {
                    let mut s = a[boundary[i]][boundary[j]];
                    for (r, &ir) in interior.iter().enumerate() {
                        s -= a[boundary[i]][ir] * m[r][ni + j] / m[r][r];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

#[test]
fn dtn_matches_dense_schur_complement() {
    for mesh in [build_disk_mesh(0.25).unwrap(), build_cylinder_mesh(0.8, 1.0, 0.3).unwrap()] {
        let p = DtnProblem::new(&mesh).unwrap();
        let (a, _) = dense_stiffness(&mesh);
        let d = schur(&a, &p.boundary);
        let scale = d.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert!((p.dtn.matrix[(i, j)] - x).abs() <= 1e-10 * scale, "({i},{j})");
            }
        }
    }
}

#[test]
fn linear_mode_is_reproduced_exactly() {
    // the harmonic function linear in the height is in the P1 space
    let t = 1.3;
    let mesh = build_cylinder_mesh(t, 1.0, 0.1).unwrap();
    let p = DtnProblem::new(&mesh).unwrap();
    let f: Vec<f64> = p.boundary_vertices.iter().map(|&v| if mesh.vertices[v][0] > 0.5 * t { 1.0 } else { -1.0 }).collect();
    let r = p.rayleigh_quotient(&f).unwrap();
    assert!((r - 2.0 / t).abs() < 1e-10, "{r}");
    assert!((p.boundary_length() - 4.0 * PI).abs() < 1e-10);
}

#[test]
fn harmonic_coordinate_has_quotient_near_one() {
    let mesh = build_disk_mesh(0.05).unwrap();
    let p = DtnProblem::new(&mesh).unwrap();
    let f: Vec<f64> = p.boundary_vertices.iter().map(|&v| mesh.vertices[v][0]).collect();
    let r = p.rayleigh_quotient(&f).unwrap();
    assert!((r - 1.0).abs() < 5e-3, "{r}");
}
