use std::f64::consts::PI;

use steklov::closed_form::critical_catenoid_metric;
use steklov::geometry::io::to_off;
use steklov::geometry::{
    boundary_length, boundary_loop_lengths, build_cylinder_mesh, build_disk_mesh, build_mesh, build_mobius_mesh,
    build_weighted_disk_mesh, disk_chain_pairs, glue_boundary, glue_interior, validate_mesh, AngularDensity,
    GluingConfig, MetricSpec, Site, SurfaceMesh,
};

fn topology(m: &SurfaceMesh) -> (i64, usize, usize) {
    assert!(validate_mesh(m).is_clean(), "{:?}", validate_mesh(m));
    (m.euler_characteristic(), m.boundary_loops.len(), m.n_components())
}

#[test]
fn builders_have_the_expected_topology() {
    assert_eq!(topology(&build_disk_mesh(0.1).unwrap()), (1, 1, 1));
    assert_eq!(topology(&build_cylinder_mesh(1.0, 1.0, 0.1).unwrap()), (0, 2, 1));
    assert_eq!(topology(&build_mobius_mesh(1.0, 0.1).unwrap()), (0, 1, 1));
}

#[test]
fn boundary_lengths_follow_the_density() {
    let disk = build_disk_mesh(0.02).unwrap();
    assert!((boundary_length(&disk) - 2.0 * PI).abs() < 1e-3);
    let cyl = build_mesh(&critical_catenoid_metric(), 0.05).unwrap();
    let t10 = steklov::closed_form::t_1_0();
    assert!((boundary_length(&cyl) - 4.0 * PI / t10).abs() < 1e-9);
    let mob = build_mobius_mesh(0.7, 0.1).unwrap();
    assert!((boundary_loop_lengths(&mob)[0] - 2.0 * PI).abs() < 1e-9);
    let field = AngularDensity::LogFourier { scale: 1.0, cos: vec![0.2, -0.1], sin: vec![0.0, 0.15] };
    let w = build_weighted_disk_mesh(&field, 0.02).unwrap();
    assert!((boundary_length(&w) - field.circle_length()).abs() < 2e-3 * field.circle_length());
}

#[test]
fn glued_chains_are_disks() {
    for k in 2..=4 {
        let comps = vec![MetricSpec::unit_disk(); k];
        let g = glue_boundary(&comps, &GluingConfig::new(disk_chain_pairs(k), 0.05, 0.08)).unwrap();
        assert_eq!(topology(&g.mesh), (1, 1, 1), "k = {k}");
        let l = boundary_length(&g.mesh);
        assert!((l - 2.0 * PI * k as f64).abs() < 0.02 * l);
        assert!(g.neck_triangles.len() == k - 1);
    }
}

#[test]
fn interior_neck_makes_an_annulus() {
    let comps = vec![MetricSpec::unit_disk(); 2];
    let pairs = vec![(Site::interior(0, [0.1, -0.2]), Site::interior(1, [0.0, 0.3]))];
    let g = glue_interior(&comps, &GluingConfig::new(pairs, 1e-3, 0.08)).unwrap();
    assert_eq!(topology(&g.mesh), (0, 2, 1));
}

#[test]
fn catenoid_and_disk_glue_along_a_boundary_circle() {
    let comps = vec![critical_catenoid_metric(), MetricSpec::unit_disk()];
    let pairs = vec![(Site::boundary(0, 1, PI), Site::boundary(1, 0, 0.0))];
    let g = glue_boundary(&comps, &GluingConfig::new(pairs, 0.05, 0.08)).unwrap();
    assert_eq!(topology(&g.mesh), (0, 2, 1));
}

#[test]
fn bad_gluing_is_rejected() {
    let comps = vec![MetricSpec::unit_disk(); 3];
    let overlapping = vec![
        (Site::boundary(0, 0, 0.0), Site::boundary(1, 0, 0.0)),
        (Site::boundary(0, 0, 0.1), Site::boundary(2, 0, 0.0)),
    ];
    assert!(glue_boundary(&comps, &GluingConfig::new(overlapping, 0.2, 0.05)).is_err());
    let missing = vec![(Site::boundary(0, 0, 0.0), Site::boundary(5, 0, 0.0))];
    assert!(glue_boundary(&comps, &GluingConfig::new(missing, 0.05, 0.05)).is_err());
    let on_boundary = vec![(Site::interior(0, [0.99, 0.0]), Site::interior(1, [0.0, 0.0]))];
    assert!(glue_interior(&comps, &GluingConfig::new(on_boundary, 0.05, 0.05)).is_err());
}

#[test]
fn off_export_counts() {
    let m = build_mobius_mesh(0.5, 0.2).unwrap();
    let off = to_off(&m);
    let mut lines = off.lines();
    assert_eq!(lines.next(), Some("OFF"));
    let counts: Vec<usize> = lines.next().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(counts[..2], [m.vertices.len(), m.triangles.len()]);
    assert_eq!(off.lines().count(), 2 + m.vertices.len() + m.triangles.len());
}
