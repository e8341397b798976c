//! One test, and one result line, per acceptance criterion.

use steklov::acceptance::criteria;

fn check(id: usize) {
    let c = criteria().into_iter().find(|c| c.id == id).expect("criterion exists");
    let o = c.run();
    println!("[{}] criterion {:>2}: {} ({:.1} s) -- {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.seconds, o.detail);
    assert!(o.pass, "criterion {id} ({}) failed: {}", o.name, o.detail);
}

macro_rules! criterion_tests {
    ($($name:ident = $id:literal;)+) => {$(
        #[test]
        fn $name() {
            check($id);
        }
    )+};
}

criterion_tests! {
    criterion_01_constants = 1;
    criterion_02_annulus_suprema = 2;
    criterion_03_mobius_suprema = 3;
    criterion_04_fem_matches_exact_spectra = 4;
    criterion_05_critical_catenoid = 5;
    criterion_06_boundary_neck_degeneration = 6;
    criterion_07_interior_neck_degeneration = 7;
    criterion_08_sharpness = 8;
    criterion_09_glued_beats_invariant = 9;
    criterion_10_cutoff_energy = 10;
    criterion_11_upper_bounds = 11;
    criterion_12_invariants = 12;
}

#[test]
fn every_criterion_has_a_test() {
    let ids: Vec<usize> = criteria().iter().map(|c| c.id).collect();
    assert_eq!(ids, (1..=12).collect::<Vec<_>>());
}
