use proptest::prelude::*;

use steklov::acceptance::dtn_health;
use steklov::closed_form::{cylinder_spectrum, disk_spectrum, mobius_spectrum, weighted_mobius_spectrum};
use steklov::dtn::steklov_spectrum;
use steklov::geometry::{build_cylinder_mesh, build_mobius_mesh, build_weighted_mobius_mesh};
use steklov::spectrum::{merge_spectra, Spectrum, EXACT_CLUSTER_TOL};

fn spectrum() -> impl Strategy<Value = Spectrum> {
    (prop::collection::vec(0.0..50.0f64, 0..8), 0.1..20.0f64)
        .prop_map(|(v, l)| Spectrum::new(v, l, EXACT_CLUSTER_TOL))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_is_associative_and_commutative(a in spectrum(), b in spectrum(), c in spectrum()) {
        let left = merge_spectra(&[merge_spectra(&[a.clone(), b.clone()]), c.clone()]);
        let right = merge_spectra(&[a.clone(), merge_spectra(&[b.clone(), c.clone()])]);
        prop_assert_eq!(&left.eigenvalues, &right.eigenvalues);
        prop_assert!((left.boundary_length - right.boundary_length).abs() <= 1e-12 * left.boundary_length);
        let ab = merge_spectra(&[a.clone(), b.clone()]);
        let ba = merge_spectra(&[b.clone(), a.clone()]);
        prop_assert_eq!(ab.eigenvalues, ba.eigenvalues);
        prop_assert_eq!(merge_spectra(&[a.clone(), Spectrum::empty()]).eigenvalues, a.eigenvalues.clone());
    }

    #[test]
    fn merged_spectrum_is_sorted_with_summed_length(a in spectrum(), b in spectrum()) {
        let m = merge_spectra(&[a.clone(), b.clone()]);
        prop_assert_eq!(m.len(), a.len() + b.len());
        prop_assert!(m.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((m.boundary_length - a.boundary_length - b.boundary_length).abs() < 1e-12);
        for k in 0..m.len() {
            prop_assert!((m.sigma_bar(k) - m.sigma(k) * m.boundary_length).abs() <= 1e-12 * m.sigma_bar(k).max(1.0));
        }
    }

    #[test]
    fn density_scales_closed_forms(t in 0.05..10.0f64, rho in 0.1..10.0f64) {
        let unit = cylinder_spectrum(t, 1.0, 9).unwrap();
        let weighted = cylinder_spectrum(t, rho, 9).unwrap();
        let wm = weighted_mobius_spectrum(t, rho, 9).unwrap();
        let um = mobius_spectrum(t, 9).unwrap();
        for k in 0..9 {
            prop_assert!((weighted.sigma(k) * rho - unit.sigma(k)).abs() <= 1e-12 * unit.sigma(k).max(1.0));
            prop_assert!((weighted.sigma_bar(k) - unit.sigma_bar(k)).abs() <= 1e-10 * unit.sigma_bar(k).max(1.0));
            prop_assert!((wm.sigma_bar(k) - um.sigma_bar(k)).abs() <= 1e-10 * um.sigma_bar(k).max(1.0));
        }
        let d = disk_spectrum(rho, 5).unwrap();
        prop_assert!((d.sigma_bar(1) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn dtn_is_symmetric_semidefinite_with_constant_kernel(t in 0.3..3.0f64, mobius in any::<bool>()) {
        let mesh = if mobius { build_mobius_mesh(t, 0.2).unwrap() } else { build_cylinder_mesh(t, 1.0, 0.2).unwrap() };
        let (kernel, lowest, sym) = dtn_health(&mesh).unwrap();
        prop_assert!(kernel <= 1e-10, "kernel {}", kernel);
        prop_assert!(lowest >= -1e-12, "lowest {}", lowest);
        prop_assert!(sym <= 1e-12, "symmetry {}", sym);
    }

    #[test]
    fn fem_normalized_spectrum_ignores_constant_density(t in 0.3..2.0f64, rho in 0.2..5.0f64) {
        let a = steklov_spectrum(&build_mobius_mesh(t, 0.15).unwrap(), 6).unwrap();
        let b = steklov_spectrum(&build_weighted_mobius_mesh(t, rho, 0.15).unwrap(), 6).unwrap();
        for k in 1..6 {
            prop_assert!((a.sigma_bar(k) - b.sigma_bar(k)).abs() <= 1e-9 * a.sigma_bar(k));
            prop_assert!((a.sigma(k) - rho * b.sigma(k)).abs() <= 1e-9 * a.sigma(k));
        }
    }
}
