//! Property tests over random parameters.

use nalgebra::DMatrix;
use pphi2::fock::{gibbs_exponent, GibbsSpec};
use pphi2::lattice::{dense_green_oracle, CylinderLattice, Dispersion, SpectralCovariance};
use pphi2::measure::window_weights;
use pphi2::oracles::{cov_mixed_sharp_time, cov_thermal_c0, cov_thermal_c0_coth, in_scaled_cone, in_v_beta, DispersionParams};
use pphi2::stats::{Estimate, EstimateMethod};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_green_matches_dense(na in 2usize..5, nx in 2usize..5, beta in 0.5f64..3.0, l in 0.5f64..3.0, m in 0.2f64..2.0) {
        let lat = CylinderLattice::new(beta, l, 2 * na, 2 * nx, m, Dispersion::LatticeLaplacian).unwrap();
        let cov = SpectralCovariance::new(&lat);
        let k = cov.green_kernel();
        let d = dense_green_oracle(&lat).unwrap();
        let n = lat.n_x;
        for a in 0..lat.sites() {
            let b = (a * 7 + 3) % lat.sites();
            let s = cov.green_from_kernel(&k, (a / n, a % n), (b / n, b % n));
            prop_assert!((s - d[(a, b)]).abs() < 1e-10);
        }
    }

    #[test]
    fn thermal_forms_agree(beta in 0.1f64..10.0, m in 0.05f64..5.0, k in -50.0f64..50.0, t in 0.0f64..1.0) {
        let p = DispersionParams::new(beta, m).unwrap();
        let a = cov_thermal_c0(k, &p);
        prop_assert!((a - cov_thermal_c0_coth(k, &p)).abs() <= 1e-13 * a);
        let d = t * beta;
        let x = cov_mixed_sharp_time(d, k, &p).unwrap();
        let y = cov_mixed_sharp_time(beta - d, k, &p).unwrap();
        prop_assert!((x - y).abs() <= 1e-13 * x);
        prop_assert!(x <= a * (1.0 + 1e-14));
    }

    #[test]
    fn scaled_cones_are_nested(a in -1.0f64..2.0, b in -1.5f64..1.5, lambda in 0.05f64..1.0) {
        if in_scaled_cone((a, b), lambda, 1.0) {
            prop_assert!(in_v_beta((a, b), 1.0));
            prop_assert!(in_scaled_cone((a, b), (lambda + 1.0) / 2.0, 1.0));
        }
    }

    #[test]
    fn window_has_exact_volume(n in 2usize..40, l_frac in 0.01f64..1.0) {
        let lat = CylinderLattice::new(1.0, 3.0, 4, 2 * n, 1.0, Dispersion::LatticeLaplacian).unwrap();
        let l = 3.0 * l_frac;
        let w = window_weights(&lat, l);
        prop_assert!((w.iter().sum::<f64>() * lat.a_x() - 2.0 * l).abs() < 1e-10);
        prop_assert!(w.iter().all(|&v| (0.0..=1.0 + 1e-12).contains(&v)));
    }

    #[test]
    fn gibbs_exponent_is_smallest_even(gap in 0.001f64..1.0) {
        let p = gibbs_exponent(gap).unwrap();
        prop_assert!(p % 2 == 0 && 1.0 / p as f64 <= gap);
        prop_assert!(p == 2 || 1.0 / (p - 2) as f64 > gap);
    }

    #[test]
    fn gibbs_norm_of_identity_is_one(dim in 2usize..12, beta in 0.1f64..4.0, p in 1usize..5, seed in any::<u64>()) {
        let mut s = seed;
        let h = DMatrix::from_fn(dim, dim, |i, j| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407 + (i * dim + j) as u64);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        });
        let spec = GibbsSpec::new((&h + h.transpose()) * 0.5, beta).unwrap();
        let n = spec.norm(&DMatrix::identity(dim, dim), 2 * p);
        prop_assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_agreement_is_symmetric(a in -5.0f64..5.0, b in -5.0f64..5.0, ea in 0.0f64..2.0, eb in 0.0f64..2.0) {
        let x = Estimate { value: a, std_error: ea, n_eff: 10.0, method: EstimateMethod::Metropolis };
        let y = Estimate { value: b, std_error: eb, n_eff: 10.0, method: EstimateMethod::Reweighting };
        prop_assert_eq!(x.agrees_with(&y, 3.0), y.agrees_with(&x, 3.0));
        prop_assert!((x.pull(&y) - y.pull(&x)).abs() < 1e-12);
    }
}
