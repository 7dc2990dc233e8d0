//! Real-time side: KMS boundary values, tube classification, quasi-free
//! n-point functions and the truncated circle Hamiltonian.

use num_complex::Complex64;
use pphi2::continuation::{
    default_kms_grid, holomorphy_probe, kms_boundary_check, quasi_free_npoint, spectral_support_fock,
    spectral_support_free, thermal_wightman_fn, tube_scan, ScanSettings,
};
use pphi2::fock::FockModel;
use pphi2::oracles::{
    free_thermal_wightman, in_jn, in_relativistic_tube, DispersionParams, QuadSpec, RegionSpec, TubePoint,
};
use pphi2::wick::{WickLabel, WickPolynomial};
use pphi2::Error;
use rand::{Rng, SeedableRng};

fn params(beta: f64) -> DispersionParams {
    DispersionParams::new(beta, 1.0).unwrap()
}

#[test]
fn kms_boundary_at_beta_two() {
    let r = kms_boundary_check(&params(2.0), &default_kms_grid(), &QuadSpec::default()).unwrap();
    assert_eq!(r.rows.len(), 100);
    assert!(r.max_deviation < 1e-8, "{}", r.max_deviation);
    assert!(r.min_refinement_ratio >= 3.0, "{}", r.min_refinement_ratio);
}

#[test]
fn tube_scan_at_beta_two_classifies_everything() {
    let p = params(2.0);
    let spec = RegionSpec::new(2.0, vec![1.0]).unwrap();
    let r = tube_scan(&p, &spec, 50, 50, 77, &ScanSettings::default()).unwrap();
    assert_eq!((r.correct, r.total), (100, 100));
    for row in r.rows.iter().filter(|r| r.expected_inside) {
        assert!(row.cr_residual < 1e-6 && row.tail_bound <= 1e-12);
    }
}

#[test]
fn light_like_imaginary_part_is_outside() {
    let p = params(2.0);
    let spec = RegionSpec::new(2.0, vec![1.0]).unwrap();
    for (a, b) in [(0.5, 0.5), (0.5, -0.5), (1.5, 0.5)] {
        let z = TubePoint::from_parts(0.3, -0.2, a, b);
        assert!(!in_relativistic_tube(&[z], &spec).unwrap());
        assert!(matches!(
            free_thermal_wightman(&z, &p, &QuadSpec::default()),
            Err(Error::PointOutsideAnalyticityDomain(_)) | Err(Error::QuadratureTailTooLarge { .. })
        ));
    }
}

#[test]
fn probe_converges_at_random_tube_points() {
    let p = params(2.0);
    let quad = QuadSpec::default();
    let w = thermal_wightman_fn(&p, &quad);
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(50);
    let mut points = Vec::new();
    while points.len() < 50 {
        let a = rng.random_range(0.1..1.9);
        let b = rng.random_range(-0.9..0.9);
        if (a - f64::abs(b)).min(2.0 - a - f64::abs(b)) < 0.1 {
            continue;
        }
        let z = TubePoint::from_parts(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), a, b);
        points.push(vec![z.s, z.y]);
    }
    let r = holomorphy_probe(&w, &points, 1e-4, 1e-6).unwrap();
    assert!(r.converged, "{} {}", r.cr_residual, r.contour_residual);
}

#[test]
fn region_examples() {
    let beta = 1.0;
    let spec = RegionSpec::new(beta, vec![0.5, 0.5]).unwrap();
    let pts = [(0.0, 0.0), (beta / 8.0, beta / 16.0), (beta / 4.0, beta / 8.0)];
    assert!(in_jn(&pts, &spec).unwrap());
    let z = TubePoint::from_parts(0.1, 0.2, beta / 4.0, beta / 8.0);
    assert!(in_relativistic_tube(&[z, z], &spec).unwrap());
    assert!(matches!(in_relativistic_tube(&[z], &spec), Err(Error::LambdaMismatch { .. })));
}

#[test]
fn quasi_free_four_point_is_isserlis_of_two_points() {
    let p = params(2.0);
    let quad = QuadSpec::default();
    let zeta = [
        TubePoint::from_parts(0.3, -0.4, 0.5, 0.1),
        TubePoint::from_parts(-0.2, 0.1, 0.4, -0.1),
        TubePoint::from_parts(0.5, 0.7, 0.6, 0.05),
    ];
    let r = quasi_free_npoint(&zeta, &p, &quad).unwrap();
    assert!(r.max_tail_bound <= quad.tolerance);
    let w = |z: TubePoint| free_thermal_wightman(&z, &p, &quad).unwrap().value;
    let add = |a: &[TubePoint]| {
        a.iter().fold(TubePoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, z| {
            TubePoint::new(acc.s + z.s, acc.y + z.y)
        })
    };
    let w01 = w(zeta[0]);
    let w23 = w(zeta[2]);
    let w02 = w(add(&zeta[0..2]));
    let w13 = w(add(&zeta[1..3]));
    let w03 = w(add(&zeta[0..3]));
    let w12 = w(zeta[1]);
    let expected = w01 * w23 + w02 * w13 + w03 * w12;
    assert!((r.value - expected).norm() < 1e-10 * (1.0 + expected.norm()), "{} vs {}", r.value, expected);
}

#[test]
fn free_spectral_support() {
    let r = spectral_support_free(&params(2.0), 50);
    assert!(r.pass && r.max_dispersion_residual < 1e-12);
}

#[test]
fn fock_spectrum_condition_free_and_quartic() {
    let mut m = FockModel::new(2.0 * std::f64::consts::PI, 1.0, 2, 4).unwrap();
    assert!(spectral_support_fock(&m, 1e-10).unwrap().pass);
    for lambda in [0.05, 0.1] {
        let p = WickPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, lambda], m.truncated_c_beta(), WickLabel::CBeta).unwrap();
        let int = m.build_interaction(&p).unwrap();
        assert!(int.e_c.abs() < 10.0 * lambda, "E_C = {}", int.e_c);
        if lambda == 0.05 {
            assert!(int.vacuum_overlap.powi(2) >= 0.9);
        }
        let r = spectral_support_fock(&m, 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn heavy_field_boundary_values_vanish() {
    let p = DispersionParams::new(2.0, 20.0).unwrap();
    let grid: Vec<(f64, f64)> = default_kms_grid().into_iter().filter(|&(s, y)| s.abs() >= 1.0 && y.abs() >= 1.0).collect();
    let r = kms_boundary_check(&p, &grid, &QuadSpec::default()).unwrap();
    assert!(r.max_deviation < 1e-12);
}
