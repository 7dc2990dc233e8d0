//! Exit-gate acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use pphi2::continuation::{default_kms_grid, kms_boundary_check, tube_scan, ScanSettings};
use pphi2::estimate::{
    default_os_functionals, free_moment_growth, gaussian_profile, moment_growth_check, mode_sum_profile,
    nelson_symmetry_check, os_positivity_gram, sharp_time_two_point_profile, standard_battery,
    NelsonVariant, Reflection, SmearedPoint, SIGMA,
};
use pphi2::fock::{gibbs_holder_check, random_gibbs_trial, BoundHamiltonian, FockModel, GibbsSpec, PhiBound};
use pphi2::lattice::{dense_green_oracle, CylinderLattice, Dispersion, SpectralCovariance};
use pphi2::measure::{
    gaussian_expectations, metropolis_expectations, reweighted_expectations, sweep_stationary_tv, Estimator,
    LocalAction, MeasureSpec, Observable, RunParams,
};
use pphi2::oracles::{
    cov_circle_cbeta, cov_mixed_sharp_time, cov_spatial_circle, cov_thermal_c0, cov_thermal_c0_coth,
    DispersionParams, QuadSpec, RegionSpec,
};
use pphi2::wick::{
    gaussian_moment_factor, wick_power, wick_power_hermite, wick_power_recursive, WickLabel, WickPolynomial,
};
use pphi2::{cli, FieldConfiguration};

type Outcome = pphi2::Result<(bool, String)>;

fn lattice(beta: f64, half_length: f64, na: usize, nx: usize) -> CylinderLattice {
    CylinderLattice::new(beta, half_length, na, nx, 1.0, Dispersion::LatticeLaplacian).unwrap()
}

/// Interacting setup shared by the Monte Carlo criteria: quartic coupling 0.05.
fn quartic_spec(lat: CylinderLattice, l: f64, estimator: Estimator) -> MeasureSpec {
    MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 0.0, 0.0, 0.05], l, estimator).unwrap()
}

fn c1_free_field_exactness() -> Outcome {
    let mut worst = 0.0f64;
    for &(na, nx) in &[(4, 4), (4, 8), (8, 6), (8, 16), (16, 16)] {
        for disp in [Dispersion::LatticeLaplacian, Dispersion::ContinuumModes] {
            let lat = CylinderLattice::new(1.3, 2.1, na, nx, 0.7, disp)?;
            let cov = SpectralCovariance::new(&lat);
            let kernel = cov.green_kernel();
            let dense = dense_green_oracle(&lat)?;
            for a in 0..lat.sites() {
                for b in 0..lat.sites() {
                    let s = cov.green_from_kernel(&kernel, (a / nx, a % nx), (b / nx, b % nx));
                    worst = worst.max((s - dense[(a, b)]).abs());
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("max entrywise deviation {worst:.2e}")))
}

fn c2_covariance_formulas() -> Outcome {
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    for _ in 0..100 {
        let p = DispersionParams::new(rng.random_range(0.2..5.0), rng.random_range(0.1..3.0))?;
        let k = rng.random_range(-10.0..10.0);
        let n = rng.random_range(-20i64..=20);
        let d = rng.random_range(0.0..p.beta);
        worst = worst
            .max(rel(cov_mixed_sharp_time(0.0, k, &p)?, cov_thermal_c0(k, &p)))
            .max(rel(cov_mixed_sharp_time(p.beta, k, &p)?, cov_thermal_c0(k, &p)))
            .max(rel(cov_mixed_sharp_time(d, k, &p)?, cov_mixed_sharp_time(p.beta - d, k, &p)?))
            .max(rel(cov_thermal_c0(k, &p), cov_thermal_c0_coth(k, &p)))
            .max(rel(cov_spatial_circle(0.0, n, &p), cov_circle_cbeta(n, &p)))
            .max(rel(cov_spatial_circle(d, n, &p), cov_spatial_circle(-d, n, &p)));
    }
    Ok((worst <= 1e-14, format!("max relative deviation {worst:.2e} over 100 draws")))
}

fn c3_gaussian_moments() -> Outcome {
    let lat = lattice(1.0, 2.0, 8, 16);
    let cov = SpectralCovariance::new(&lat);
    let c = cov.site_variance;
    let obs: Vec<Box<Observable>> =
        (1..=6).map(|p| Box::new(move |cfg: &FieldConfiguration| cfg.values[0].powi(p)) as Box<Observable>).collect();
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = gaussian_expectations(&refs, &cov, 3, 100_000);
    let mut max_pull = 0.0f64;
    let mut ok = true;
    for (i, e) in est.iter().enumerate() {
        let p = i + 1;
        let exact = gaussian_moment_factor(p) * c.powf(p as f64 / 2.0);
        let pull = (e.value - exact).abs() / e.std_error;
        max_pull = max_pull.max(pull);
        ok &= pull <= SIGMA;
    }
    Ok((ok, format!("max pull {max_pull:.2} sigma for p <= 6 at 1e5 samples")))
}

fn c4_wick_machinery() -> Outcome {
    let mut rng = ChaCha12Rng::seed_from_u64(4);
    let mut worst_impl = 0.0f64;
    for _ in 0..500 {
        let phi = rng.random_range(-3.0..3.0);
        let c = rng.random_range(0.0..2.0);
        let n = rng.random_range(0i64..=12);
        let a = wick_power(phi, c, n)?;
        let scale = 1.0 + a.abs();
        worst_impl = worst_impl
            .max((a - wick_power_hermite(phi, c, n)?).abs() / scale)
            .max((a - wick_power_recursive(phi, c, n)?).abs() / scale);
    }
    let mut worst_round = 0.0f64;
    for _ in 0..100 {
        let mut coefs: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
        coefs[4] = coefs[4].abs() + 0.1;
        let p = WickPolynomial::new(coefs, rng.random_range(0.0..1.0), WickLabel::CFull)?;
        let back = p.rewick(rng.random_range(0.0..1.0), WickLabel::Custom)?.rewick(p.wick_constant, p.label)?;
        for (x, y) in p.coefficients.iter().zip(&back.coefficients) {
            worst_round = worst_round.max((x - y).abs());
        }
    }
    let lat = lattice(1.0, 2.0, 8, 16);
    let cov = SpectralCovariance::new(&lat);
    let c = cov.site_variance;
    let mut obs: Vec<Box<Observable>> = Vec::new();
    let mut exact = Vec::new();
    for n in 1..=4i64 {
        obs.push(Box::new(move |cfg: &FieldConfiguration| wick_power(cfg.values[0], c, n).unwrap()));
        exact.push(0.0);
    }
    for n in 1..=4i64 {
        for m in n..=4i64 {
            obs.push(Box::new(move |cfg: &FieldConfiguration| {
                wick_power(cfg.values[0], c, n).unwrap() * wick_power(cfg.values[0], c, m).unwrap()
            }));
            exact.push(if n == m { pphi2::wick::factorial(n as usize) * c.powi(n as i32) } else { 0.0 });
        }
    }
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = gaussian_expectations(&refs, &cov, 44, 100_000);
    let max_pull = est.iter().zip(&exact).map(|(e, x)| (e.value - x).abs() / e.std_error).fold(0.0, f64::max);
    let ok = worst_impl <= 1e-12 && worst_round <= 1e-12 && max_pull <= SIGMA;
    Ok((
        ok,
        format!("impl {worst_impl:.1e}, rewick round trip {worst_round:.1e}, moments/orthogonality max pull {max_pull:.2}"),
    ))
}

fn c5_interacting_measure() -> Outcome {
    let lat = lattice(1.0, 2.0, 8, 16);
    let battery = standard_battery(&lat);
    let refs: Vec<&Observable> = battery.iter().map(|(_, o)| o.as_ref()).collect();
    let spec = quartic_spec(lat, 1.0, Estimator::Reweighting);
    let rw = reweighted_expectations(&refs, &spec, 5, 100_000)?;
    let run = RunParams { seed: 55, n_sweeps: 52_000, burn_in: 2_000, thin: 2, ..RunParams::default() };
    let mc = metropolis_expectations(&refs, &spec, &run.metropolis())?;
    let mut max_pull = 0.0f64;
    let mut ok = rw.ess >= 100.0;
    for (a, b) in rw.estimates.iter().zip(&mc.estimates) {
        max_pull = max_pull.max(a.pull(b));
        ok &= a.agrees_with(b, SIGMA);
    }
    let action = LocalAction::new((2, 2), (0.5, 0.5), 1.0, vec![1.0; 4], wick_quartic(0.05));
    let grid: Vec<f64> = (0..7).map(|i| -1.5 + 0.5 * i as f64).collect();
    let tv = sweep_stationary_tv(&action, &grid, 400);
    ok &= tv <= 1e-3;
    Ok((
        ok,
        format!(
            "ESS {:.0}, max pull {max_pull:.2} over {} observables, acceptance {:.2}, 2x2 TV {tv:.1e}",
            rw.ess,
            refs.len(),
            mc.acceptance
        ),
    ))
}

fn wick_quartic(lambda: f64) -> WickPolynomial {
    WickPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, lambda], 0.0, WickLabel::Custom).unwrap()
}

/// Quartic coupling 0.05 ordered against the truncated circle constant.
fn circle_quartic(m: &FockModel) -> WickPolynomial {
    WickPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.05], m.truncated_c_beta(), WickLabel::CBeta).unwrap()
}

fn c6_os_positivity() -> Outcome {
    let lat = lattice(1.0, 2.0, 8, 16);
    let mut ok = true;
    let mut parts = Vec::new();
    for estimator in [Estimator::Reweighting, Estimator::Metropolis] {
        let spec = quartic_spec(lat, 1.0, estimator);
        for reflection in [Reflection::AlphaReflection, Reflection::XReflection] {
            let run = RunParams { seed: 6, n_samples: 40_000, ..RunParams::default() };
            let r = os_positivity_gram(&default_os_functionals(&lat, reflection)?, reflection, &spec, &run)?;
            ok &= r.pass;
            parts.push(format!("{estimator:?}/{reflection:?} min eig {:.2e} (noise {:.1e})", r.min_eigenvalue, r.noise));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn c7_kms_periodicity() -> Outcome {
    let lat = lattice(1.0, 2.0, 8, 16);
    let h = gaussian_profile(&lat, 0.0, 0.5);
    let mut worst_free = 0.0f64;
    for i in 0..=20 {
        let d = i as f64 * lat.beta / 20.0;
        let a = mode_sum_profile(&lat, &h, d)?;
        let b = mode_sum_profile(&lat, &h, lat.beta - d)?;
        worst_free = worst_free.max((a - b).abs() / a.abs());
    }
    let spec = quartic_spec(lat, 1.0, Estimator::Reweighting);
    let rows = sharp_time_two_point_profile(&h, &spec, &RunParams { seed: 7, n_samples: 40_000, ..RunParams::default() })?;
    let mut max_pull = 0.0f64;
    for r in &rows {
        if r.asymmetry.std_error > 0.0 {
            max_pull = max_pull.max(r.asymmetry.value.abs() / r.asymmetry.std_error);
        } else {
            max_pull = max_pull.max(if r.asymmetry.value == 0.0 { 0.0 } else { f64::INFINITY });
        }
    }
    Ok((
        worst_free <= 1e-12 && max_pull <= SIGMA,
        format!("free mode sums {worst_free:.1e}, interacting asymmetry max {max_pull:.2} sigma"),
    ))
}

fn c8_nelson_symmetry() -> Outcome {
    let torus = lattice(2.0, 1.0, 8, 8);
    let f: Vec<f64> = (0..torus.sites()).map(|s| ((s * 7 % 11) as f64 - 5.0) / 5.0).collect();
    let g: Vec<f64> = (0..torus.sites()).map(|s| if s % 8 < 3 { 1.0 } else { 0.0 }).collect();
    let run = RunParams { seed: 8, n_samples: 40_000, ..RunParams::default() };
    let exact = nelson_symmetry_check(&f, &g, &MeasureSpec::free(torus, Estimator::Reweighting)?, NelsonVariant::ExactFree, &run)?;
    let interacting = quartic_spec(torus, torus.half_length, Estimator::Reweighting);
    let pair = nelson_symmetry_check(&f, &g, &interacting, NelsonVariant::ReorderedPair, &run)?;
    let asym = lattice(1.0, 1.0, 8, 16);
    let fa: Vec<f64> = (0..asym.sites()).map(|s| ((s * 5 % 13) as f64 - 6.0) / 6.0).collect();
    let ga: Vec<f64> = (0..asym.sites()).map(|s| if s % 16 < 4 { 1.0 } else { 0.0 }).collect();
    let swapped = nelson_symmetry_check(&fa, &ga, &quartic_spec(asym, asym.half_length, Estimator::Reweighting), NelsonVariant::SwappedLattice, &run)?;
    let pulls = |r: &pphi2::estimate::NelsonReport| r.rows.iter().map(|x| x.original.pull(&x.swapped)).fold(0.0, f64::max);
    let exact_dev =
        exact.rows.iter().map(|r| (r.original.value - r.swapped.value).abs()).fold(0.0, f64::max);
    Ok((
        exact.pass && pair.pass && swapped.pass,
        format!(
            "exact free {exact_dev:.1e}, reordered pair max pull {:.2}, swapped lattice max pull {:.2}",
            pulls(&pair),
            pulls(&swapped)
        ),
    ))
}

fn c9_kms_boundary() -> Outcome {
    let p = DispersionParams::new(1.0, 1.0)?;
    let r = kms_boundary_check(&p, &default_kms_grid(), &QuadSpec::default())?;
    Ok((
        r.max_deviation < 1e-8 && r.rows.len() == 100,
        format!("max deviation {:.2e} on {} nodes, refinement ratio {:.2}", r.max_deviation, r.rows.len(), r.min_refinement_ratio),
    ))
}

fn c10_tube_scan() -> Outcome {
    let p = DispersionParams::new(1.0, 1.0)?;
    let spec = RegionSpec::new(1.0, vec![1.0])?;
    let r = tube_scan(&p, &spec, 50, 50, 10, &ScanSettings::default())?;
    let max_cr = r.rows.iter().filter(|x| x.expected_inside).map(|x| x.cr_residual).fold(0.0, f64::max);
    Ok((r.correct == 100 && r.total == 100, format!("{}/{} correct, max inside CR residual {max_cr:.1e}", r.correct, r.total)))
}

fn c11_spectrum_condition() -> Outcome {
    let mut m = FockModel::new(2.0 * std::f64::consts::PI, 1.0, 2, 4)?;
    m.build_interaction(&circle_quartic(&m))?;
    let r = m.spectrum_condition(1e-10)?;
    Ok((r.pass, format!("{} of {} joint eigenvalues retained, {} violations, min E-|p| {:.2e}", r.retained, r.states, r.violations, r.min_margin)))
}

fn c12_phi_bounds() -> Outcome {
    let mut m = FockModel::new(2.0 * std::f64::consts::PI, 1.0, 2, 4)?;
    m.build_interaction(&circle_quartic(&m))?;
    let mut rng = ChaCha12Rng::seed_from_u64(12);
    let gs: Vec<Vec<f64>> =
        (0..20).map(|_| (0..m.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut found = 0;
    let mut total = 0;
    let (mut max_c1, mut max_c2) = (0.0f64, 0.0f64);
    for eps in [0.0, 0.5, 1.0] {
        for which in [BoundHamiltonian::Free, BoundHamiltonian::Interacting] {
            for g in &gs {
                total += 1;
                if let Ok(r) = PhiBound::new(&m, g, eps, which)?.find_constants(1e-10) {
                    found += 1;
                    max_c1 = max_c1.max(r.c1);
                    max_c2 = max_c2.max(r.c2);
                }
            }
        }
    }
    // Linear form with the H^{-1} norm.
    let mut linear = 0;
    for g in &gs {
        if PhiBound::with_power(&m, g, 1.0, 1.0, BoundHamiltonian::Interacting)?.find_constants(1e-10).is_ok() {
            linear += 1;
        }
    }
    Ok((
        found == total && linear == gs.len(),
        format!("constants found {found}/{total} (max c1 {max_c1}, c2 {max_c2}), linear form {linear}/{}", gs.len()),
    ))
}

fn c13_gibbs_holder() -> Outcome {
    let mut rng = ChaCha12Rng::seed_from_u64(13);
    let mut violations = 0;
    for _ in 0..200 {
        let (spec, a, z) = random_gibbs_trial(&mut rng, 40)?;
        if !gibbs_holder_check(&spec, &a, &z)?.pass {
            violations += 1;
        }
    }
    let x = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
    let spec = GibbsSpec::new((&x + x.transpose()) * 0.5, 1.0)?;
    let id = DMatrix::identity(6, 6);
    let r = gibbs_holder_check(&spec, &[id.clone(), id.clone(), id], &[0.25, 0.4])?;
    let equality = (r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12;
    Ok((violations == 0 && equality, format!("{violations} violations in 200 trials, identity lhs {:.15} rhs {:.15}", r.lhs, r.rhs)))
}

fn c14_moment_growth() -> Outcome {
    let lat = lattice(1.0, 2.0, 8, 16);
    let h = gaussian_profile(&lat, 0.0, 0.5);
    let p_list = [2, 4, 6, 8];
    let point = SmearedPoint::at_slice(&lat, 0, h.clone())?;
    let free_var = pphi2::estimate::free_npoint(&SpectralCovariance::new(&lat), &[point.clone(), point]);
    let free = free_moment_growth(free_var, &p_list);
    let spec = quartic_spec(lat, 1.0, Estimator::Reweighting);
    let rows = moment_growth_check(&h, &p_list, &spec, &RunParams { seed: 14, n_samples: 40_000, ..RunParams::default() })?;
    let ok = free.iter().all(|r| r.pass) && rows.iter().all(|r| r.pass);
    let ratios: Vec<String> = rows.iter().map(|r| format!("p={} {:.3}", r.p, r.estimate.value / r.bound)).collect();
    Ok((ok, format!("interacting moment/bound: {}", ratios.join(", "))))
}

fn c15_reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(pphi2::Error::from)?;
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "seed = 15\n[lattice]\nbeta = 1.0\nhalf_length = 2.0\nn_alpha = 8\nn_x = 16\nmass = 1.0\n\
         [measure]\nP = [0, 0, 0, 0, 0.05]\nl = 1.0\nn_samples = 4000\nsweeps = 4000\nburn_in = 500\n\
         [battery]\nchecks = [\"green\", \"moments\", \"estimators\", \"os\", \"periodicity\"]\n",
    )?;
    let mut outputs = Vec::new();
    for (k, threads) in [(0, 1), (1, 4)] {
        let out = dir.path().join(format!("out{k}"));
        let args = ["pphi2", "battery", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", &threads.to_string()];
        let code = cli::main_with_args(args.iter().map(|s| s.to_string()));
        if code == 2 {
            return Ok((false, format!("battery run exited with {code}")));
        }
        outputs.push(std::fs::read(out.join("results.csv"))?);
    }
    Ok((outputs[0] == outputs[1] && !outputs[0].is_empty(), format!("{} bytes, identical across thread counts", outputs[0].len())))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("free-field exactness", c1_free_field_exactness),
        ("covariance formulas", c2_covariance_formulas),
        ("Gaussian moment law", c3_gaussian_moments),
        ("Wick machinery", c4_wick_machinery),
        ("interacting measure", c5_interacting_measure),
        ("OS positivity", c6_os_positivity),
        ("imaginary-time periodicity", c7_kms_periodicity),
        ("axis-swap symmetry", c8_nelson_symmetry),
        ("KMS boundary condition", c9_kms_boundary),
        ("relativistic KMS tube", c10_tube_scan),
        ("spectrum condition", c11_spectrum_condition),
        ("phi-bounds", c12_phi_bounds),
        ("Gibbs Hoelder inequality", c13_gibbs_holder),
        ("moment growth", c14_moment_growth),
        ("reproducibility", c15_reproducibility),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {n:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
