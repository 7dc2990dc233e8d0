//! Experiment drivers behind the subcommands. Each returns a [`Report`];
//! writing and exit codes live in the parent module.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use super::config::RunConfig;
use super::report::{num, DataTable, Report};
use crate::continuation::{default_kms_grid, kms_boundary_check, tube_scan, ScanSettings};
use crate::error::{Error, Result};
use crate::estimate::{
    default_os_functionals, free_moment_growth, free_npoint, gaussian_profile, holder_chain_check, mode_sum_profile,
    moment_growth_check, nelson_symmetry_check, os_positivity_gram, sharp_time_two_point_profile, standard_battery,
    NelsonVariant, Reflection, SmearedPoint, SIGMA,
};
use crate::fock::{gibbs_holder_check, random_gibbs_trial, BoundHamiltonian, FockModel, GibbsSpec, PhiBound};
use crate::lattice::{dense_green_oracle, CylinderLattice, FieldConfiguration, SpectralCovariance, DENSE_ORACLE_LIMIT};
use crate::measure::{
    gaussian_expectations, metropolis_expectations, reweighted_expectations, Estimator, MeasureSpec, Observable,
    RunParams,
};
use crate::oracles::{
    cov_circle_cbeta, cov_mixed_sharp_time, cov_spatial_circle, cov_thermal_c0, cov_thermal_c0_coth,
    DispersionParams, QuadSpec, RegionSpec,
};
use crate::rng::{chain_rng, derive_seed};
use crate::stats::Estimate;
use crate::wick::{factorial, gaussian_moment_factor, wick_power, WickLabel, WickPolynomial};

struct Ctx<'a> {
    cfg: &'a RunConfig,
    lat: CylinderLattice,
    /// `SIGMA` times the tolerance scale.
    k: f64,
    ts: f64,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        Ok(Self { cfg, lat: cfg.lattice()?, k: SIGMA * cfg.tolerance_scale, ts: cfg.tolerance_scale })
    }

    fn run_params(&self, tag: u64) -> RunParams {
        let m = &self.cfg.measure;
        RunParams {
            seed: derive_seed(self.cfg.seed, tag),
            n_samples: m.n_samples,
            n_sweeps: m.sweeps,
            burn_in: m.burn_in,
            thin: m.thin,
            stream: 0,
        }
    }

    fn spec(&self, estimator: Estimator) -> Result<MeasureSpec> {
        MeasureSpec::with_coefficients(self.lat, self.cfg.measure.p.clone(), self.cfg.cutoff(), estimator)
    }

    fn profile(&self) -> Vec<f64> {
        gaussian_profile(&self.lat, 0.0, self.cfg.battery.profile_width)
    }
}

fn compare_estimates(report: &mut Report, check: &str, item: &str, a: &Estimate, b: &Estimate, k: f64) {
    let err = a.std_error.hypot(b.std_error);
    report.compare(check, item, a.value, b.value, err, k * err);
}

pub fn sample(cfg: &RunConfig) -> Result<Report> {
    let ctx = Ctx::new(cfg)?;
    let lat = ctx.lat;
    let cov = SpectralCovariance::new(&lat);
    let mut table = DataTable::new("samples.csv", &["sample", "i", "j", "alpha", "x", "phi"]);
    let mut report = Report::default();
    let mut values = vec![0.0; lat.sites()];
    for s in 0..cfg.sample.count {
        let mut rng = chain_rng(cfg.seed, s as u64);
        let residue = cov.sample_into(&mut rng, &mut values);
        report.upper("real-samples", format!("imaginary residue sample {s}"), residue, 0.0, 0.0, 1e-12 * ctx.ts);
        for i in 0..lat.n_alpha {
            for j in 0..lat.n_x {
                table.push(vec![
                    s.to_string(),
                    i.to_string(),
                    j.to_string(),
                    num(lat.alpha_at(i)),
                    num(lat.x_at(j)),
                    num(values[lat.index(i, j)]),
                ]);
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}

pub fn battery(cfg: &RunConfig) -> Result<Report> {
    let ctx = Ctx::new(cfg)?;
    let mut report = Report::default();
    for check in &cfg.battery.checks {
        match check.as_str() {
            "green" => green(&ctx, &mut report)?,
            "moments" => moments(&ctx, &mut report),
            "wick" => wick(&ctx, &mut report)?,
            "estimators" => estimators(&ctx, &mut report)?,
            "os" => os(&ctx, &mut report)?,
            "periodicity" => periodicity(&ctx, &mut report)?,
            "moment-growth" => moment_growth(&ctx, &mut report)?,
            "holder" => holder(&ctx, &mut report)?,
            other => return Err(Error::ValidationError { field: "battery.checks".into(), message: other.into() }),
        }
    }
    Ok(report)
}

fn green(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let lat = ctx.lat;
    if lat.sites() > DENSE_ORACLE_LIMIT {
        return Ok(());
    }
    let cov = SpectralCovariance::new(&lat);
    let kernel = cov.green_kernel();
    let dense = dense_green_oracle(&lat)?;
    let nx = lat.n_x;
    let mut worst = 0.0f64;
    for a in 0..lat.sites() {
        for b in 0..lat.sites() {
            let s = cov.green_from_kernel(&kernel, (a / nx, a % nx), (b / nx, b % nx));
            worst = worst.max((s - dense[(a, b)]).abs());
        }
    }
    report.upper("green", "max |spectral - dense|", worst, 0.0, 0.0, 1e-10 * ctx.ts);
    Ok(())
}

fn site_observables(max: i32) -> Vec<Box<Observable<'static>>> {
    (1..=max).map(|p| Box::new(move |c: &FieldConfiguration| c.values[0].powi(p)) as Box<Observable>).collect()
}

fn moments(ctx: &Ctx, report: &mut Report) {
    let cov = SpectralCovariance::new(&ctx.lat);
    let obs = site_observables(6);
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = gaussian_expectations(&refs, &cov, derive_seed(ctx.cfg.seed, 1), ctx.cfg.measure.n_samples);
    for (i, e) in est.iter().enumerate() {
        let p = i + 1;
        let exact = gaussian_moment_factor(p) * cov.site_variance.powf(p as f64 / 2.0);
        report.compare("moments", format!("E[phi^{p}]"), e.value, exact, e.std_error, ctx.k * e.std_error);
    }
}

fn wick(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let cov = SpectralCovariance::new(&ctx.lat);
    let c = cov.site_variance;
    let mut obs: Vec<Box<Observable>> = Vec::new();
    let mut items = Vec::new();
    for n in 1..=4i64 {
        obs.push(Box::new(move |cfg: &FieldConfiguration| wick_power(cfg.values[0], c, n).unwrap_or(f64::NAN)));
        items.push((format!("E[:phi^{n}:]"), 0.0));
    }
    for n in 1..=4i64 {
        for m in n..=4 {
            obs.push(Box::new(move |cfg: &FieldConfiguration| {
                let v = cfg.values[0];
                wick_power(v, c, n).unwrap_or(f64::NAN) * wick_power(v, c, m).unwrap_or(f64::NAN)
            }));
            let exact = if n == m { factorial(n as usize) * c.powi(n as i32) } else { 0.0 };
            items.push((format!("E[:phi^{n}::phi^{m}:]"), exact));
        }
    }
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = gaussian_expectations(&refs, &cov, derive_seed(ctx.cfg.seed, 2), ctx.cfg.measure.n_samples);
    for ((item, exact), e) in items.iter().zip(&est) {
        report.compare("wick", item.as_str(), e.value, *exact, e.std_error, ctx.k * e.std_error);
    }
    let p = WickPolynomial::new(ctx.cfg.measure.p.clone(), c, WickLabel::CFull)?;
    let back = p.rewick(c / 2.0 + 0.1, WickLabel::Custom)?.rewick(c, WickLabel::CFull)?;
    let dev = p.coefficients.iter().zip(&back.coefficients).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report.upper("wick", "rewick round trip", dev, 0.0, 0.0, 1e-12 * ctx.ts);
    Ok(())
}

fn free_battery_values(lat: &CylinderLattice) -> Vec<f64> {
    let cov = SpectralCovariance::new(lat);
    let kernel = cov.green_kernel();
    let c = cov.site_variance;
    let mut v = vec![0.0, c, 0.0, 3.0 * c * c];
    v.extend((1..=5).map(|d| kernel[d % lat.n_x]));
    v
}

fn estimators(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let battery = standard_battery(&ctx.lat);
    let refs: Vec<&Observable> = battery.iter().map(|(_, o)| o.as_ref()).collect();
    let spec = ctx.spec(Estimator::Reweighting)?;
    let run = ctx.run_params(3);
    let rw = reweighted_expectations(&refs, &spec, run.seed, run.n_samples)?;
    let mc = if spec.lattice.dispersion == crate::lattice::Dispersion::LatticeLaplacian {
        Some(metropolis_expectations(&refs, &spec, &ctx.run_params(4).metropolis())?)
    } else {
        None
    };
    if spec.interaction.is_zero() {
        let exact = free_battery_values(&ctx.lat);
        for (k, (name, _)) in battery.iter().enumerate() {
            let e = &rw.estimates[k];
            report.compare("estimators", format!("{name} gaussian vs exact"), e.value, exact[k], e.std_error, ctx.k * e.std_error);
            if let Some(mc) = &mc {
                let e = &mc.estimates[k];
                report.compare("estimators", format!("{name} metropolis vs exact"), e.value, exact[k], e.std_error, ctx.k * e.std_error);
            }
        }
    } else {
        report.lower("estimators", "effective sample size", rw.ess, 100.0, 0.0, 0.0);
        if let Some(mc) = &mc {
            for (k, (name, _)) in battery.iter().enumerate() {
                compare_estimates(report, "estimators", &format!("{name} metropolis vs reweighting"), &mc.estimates[k], &rw.estimates[k], ctx.k);
            }
        }
    }
    if let Some(mc) = &mc {
        report.push("estimators", "metropolis acceptance", mc.acceptance, 0.45, 0.0, 0.15, (0.3..=0.6).contains(&mc.acceptance));
    }
    Ok(())
}

fn os(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let spec = ctx.spec(ctx.cfg.measure.estimator)?;
    for (tag, reflection) in [(5, Reflection::AlphaReflection), (6, Reflection::XReflection)] {
        let fs = default_os_functionals(&ctx.lat, reflection)?;
        let r = os_positivity_gram(&fs, reflection, &spec, &ctx.run_params(tag))?;
        report.lower("os", format!("{reflection:?} gram min eigenvalue"), r.min_eigenvalue, 0.0, r.noise, ctx.k * r.noise);
    }
    Ok(())
}

fn periodicity(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let lat = ctx.lat;
    let h = ctx.profile();
    let mut worst = 0.0f64;
    for i in 0..=lat.n_alpha {
        let d = lat.beta * i as f64 / lat.n_alpha as f64;
        let a = mode_sum_profile(&lat, &h, d)?;
        let b = mode_sum_profile(&lat, &h, lat.beta - d)?;
        worst = worst.max((a - b).abs() / a.abs());
    }
    report.upper("periodicity", "free mode sum max relative asymmetry", worst, 0.0, 0.0, 1e-12 * ctx.ts);
    let spec = ctx.spec(ctx.cfg.measure.estimator)?;
    let rows = sharp_time_two_point_profile(&h, &spec, &ctx.run_params(7))?;
    for r in rows.iter().skip(1).take(lat.n_alpha / 2) {
        let e = r.asymmetry;
        report.compare("periodicity", format!("S({d}) - S(beta - {d})", d = num(r.d_alpha)), e.value, 0.0, e.std_error, ctx.k * e.std_error);
    }
    Ok(())
}

fn moment_growth(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let lat = ctx.lat;
    let h = ctx.profile();
    let p_list = [2, 4, 6, 8];
    let point = SmearedPoint::at_slice(&lat, 0, h.clone())?;
    let var = free_npoint(&SpectralCovariance::new(&lat), &[point.clone(), point]);
    for r in free_moment_growth(var, &p_list) {
        report.upper("moment-growth", format!("free p={}", r.p), r.estimate.value, r.bound, 0.0, 0.0);
    }
    let spec = ctx.spec(ctx.cfg.measure.estimator)?;
    for r in moment_growth_check(&h, &p_list, &spec, &ctx.run_params(8))? {
        let e = r.estimate;
        report.upper("moment-growth", format!("measured p={}", r.p), e.value, r.bound, e.std_error, ctx.k * e.std_error);
    }
    Ok(())
}

fn holder(ctx: &Ctx, report: &mut Report) -> Result<()> {
    let lat = ctx.lat;
    let h = ctx.profile();
    let spec = ctx.spec(ctx.cfg.measure.estimator)?;
    let half = lat.alpha_at(lat.n_alpha / 2);
    let r = holder_chain_check(&[h.clone(), h], &[0.0, half], &spec, &ctx.run_params(9))?;
    for row in &r.rows {
        let err = row.lhs.std_error.hypot(row.rhs.std_error);
        report.upper("holder", format!("signs {:?} exponents {:?}", row.signs, r.exponents), row.lhs.value, row.rhs.value, err, ctx.k * err);
    }
    Ok(())
}

pub fn tube(cfg: &RunConfig) -> Result<Report> {
    let ctx = Ctx::new(cfg)?;
    let t = &cfg.tube;
    let p = DispersionParams::new(t.beta.unwrap_or(cfg.lattice.beta), t.mass.unwrap_or(cfg.lattice.mass))?;
    let quad = QuadSpec { tolerance: t.tolerance, ..QuadSpec::default() };
    let settings = ScanSettings { quad, ..ScanSettings::default() };
    let spec = RegionSpec::new(p.beta, vec![t.lambda])?;
    let scan = tube_scan(&p, &spec, t.n_inside, t.n_outside, cfg.seed, &settings)?;
    let mut report = Report::default();
    let mut table = DataTable::new(
        "tube_scan.csv",
        &[
            "index", "re_s", "im_s", "re_y", "im_y", "expected_inside", "predicate_inside", "evaluated", "tail_bound",
            "cr_residual", "contour_residual", "correct",
        ],
    );
    for r in &scan.rows {
        table.push(vec![
            r.index.to_string(),
            num(r.point.s.re),
            num(r.point.s.im),
            num(r.point.y.re),
            num(r.point.y.im),
            r.expected_inside.to_string(),
            r.predicate_inside.to_string(),
            r.evaluated.to_string(),
            num(r.tail_bound),
            num(r.cr_residual),
            num(r.contour_residual),
            r.correct.to_string(),
        ]);
        let item = format!("point {} ({})", r.index, if r.expected_inside { "inside" } else { "outside" });
        report.push("tube", item, f64::from(u8::from(r.correct)), 1.0, 0.0, 0.0, r.correct);
        if r.expected_inside {
            let tol = settings.probe_tolerance * ctx.ts;
            report.upper("tube-holomorphy", format!("point {} CR residual", r.index), r.cr_residual, 0.0, 0.0, tol);
        }
    }
    report.tables.push(table);
    if t.kms {
        let kms = kms_boundary_check(&p, &default_kms_grid(), &quad)?;
        for r in &kms.rows {
            report.upper("kms", format!("s={} y={}", num(r.s), num(r.y)), r.deviation, 0.0, 0.0, 1e-8 * ctx.ts);
        }
        report.lower("kms", "Richardson refinement ratio", kms.min_refinement_ratio, 3.0, 0.0, 0.0);
    }
    Ok(report)
}

pub fn fock(cfg: &RunConfig) -> Result<(Report, serde_json::Value)> {
    let f = &cfg.fock;
    let ts = cfg.tolerance_scale;
    let mut report = Report::default();
    let mut model = FockModel::new(f.beta, f.mass, f.mode_cut, f.occ_cut)?;
    report.upper("fock-algebra", "commutator defect", model.commutator_defect(), 0.0, 0.0, 1e-12 * ts);
    let p = WickPolynomial::new(f.p.clone(), model.truncated_c_beta(), WickLabel::CBeta)?;
    let (e_c, overlap, gap) = {
        let int = model.build_interaction(&p)?;
        (int.e_c, int.vacuum_overlap, int.gap)
    };
    let h = model.hamiltonian()?;
    let mom = model.momentum_operator();
    let v = &model.interaction.as_ref().unwrap().v;
    report.upper("fock-algebra", "|[V, P]|", (v * &mom - &mom * v).abs().max(), 0.0, 0.0, 1e-12 * ts);
    report.upper("fock-algebra", "|H - H^T|", (&h - h.transpose()).abs().max(), 0.0, 0.0, 1e-12 * ts);
    let h_min = h.clone().symmetric_eigen().eigenvalues.min();
    report.compare("fock-algebra", "min eigenvalue of H_C", h_min, 0.0, 0.0, 1e-10 * ts);
    report.lower("fock-algebra", "ground overlap with vacuum", overlap, 0.0, 0.0, 0.0);

    let spectrum = model.spectrum_condition(1e-10 * ts)?;
    report.lower("spectrum", "min E - |p| over retained eigenvalues", spectrum.min_margin, 0.0, 0.0, 1e-10 * ts);

    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, 10));
    let gs: Vec<Vec<f64>> =
        (0..f.n_g).map(|_| (0..model.mode_count()).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let mut constants = Vec::new();
    let mut bound_row = |report: &mut Report, item: String, bound: PhiBound| {
        match bound.find_constants(1e-10 * ts) {
            Ok(r) => {
                report.lower("phi-bound", item.clone(), r.min_eig_plus.min(r.min_eig_minus), 0.0, 0.0, 1e-10 * ts);
                constants.push(serde_json::json!({ "case": item, "c1": r.c1, "c2": r.c2,
                    "min_eig_plus": r.min_eig_plus, "min_eig_minus": r.min_eig_minus }));
            }
            Err(e) => {
                report.push("phi-bound", item.clone(), f64::NAN, 0.0, 0.0, 1e-10 * ts, false);
                constants.push(serde_json::json!({ "case": item, "error": e.to_string() }));
            }
        }
    };
    for &eps in &f.epsilons {
        for which in [BoundHamiltonian::Free, BoundHamiltonian::Interacting] {
            for (k, g) in gs.iter().enumerate() {
                let bound = PhiBound::new(&model, g, eps, which)?;
                bound_row(&mut report, format!("eps={eps} {which:?} g{k}"), bound);
            }
        }
    }
    for (k, g) in gs.iter().enumerate() {
        let bound = PhiBound::with_power(&model, g, 1.0, 1.0, BoundHamiltonian::Interacting)?;
        bound_row(&mut report, format!("linear Interacting g{k}"), bound);
    }

    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(cfg.seed, 11));
    let mut gibbs_violations = 0;
    for trial in 0..f.gibbs_trials {
        let (spec, a, z) = random_gibbs_trial(&mut rng, f.gibbs_max_dim)?;
        let r = gibbs_holder_check(&spec, &a, &z)?;
        gibbs_violations += usize::from(!r.pass);
        report.upper("gibbs-holder", format!("trial {trial}"), r.lhs, r.rhs, 0.0, 1e-10 * r.rhs * ts);
    }
    let x = DMatrix::from_fn(6, 6, |_, _| rng.random_range(-1.0..1.0));
    let spec = GibbsSpec::new((&x + x.transpose()) * 0.5, 1.0)?;
    let id = DMatrix::identity(6, 6);
    let r = gibbs_holder_check(&spec, &[id.clone(), id.clone(), id], &[0.25, 0.4])?;
    report.compare("gibbs-holder", "identity lhs", r.lhs, 1.0, 0.0, 1e-12 * ts);
    report.compare("gibbs-holder", "identity rhs", r.rhs, 1.0, 0.0, 1e-12 * ts);

    let json = serde_json::json!({
        "dimension": model.dim(),
        "truncated_c_beta": model.truncated_c_beta(),
        "ground_energy": e_c,
        "vacuum_overlap": overlap,
        "spectral_gap": gap,
        "spectrum": spectrum,
        "phi_bound_constants": constants,
        "gibbs_trials": f.gibbs_trials,
        "gibbs_violations": gibbs_violations,
    });
    Ok((report, json))
}

fn nelson_test_functions(lat: &CylinderLattice) -> (Vec<f64>, Vec<f64>) {
    let f = (0..lat.sites())
        .map(|s| {
            let (i, j) = (s / lat.n_x, s % lat.n_x);
            let a = lat.alpha_at(i) - lat.beta / 4.0;
            (-(a * a) - lat.x_at(j).powi(2)).exp()
        })
        .collect();
    let g = (0..lat.sites()).map(|s| if s % lat.n_x < lat.n_x / 4 && s / lat.n_x < 2 { 1.0 } else { 0.0 }).collect();
    (f, g)
}

pub fn nelson(cfg: &RunConfig) -> Result<Report> {
    let ctx = Ctx::new(cfg)?;
    let lat = ctx.lat;
    let variants: Vec<NelsonVariant> = if cfg.nelson.variants.is_empty() {
        if lat.is_symmetric_torus() {
            vec![NelsonVariant::ExactFree, NelsonVariant::ReorderedPair]
        } else {
            vec![NelsonVariant::SwappedLattice]
        }
    } else {
        cfg.nelson
            .variants
            .iter()
            .map(|v| match v.as_str() {
                "exact-free" => NelsonVariant::ExactFree,
                "reordered-pair" => NelsonVariant::ReorderedPair,
                _ => NelsonVariant::SwappedLattice,
            })
            .collect()
    };
    let (f, g) = nelson_test_functions(&lat);
    let mut report = Report::default();
    for variant in variants {
        let base = match variant {
            NelsonVariant::ExactFree => MeasureSpec::free(lat, cfg.measure.estimator)?,
            _ => MeasureSpec::with_coefficients(lat, cfg.measure.p.clone(), lat.half_length, cfg.measure.estimator)?,
        };
        let r = nelson_symmetry_check(&f, &g, &base, variant, &ctx.run_params(12))?;
        for row in &r.rows {
            let item = format!("{variant:?} {}", row.name);
            if variant == NelsonVariant::ExactFree {
                let tol = 1e-12 * row.original.value.abs().max(1.0) * ctx.ts;
                report.compare("nelson", item, row.original.value, row.swapped.value, 0.0, tol);
            } else {
                compare_estimates(&mut report, "nelson", &item, &row.original, &row.swapped, ctx.k);
            }
        }
    }
    Ok(report)
}

pub fn tabulate_oracles(cfg: &RunConfig) -> Result<Report> {
    let ts = cfg.tolerance_scale;
    let o = &cfg.oracles;
    let p = DispersionParams::new(cfg.lattice.beta, cfg.lattice.mass)?;
    let mut table = DataTable::new("oracles.csv", &["table", "arg", "arg2", "value"]);
    let mut report = Report::default();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs());
    let (mut coth, mut reflect, mut coincide, mut circle) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..o.n_k {
        let k = -o.k_max + 2.0 * o.k_max * i as f64 / (o.n_k - 1) as f64;
        let c0 = cov_thermal_c0(k, &p);
        table.push(vec!["c0".into(), num(k), String::new(), num(c0)]);
        coth = coth.max(rel(c0, cov_thermal_c0_coth(k, &p)));
        coincide = coincide.max(rel(cov_mixed_sharp_time(0.0, k, &p)?, c0));
        for jd in 0..o.n_d {
            let d = p.beta * jd as f64 / (o.n_d - 1) as f64;
            let v = cov_mixed_sharp_time(d, k, &p)?;
            table.push(vec!["mixed_sharp_time".into(), num(k), num(d), num(v)]);
            reflect = reflect.max(rel(v, cov_mixed_sharp_time(p.beta - d, k, &p)?));
        }
    }
    for n in -o.n_max..=o.n_max {
        let cb = cov_circle_cbeta(n, &p);
        table.push(vec!["cbeta".into(), n.to_string(), String::new(), num(cb)]);
        circle = circle.max(rel(cov_spatial_circle(0.0, n, &p), cb));
        for jd in 0..o.n_d {
            let d = 2.0 * jd as f64 / (o.n_d - 1) as f64;
            table.push(vec!["spatial_circle".into(), n.to_string(), num(d), num(cov_spatial_circle(d, n, &p))]);
        }
    }
    report.upper("oracles", "c0 exponential vs coth form", coth, 0.0, 0.0, 1e-14 * ts);
    report.upper("oracles", "mixed sharp time at d = 0 vs c0", coincide, 0.0, 0.0, 1e-14 * ts);
    report.upper("oracles", "mixed sharp time d vs beta - d", reflect, 0.0, 0.0, 1e-14 * ts);
    report.upper("oracles", "spatial circle at 0 vs cbeta", circle, 0.0, 0.0, 1e-14 * ts);
    report.tables.push(table);
    Ok(report)
}
