//! Complex-time evaluation of the free theory: holomorphy probes, the KMS
//! boundary condition, relativistic-KMS tube scans and spectral support.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockModel, SpectrumReport};
use crate::oracles::{free_thermal_wightman, in_relativistic_tube, DispersionParams, QuadSpec, RegionSpec, TubePoint};
use crate::quad::GL8;
use crate::rng::chain_rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolomorphyReport {
    pub points: Vec<Vec<Complex64>>,
    pub cr_residual: f64,
    pub contour_residual: f64,
    pub converged: bool,
}

/// Complex-valued function of several complex coordinates.
pub type ComplexFn<'a> = dyn Fn(&[Complex64]) -> Result<Complex64> + Sync + 'a;

fn eval_shifted(f: &ComplexFn, z: &[Complex64], coord: usize, shift: Complex64) -> Result<Complex64> {
    let mut w = z.to_vec();
    w[coord] += shift;
    f(&w).map_err(|e| Error::StencilOutsideDomain(format!("at {:?}: {e}", w)))
}

/// Cauchy-Riemann residual `|d_y f - i d_x f|` and contour residual
/// `|oint f dz| / area` on a square of side `2 step`, both maximised over
/// points and coordinates. An anti-holomorphic `conj(z)` gives 2 for both.
pub fn holomorphy_probe(f: &ComplexFn, points: &[Vec<Complex64>], step: f64, tolerance: f64) -> Result<HolomorphyReport> {
    if !(1e-6..=1e-2).contains(&step) {
        return Err(Error::InvalidRunParameters(format!("probe step {step} outside [1e-6, 1e-2]")));
    }
    let i = Complex64::i();
    let h = Complex64::new(step, 0.0);
    let per_point: Vec<Result<(f64, f64)>> = points
        .par_iter()
        .map(|z| {
            let mut cr = 0.0f64;
            let mut contour = 0.0f64;
            for c in 0..z.len() {
                let dx = (eval_shifted(f, z, c, h)? - eval_shifted(f, z, c, -h)?) / (2.0 * step);
                let dy = (eval_shifted(f, z, c, i * h)? - eval_shifted(f, z, c, -i * h)?) / (2.0 * step);
                cr = cr.max((dy - i * dx).norm());
                let corners = [-h - i * h, h - i * h, h + i * h, -h + i * h];
                let mut integral = Complex64::new(0.0, 0.0);
                for e in 0..4 {
                    let (a, b) = (corners[e], corners[(e + 1) % 4]);
                    let half = (b - a) / 2.0;
                    for (x, w) in GL8 {
                        let at = (a + b) / 2.0 + half * x;
                        integral += eval_shifted(f, z, c, at)? * half * w;
                    }
                }
                contour = contour.max(integral.norm() / (4.0 * step * step));
            }
            Ok((cr, contour))
        })
        .collect();
    let mut cr_residual = 0.0f64;
    let mut contour_residual = 0.0f64;
    for r in per_point {
        let (a, b) = r?;
        cr_residual = cr_residual.max(a);
        contour_residual = contour_residual.max(b);
    }
    Ok(HolomorphyReport {
        points: points.to_vec(),
        cr_residual,
        contour_residual,
        converged: cr_residual < tolerance && contour_residual < tolerance,
    })
}

/// The free thermal two-point function as a function of `[t, x]`.
pub fn thermal_wightman_fn<'a>(p: &'a DispersionParams, quad: &'a QuadSpec) -> impl Fn(&[Complex64]) -> Result<Complex64> + Sync + 'a {
    move |z: &[Complex64]| Ok(free_thermal_wightman(&TubePoint::new(z[0], z[1]), p, quad)?.value)
}

/// Boundary-value offsets of the matched sequences.
pub const KMS_DELTAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

/// Richardson tableau for a sequence with halving steps and an error series
/// in integer powers of the step; returns the most extrapolated entry.
pub fn richardson(values: &[Complex64]) -> Complex64 {
    let mut row = values.to_vec();
    let mut factor = 2.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 2.0;
    }
    row[0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KmsRow {
    pub s: f64,
    pub y: f64,
    pub deviation: f64,
    /// Distance to a four-level reference of the raw values at each offset.
    pub raw_errors: Vec<f64>,
    /// Same for first-level Richardson values.
    pub richardson_errors: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KmsReport {
    pub rows: Vec<KmsRow>,
    pub max_deviation: f64,
    /// Smallest error ratio of first-level Richardson values per halving of the offset.
    pub min_refinement_ratio: f64,
}

fn boundary_sequence(
    p: &DispersionParams,
    quad: &QuadSpec,
    deltas: &[f64],
    at: impl Fn(f64) -> TubePoint,
) -> Result<Vec<Complex64>> {
    deltas.iter().map(|&d| Ok(free_thermal_wightman(&at(d), p, quad)?.value)).collect()
}

/// `max |W(s - i beta + i d, y) - W(-s - i d, -y)|` over the grid, with both
/// sides extrapolated to `d -> 0` along [`KMS_DELTAS`].
pub fn kms_boundary_check(p: &DispersionParams, grid: &[(f64, f64)], quad: &QuadSpec) -> Result<KmsReport> {
    let mut deltas = KMS_DELTAS.to_vec();
    deltas.push(KMS_DELTAS[2] / 2.0);
    let rows: Vec<Result<KmsRow>> = grid
        .par_iter()
        .map(|&(s, y)| {
            let left = boundary_sequence(p, quad, &deltas, |d| {
                TubePoint::new(Complex64::new(s, -p.beta + d), Complex64::new(y, 0.0))
            })?;
            let right =
                boundary_sequence(p, quad, &deltas, |d| TubePoint::new(Complex64::new(-s, -d), Complex64::new(-y, 0.0)))?;
            let l3 = richardson(&left[..3]);
            let r3 = richardson(&right[..3]);
            let reference = richardson(&left);
            let raw_errors = left[..3].iter().map(|v| (v - reference).norm()).collect();
            let level1: Vec<Complex64> = left.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
            let richardson_errors = level1[..2].iter().map(|v| (v - reference).norm()).collect();
            Ok(KmsRow { s, y, deviation: (l3 - r3).norm(), raw_errors, richardson_errors })
        })
        .collect();
    let rows: Vec<KmsRow> = rows.into_iter().collect::<Result<_>>()?;
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let min_refinement_ratio = rows
        .iter()
        .filter(|r| r.richardson_errors[1] > 1e-13)
        .map(|r| r.richardson_errors[0] / r.richardson_errors[1])
        .fold(f64::INFINITY, f64::min);
    Ok(KmsReport { rows, max_deviation, min_refinement_ratio })
}

/// Default 10 x 10 real grid, offset so no node sits on the light cone `|s| = |y|`.
pub fn default_kms_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            g.push((-1.8 + 0.4 * i as f64, -1.7 + 0.4 * j as f64));
        }
    }
    g
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeScanRow {
    pub index: usize,
    pub point: TubePoint,
    pub expected_inside: bool,
    pub predicate_inside: bool,
    pub evaluated: bool,
    pub tail_bound: f64,
    pub cr_residual: f64,
    pub contour_residual: f64,
    pub correct: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TubeScanReport {
    pub rows: Vec<TubeScanRow>,
    pub correct: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub quad: QuadSpec,
    pub probe_step: f64,
    pub probe_tolerance: f64,
    /// Minimum distance of inside samples from the cone boundary, in units of beta.
    pub margin: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { quad: QuadSpec::default(), probe_step: 1e-4, probe_tolerance: 1e-6, margin: 0.05 }
    }
}

fn sample_inside<R: Rng>(rng: &mut R, beta: f64, lambda: f64, margin: f64) -> (f64, f64) {
    let size = lambda * beta;
    loop {
        let a = rng.random_range(0.0..size);
        let b = rng.random_range(-size / 2.0..size / 2.0);
        if (a - b.abs()).min(size - a - b.abs()) >= margin * beta {
            return (a, b);
        }
    }
}

fn sample_outside<R: Rng>(rng: &mut R, beta: f64, k: usize) -> (f64, f64) {
    // Every fifth point lands exactly on the cone boundary.
    match k % 5 {
        0 => {
            let a = rng.random_range(0.0..beta / 2.0);
            (a, if rng.random_bool(0.5) { a } else { -a })
        }
        1 => {
            let a = rng.random_range(beta / 2.0..beta);
            (a, beta - a)
        }
        _ => loop {
            let a = rng.random_range(-beta..2.0 * beta);
            let b = rng.random_range(-1.5 * beta..1.5 * beta);
            if !(b.abs() < a && a < beta - b.abs()) {
                return (a, b);
            }
        },
    }
}

/// Samples points of the tube and of its complement and checks that the
/// predicate, the certified evaluation and the holomorphy probe agree.
pub fn tube_scan(
    p: &DispersionParams,
    spec: &RegionSpec,
    n_inside: usize,
    n_outside: usize,
    seed: u64,
    settings: &ScanSettings,
) -> Result<TubeScanReport> {
    if n_inside < 10 || n_outside < 10 {
        return Err(Error::InvalidRunParameters("tube scan needs at least 10 points of each kind".into()));
    }
    if spec.lambdas.len() != 1 {
        return Err(Error::LambdaMismatch { expected: 1, got: spec.lambdas.len() });
    }
    let lambda = spec.lambdas[0];
    let mut rng = chain_rng(seed, 0);
    let mut samples = Vec::with_capacity(n_inside + n_outside);
    for _ in 0..n_inside {
        let (a, b) = sample_inside(&mut rng, p.beta, lambda, settings.margin);
        samples.push((TubePoint::from_parts(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), a, b), true));
    }
    for k in 0..n_outside {
        let (a, b) = sample_outside(&mut rng, lambda * p.beta, k);
        samples.push((TubePoint::from_parts(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), a, b), false));
    }
    let w = thermal_wightman_fn(p, &settings.quad);
    let rows: Vec<TubeScanRow> = samples
        .par_iter()
        .enumerate()
        .map(|(index, &(point, expected_inside))| {
            let predicate_inside = in_relativistic_tube(&[point], spec).unwrap_or(false);
            let eval = free_thermal_wightman(&point, p, &settings.quad);
            let (evaluated, tail_bound) = match &eval {
                Ok(v) => (v.tail_bound <= settings.quad.tolerance, v.tail_bound),
                Err(_) => (false, f64::INFINITY),
            };
            let (cr, contour, converged) = if evaluated {
                match holomorphy_probe(&w, &[vec![point.s, point.y]], settings.probe_step, settings.probe_tolerance) {
                    Ok(r) => (r.cr_residual, r.contour_residual, r.converged),
                    Err(_) => (f64::NAN, f64::NAN, false),
                }
            } else {
                (f64::NAN, f64::NAN, false)
            };
            let outside_rejected = matches!(
                eval,
                Err(Error::PointOutsideAnalyticityDomain(_)) | Err(Error::QuadratureTailTooLarge { .. })
            );
            let correct = if expected_inside {
                predicate_inside && evaluated && converged
            } else {
                !predicate_inside && outside_rejected
            };
            TubeScanRow {
                index,
                point,
                expected_inside,
                predicate_inside,
                evaluated,
                tail_bound,
                cr_residual: cr,
                contour_residual: contour,
                correct,
            }
        })
        .collect();
    let correct = rows.iter().filter(|r| r.correct).count();
    Ok(TubeScanReport { total: rows.len(), rows, correct })
}

/// Sum over pairings of `w(i, j)` for `i < j` (complex Isserlis sum).
pub fn complex_pairing_sum(n: usize, w: &dyn Fn(usize, usize) -> Complex64) -> Complex64 {
    fn rec(rest: &mut Vec<usize>, w: &dyn Fn(usize, usize) -> Complex64) -> Complex64 {
        if rest.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let first = rest.remove(0);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..rest.len() {
            let partner = rest.remove(k);
            total += w(first, partner) * rec(rest, w);
            rest.insert(k, partner);
        }
        rest.insert(0, first);
        total
    }
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    rec(&mut (0..n).collect(), w)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuasiFreeValue {
    pub value: Complex64,
    pub max_tail_bound: f64,
}

/// Free n-point Wightman function from consecutive differences
/// `zeta_k = x_k - x_{k+1}`. Each pair `(i < j)` uses the difference
/// `x_i - x_j = zeta_i + ... + zeta_{j-1}`, which stays in the tube when the
/// `zeta_k` lie in scaled tubes with weights summing to at most one.
pub fn quasi_free_npoint(zeta: &[TubePoint], p: &DispersionParams, quad: &QuadSpec) -> Result<QuasiFreeValue> {
    let n = zeta.len() + 1;
    let mut table = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut max_tail = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let d = zeta[i..j].iter().fold(TubePoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, z| {
                TubePoint::new(acc.s + z.s, acc.y + z.y)
            });
            let v = free_thermal_wightman(&d, p, quad)?;
            max_tail = max_tail.max(v.tail_bound);
            table[i][j] = v.value;
        }
    }
    Ok(QuasiFreeValue { value: complex_pairing_sum(n, &|i, j| table[i][j]), max_tail_bound: max_tail })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FreeSupportReport {
    pub modes: usize,
    pub max_dispersion_residual: f64,
    pub min_gap: f64,
    pub pass: bool,
}

/// Circle frequencies satisfy `nu_n^2 - k_n^2 = m^2` and `nu_n > |k_n|`.
pub fn spectral_support_free(p: &DispersionParams, n_cut: usize) -> FreeSupportReport {
    let mut max_res = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for n in -(n_cut as i64)..=n_cut as i64 {
        let (k, nu) = (p.k_n(n), p.nu(n));
        max_res = max_res.max(((nu * nu - k * k) - p.mass * p.mass).abs() / (nu * nu));
        min_gap = min_gap.min(nu - k.abs());
    }
    FreeSupportReport {
        modes: 2 * n_cut + 1,
        max_dispersion_residual: max_res,
        min_gap,
        pass: max_res < 1e-12 && min_gap > 0.0,
    }
}

/// Joint energy-momentum spectrum of the truncated circle Hamiltonian
/// against the forward cone `E >= |p|`.
pub fn spectral_support_fock(model: &FockModel, tolerance: f64) -> Result<SpectrumReport> {
    model.spectrum_condition(tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probe_on_simple_functions() {
        let pts: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.3, -0.7)], vec![Complex64::new(-1.2, 0.4)]];
        let sq = |z: &[Complex64]| Ok(z[0] * z[0]);
        let r = holomorphy_probe(&sq, &pts, 1e-3, 1e-8).unwrap();
        assert!(r.converged && r.cr_residual < 1e-8 && r.contour_residual < 1e-8);
        let conj = |z: &[Complex64]| Ok(z[0].conj());
        let r = holomorphy_probe(&conj, &pts, 1e-3, 1e-8).unwrap();
        assert!((r.cr_residual - 2.0).abs() < 1e-9);
        assert!((r.contour_residual - 2.0).abs() < 1e-9);
        assert!(!r.converged);
        let bad = |z: &[Complex64]| {
            if z[0].im > 0.0 { Err(Error::TubeViolation(z[0].im)) } else { Ok(z[0]) }
        };
        let edge = vec![vec![Complex64::new(0.0, -1e-4)]];
        assert!(matches!(holomorphy_probe(&bad, &edge, 1e-3, 1e-8), Err(Error::StencilOutsideDomain(_))));
        assert!(holomorphy_probe(&sq, &pts, 0.5, 1e-8).is_err());
    }

    #[test]
    fn richardson_removes_linear_and_quadratic_terms() {
        let f = |d: f64| Complex64::new(1.0 + 3.0 * d - 2.0 * d * d, 0.5 * d);
        let v: Vec<Complex64> = KMS_DELTAS.iter().map(|&d| f(d)).collect();
        assert!((richardson(&v) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pairing_sum_matches_explicit_four_point() {
        let w = |i: usize, j: usize| Complex64::new((i + 2 * j) as f64, (i * j) as f64 * 0.1);
        let explicit = w(0, 1) * w(2, 3) + w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((complex_pairing_sum(4, &w) - explicit).norm() < 1e-14);
        assert_eq!(complex_pairing_sum(3, &w), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn free_dispersion_on_cone() {
        let p = DispersionParams::new(2.0, 1.0).unwrap();
        let r = spectral_support_free(&p, 500);
        assert!(r.pass);
    }

    #[test]
    fn heavy_field_kms_trivial() {
        let p = DispersionParams::new(2.0, 20.0).unwrap();
        let grid = vec![(1.0, 1.5), (-1.4, 1.0), (1.5, -1.2)];
        let r = kms_boundary_check(&p, &grid, &QuadSpec::default()).unwrap();
        assert!(r.max_deviation < 1e-12, "{}", r.max_deviation);
    }
}
