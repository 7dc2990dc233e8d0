//! Closed-form continuum formulas: sharp-time covariances, free thermal and
//! circle Wightman functions, and the double-cone / tube geometry.
//!
//! Dispersion: `epsilon(k) = sqrt(k^2 + m^2)`, `nu_n = sqrt((2 pi n / beta)^2 + m^2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionParams {
    pub beta: f64,
    pub mass: f64,
}

impl DispersionParams {
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("mass", mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveParameter { name, value: v });
            }
        }
        Ok(Self { beta, mass })
    }

    pub fn epsilon(&self, k: f64) -> f64 {
        k.hypot(self.mass)
    }

    pub fn k_n(&self, n: i64) -> f64 {
        2.0 * PI * n as f64 / self.beta
    }

    pub fn nu(&self, n: i64) -> f64 {
        self.k_n(n).hypot(self.mass)
    }

    /// `1 / (1 - e^{-beta eps})`, the bound on `1 + n(eps)` over all modes.
    fn occupation_bound(&self) -> f64 {
        1.0 / -(-self.beta * self.mass).exp_m1()
    }
}

/// `(1 + e^{-beta eps}) / (2 eps (1 - e^{-beta eps}))`.
pub fn cov_thermal_c0(k: f64, p: &DispersionParams) -> f64 {
    let eps = p.epsilon(k);
    let e = (-p.beta * eps).exp();
    (1.0 + e) / (2.0 * eps * -(-p.beta * eps).exp_m1())
}

/// `coth(beta eps / 2) / (2 eps)`, the same constant in hyperbolic form.
pub fn cov_thermal_c0_coth(k: f64, p: &DispersionParams) -> f64 {
    let eps = p.epsilon(k);
    1.0 / (2.0 * eps * (p.beta * eps / 2.0).tanh())
}

/// `1 / (2 nu_n)`.
pub fn cov_circle_cbeta(n: i64, p: &DispersionParams) -> f64 {
    1.0 / (2.0 * p.nu(n))
}

/// `(e^{-d eps} + e^{-(beta - d) eps}) / (2 eps (1 - e^{-beta eps}))` for `0 <= d <= beta`.
pub fn cov_mixed_sharp_time(d_alpha: f64, k: f64, p: &DispersionParams) -> Result<f64> {
    if !(0.0..=p.beta).contains(&d_alpha) {
        return Err(Error::ArgumentOutsidePeriod { value: d_alpha, period: p.beta });
    }
    let eps = p.epsilon(k);
    let num = (-d_alpha * eps).exp() + (-(p.beta - d_alpha) * eps).exp();
    Ok(num / (2.0 * eps * -(-p.beta * eps).exp_m1()))
}

/// `e^{-|d_x| nu_n} / (2 nu_n)`.
pub fn cov_spatial_circle(d_x: f64, n: i64, p: &DispersionParams) -> f64 {
    let nu = p.nu(n);
    (-d_x.abs() * nu).exp() / (2.0 * nu)
}

/// Complex coordinate difference `(s, y)`: time-like and space-like parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubePoint {
    pub s: Complex64,
    pub y: Complex64,
}

impl TubePoint {
    pub fn new(s: Complex64, y: Complex64) -> Self {
        Self { s, y }
    }

    /// Point with real parts `(s, y)` and imaginary parts `-(alpha, b)`.
    pub fn from_parts(s: f64, y: f64, alpha: f64, b: f64) -> Self {
        Self { s: Complex64::new(s, -alpha), y: Complex64::new(y, -b) }
    }

    /// `(-Im s, -Im y)`, the point tested against the double cone.
    pub fn imaginary_offset(&self) -> (f64, f64) {
        (-self.s.im, -self.y.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSpec {
    /// Target bound on the neglected tail and on the quadrature error.
    pub tolerance: f64,
    /// Largest momentum cutoff the integrator may use.
    pub max_cutoff: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_cutoff: 4.0e4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WightmanValue {
    pub value: Complex64,
    /// Certified bound on the integral beyond the cutoff.
    pub tail_bound: f64,
    /// Kronrod error estimate on the retained range.
    pub quad_error: f64,
    pub cutoff: f64,
}

/// Exponential decay rate of the thermal integrand at `(a, b) = (-Im t, -Im x)`.
/// Positive exactly when `(a, b)` lies in the open double cone.
fn damping(a: f64, b: f64, beta: f64) -> f64 {
    (a - b.abs()).min(beta - a - b.abs())
}

/// Smallest cutoff `K` with `bound * e^{-gamma K} / (pi K gamma) <= tol`.
fn tail_cutoff(bound: f64, gamma: f64, tol: f64, max_cutoff: f64) -> Result<(f64, f64)> {
    let tail = |k: f64| bound * (-gamma * k).exp() / (PI * k * gamma);
    let mut k = 1.0f64;
    for _ in 0..60 {
        if tail(k) <= tol {
            break;
        }
        k = (k * 1.5).max((bound / (PI * gamma * tol * k)).ln() / gamma);
    }
    let bound_at = tail(k);
    if k > max_cutoff || bound_at > tol {
        return Err(Error::QuadratureTailTooLarge { bound: tail(k.min(max_cutoff)), tolerance: tol });
    }
    Ok((k, bound_at))
}

/// Mode integrand `(1/2pi)(1/2eps)[(1+n) e^{-i eps t + i k x} + n e^{i eps t - i k x}]`.
#[inline]
fn thermal_mode(k: f64, t: Complex64, x: Complex64, p: &DispersionParams) -> Complex64 {
    let i = Complex64::i();
    let eps = p.epsilon(k);
    let denom = -(-p.beta * eps).exp_m1();
    let forward = (-i * eps * t + i * k * x).exp();
    let backward = (i * eps * t - i * k * x - p.beta * eps).exp();
    (forward + backward) / (2.0 * eps * denom)
}

fn check_domain(z: &TubePoint, beta: f64) -> Result<f64> {
    let (a, b) = z.imaginary_offset();
    let gamma = damping(a, b, beta);
    if !(gamma > 0.0) || !z.s.re.is_finite() || !z.y.re.is_finite() {
        return Err(Error::PointOutsideAnalyticityDomain(format!(
            "(-Im t, -Im x) = ({a}, {b}) is not inside the double cone of size {beta}"
        )));
    }
    Ok(gamma)
}

/// Free thermal two-point function on the line at complex `(t, x) = (s, y)`,
/// by certified-tail adaptive quadrature over `|k| <= K`.
pub fn free_thermal_wightman(z: &TubePoint, p: &DispersionParams, quad: &QuadSpec) -> Result<WightmanValue> {
    let gamma = check_domain(z, p.beta)?;
    let (cutoff, tail_bound) = tail_cutoff(p.occupation_bound(), gamma, quad.tolerance / 2.0, quad.max_cutoff)?;
    let freq = 1.0 + z.s.re.abs() + z.y.re.abs();
    let initial = ((cutoff * freq / PI).ceil() as usize).clamp(16, 200_000);
    let r = integrate(
        |k| thermal_mode(k, z.s, z.y, p),
        -cutoff,
        cutoff,
        initial,
        quad.tolerance / 2.0,
        0.0,
    );
    Ok(WightmanValue { value: r.value / (2.0 * PI), tail_bound, quad_error: r.error_estimate / (2.0 * PI), cutoff })
}

/// Same function with the line replaced by a spatial torus of period `2L`:
/// the `k` integral becomes the mode sum over `k_j = pi j / L` with weight `1/2L`.
pub fn free_thermal_wightman_torus(
    z: &TubePoint,
    p: &DispersionParams,
    half_length: f64,
    tolerance: f64,
) -> Result<WightmanValue> {
    let gamma = check_domain(z, p.beta)?;
    let b = p.occupation_bound();
    let dk = PI / half_length;
    let tail = |j: usize| {
        let q = (-gamma * dk).exp();
        b * (-gamma * dk * (j + 1) as f64).exp() / (PI * (j + 1) as f64 * (1.0 - q))
    };
    let mut j_max = 1usize;
    while tail(j_max) > tolerance {
        j_max *= 2;
        if j_max > 1 << 24 {
            return Err(Error::TailTooLarge { bound: tail(j_max), tolerance });
        }
    }
    let mut acc = thermal_mode(0.0, z.s, z.y, p);
    for j in 1..=j_max {
        let k = dk * j as f64;
        acc += thermal_mode(k, z.s, z.y, p) + thermal_mode(-k, z.s, z.y, p);
    }
    Ok(WightmanValue {
        value: acc / (2.0 * half_length),
        tail_bound: tail(j_max),
        quad_error: 0.0,
        cutoff: dk * j_max as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleWightman {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// Tail of the circle mode sum beyond `|n| = n_cut` at damping `eta > 0`.
pub fn circle_tail_bound(eta: f64, beta: f64, n_cut: usize) -> f64 {
    let r = 2.0 * PI * eta / beta;
    let n1 = (n_cut + 1) as f64;
    2.0 * (-r * n1).exp() / (4.0 * PI * n1 * -(-r).exp_m1())
}

/// Vacuum two-point function on the circle of circumference `beta`:
/// `sum_{|n| <= n_cut} e^{i k_n alpha - i nu_n z_s} / (2 beta nu_n)`.
pub fn free_circle_wightman(
    alpha: f64,
    z_s: Complex64,
    p: &DispersionParams,
    n_cut: usize,
    tolerance: f64,
) -> Result<CircleWightman> {
    if z_s.im > 0.0 {
        return Err(Error::TubeViolation(z_s.im));
    }
    let eta = -z_s.im;
    let tail_bound = if eta > 0.0 { circle_tail_bound(eta, p.beta, n_cut) } else { f64::INFINITY };
    if !(tail_bound <= tolerance) {
        return Err(Error::TailTooLarge { bound: tail_bound, tolerance });
    }
    let i = Complex64::i();
    let n_cut = n_cut as i64;
    let mut value = Complex64::new(0.0, 0.0);
    for n in -n_cut..=n_cut {
        let nu = p.nu(n);
        value += (i * p.k_n(n) * alpha - i * nu * z_s).exp() / (2.0 * p.beta * nu);
    }
    Ok(CircleWightman { value, tail_bound })
}

/// Open double cone `|s| < alpha < beta - |s|`.
pub fn in_v_beta(point: (f64, f64), beta: f64) -> bool {
    let (alpha, s) = point;
    s.abs() < alpha && alpha < beta - s.abs()
}

/// Membership in `lambda V_beta`, the cone scaled by `lambda`.
pub fn in_scaled_cone(point: (f64, f64), lambda: f64, beta: f64) -> bool {
    in_v_beta(point, lambda * beta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub beta: f64,
    pub lambdas: Vec<f64>,
}

impl RegionSpec {
    pub fn new(beta: f64, lambdas: Vec<f64>) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::NonPositiveParameter { name: "beta", value: beta });
        }
        if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::InvalidLambdas("every lambda must be strictly positive".into()));
        }
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLambdas(format!("lambdas sum to {sum}, not 1")));
        }
        Ok(Self { beta, lambdas })
    }
}

/// True iff consecutive differences `p_{i+1} - p_i` (alpha taken mod beta)
/// lie in `lambda_i V_beta`.
pub fn in_jn(points: &[(f64, f64)], spec: &RegionSpec) -> Result<bool> {
    if points.len() != spec.lambdas.len() + 1 {
        return Err(Error::LambdaMismatch { expected: points.len().saturating_sub(1), got: spec.lambdas.len() });
    }
    Ok(points.windows(2).zip(&spec.lambdas).all(|(w, &lambda)| {
        let d_alpha = (w[1].0 - w[0].0).rem_euclid(spec.beta);
        let d_s = w[1].1 - w[0].1;
        in_scaled_cone((d_alpha, d_s), lambda, spec.beta)
    }))
}

/// True iff `(-Im s_j, -Im y_j)` lies in `lambda_j V_beta` for every `j`.
pub fn in_relativistic_tube(z: &[TubePoint], spec: &RegionSpec) -> Result<bool> {
    if z.len() != spec.lambdas.len() {
        return Err(Error::LambdaMismatch { expected: z.len(), got: spec.lambdas.len() });
    }
    Ok(z
        .iter()
        .zip(&spec.lambdas)
        .all(|(p, &lambda)| in_scaled_cone(p.imaginary_offset(), lambda, spec.beta)))
}

/// Union over a user-supplied grid of lambda vectors.
pub fn in_tube_union(z: &[TubePoint], beta: f64, grid: &[Vec<f64>]) -> Result<bool> {
    for lambdas in grid {
        if in_relativistic_tube(z, &RegionSpec::new(beta, lambdas.clone())?)? {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> DispersionParams {
        DispersionParams::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn c0_limits_and_forms() {
        let cold = DispersionParams::new(1e4, 1.0).unwrap();
        assert!((cov_thermal_c0(0.0, &cold) - 0.5).abs() < 1e-10);
        let p = params();
        let expect = 1.0 / (2.0 * (p.beta / 2.0).tanh());
        assert!((cov_thermal_c0(0.0, &p) - expect).abs() < 1e-15);
        assert!(cov_thermal_c0(1.0, &p) > cov_thermal_c0(2.0, &p));
        assert_eq!(cov_thermal_c0(1.3, &p), cov_thermal_c0(-1.3, &p));
    }

    #[test]
    fn cbeta_values() {
        let p = params();
        assert_eq!(cov_circle_cbeta(0, &p), 0.5);
        assert_eq!(cov_circle_cbeta(3, &p), cov_circle_cbeta(-3, &p));
        let n = 1_000_000;
        let asym = cov_circle_cbeta(n, &p) * n as f64;
        assert!((asym - p.beta / (4.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn mixed_reductions() {
        let p = params();
        for k in [0.0, 0.7, 3.0] {
            assert_eq!(cov_mixed_sharp_time(0.0, k, &p).unwrap(), cov_thermal_c0(k, &p));
            let eps = p.epsilon(k);
            let half = 2.0 * (-p.beta * eps / 2.0).exp() / (2.0 * eps * (1.0 - (-p.beta * eps).exp()));
            assert!((cov_mixed_sharp_time(1.0, k, &p).unwrap() - half).abs() < 1e-15);
        }
        assert!(matches!(
            cov_mixed_sharp_time(2.5, 0.0, &p),
            Err(Error::ArgumentOutsidePeriod { .. })
        ));
    }

    #[test]
    fn spatial_circle_slope() {
        let p = params();
        assert_eq!(cov_spatial_circle(0.0, 2, &p), cov_circle_cbeta(2, &p));
        let h = 1e-5;
        let d = 1.5;
        let slope = (cov_spatial_circle(d + h, 2, &p).ln() - cov_spatial_circle(d - h, 2, &p).ln()) / (2.0 * h);
        assert!((slope + p.nu(2)).abs() < 1e-10);
    }

    #[test]
    fn wightman_domain_errors() {
        let p = params();
        let outside = TubePoint::from_parts(0.3, 0.1, 1.0, 2.0);
        assert!(matches!(
            free_thermal_wightman(&outside, &p, &QuadSpec::default()),
            Err(Error::PointOutsideAnalyticityDomain(_))
        ));
        let q = DispersionParams::new(2.0 * PI, 1.0).unwrap();
        let r = free_circle_wightman(0.3, Complex64::new(0.0, -1.0), &q, 200, 1e-80).unwrap();
        assert!(r.tail_bound < 1e-80);
        assert!(r.tail_bound < (-200.0f64).exp());
        assert!(matches!(
            free_circle_wightman(0.3, Complex64::new(0.0, 0.1), &q, 200, 1e-12),
            Err(Error::TubeViolation(_))
        ));
        assert!(matches!(
            free_circle_wightman(0.3, Complex64::new(0.5, 0.0), &q, 200, 1e-12),
            Err(Error::TailTooLarge { .. })
        ));
    }

    #[test]
    fn cone_predicates() {
        let beta = 2.0;
        assert!(in_v_beta((beta / 2.0, 0.0), beta));
        assert!(!in_v_beta((0.0, 0.0), beta));
        assert!(!in_v_beta((beta / 4.0, beta / 3.0), beta));

        let one = RegionSpec::new(beta, vec![1.0]).unwrap();
        assert!(in_jn(&[(0.0, 0.0), (beta / 4.0, 0.0)], &one).unwrap());
        let halves = RegionSpec::new(beta, vec![0.5, 0.5]).unwrap();
        let pts = [(0.0, 0.0), (beta / 2.0, 0.0), (beta, 0.0)];
        assert!(!in_jn(&pts, &halves).unwrap());
        let pts = [(0.0, 0.0), (beta / 8.0, beta / 16.0), (beta / 4.0, beta / 8.0)];
        assert!(in_jn(&pts, &halves).unwrap());
        assert!(matches!(in_jn(&pts, &one), Err(Error::LambdaMismatch { .. })));

        let z = TubePoint::from_parts(0.3, -0.2, beta / 2.0, 0.0);
        assert!(in_relativistic_tube(&[z], &one).unwrap());
        let real = TubePoint::from_parts(0.3, -0.2, 0.0, 0.0);
        assert!(!in_relativistic_tube(&[real], &one).unwrap());
        let w = TubePoint::from_parts(0.0, 0.0, beta / 4.0, beta / 8.0);
        assert!(in_relativistic_tube(&[w, w], &halves).unwrap());
        assert!(RegionSpec::new(beta, vec![0.5, 0.4]).is_err());
        assert!(RegionSpec::new(beta, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn euclidean_anchor_matches_sharp_time_transform() {
        // Independent oracle: composite 8-point Gauss-Legendre over the mixed
        // sharp-time covariance, which is real and even in k.
        let p = params();
        for &(alpha, y) in &[(0.5, 0.2), (1.0, 0.0), (1.4, -0.3)] {
            let (k_max, pieces) = (80.0, 4000);
            let h = k_max / pieces as f64;
            let mut acc = 0.0;
            for piece in 0..pieces {
                let mid = (piece as f64 + 0.5) * h;
                for (x, w) in crate::quad::GL8 {
                    let k = mid + 0.5 * h * x;
                    acc += 0.5 * h * w * 2.0 * (k * y).cos() * cov_mixed_sharp_time(alpha, k, &p).unwrap();
                }
            }
            let oracle = acc / (2.0 * PI);
            let z = TubePoint::from_parts(0.0, y, alpha, 0.0);
            let w = free_thermal_wightman(&z, &p, &QuadSpec::default()).unwrap();
            assert!((w.value.re - oracle).abs() < 1e-8, "{} vs {oracle}", w.value.re);
            assert!(w.value.im.abs() < 1e-8);
        }
    }

    #[test]
    fn torus_and_circle_agree_at_euclidean_points() {
        let p = params();
        for &(alpha, y) in &[(0.5, 0.2), (1.0, 0.05), (1.3, -0.6)] {
            let z = TubePoint::from_parts(0.0, y, alpha, 0.0);
            let torus = free_thermal_wightman_torus(&z, &p, 20.0, 1e-13).unwrap();
            let circle = free_circle_wightman(alpha, Complex64::new(0.0, -y.abs()), &p, 400, 1e-13).unwrap();
            assert!((torus.value - circle.value).norm() < 1e-8, "{} vs {}", torus.value, circle.value);
        }
    }

    #[test]
    fn kms_mode_identity_inside_strip() {
        let p = params();
        let delta = 0.05;
        for &(t, x) in &[(0.3, 0.1), (-1.2, 0.7), (2.0, -0.4)] {
            let l = TubePoint::new(Complex64::new(t, -p.beta + delta), Complex64::new(x, 0.0));
            let r = TubePoint::new(Complex64::new(-t, -delta), Complex64::new(-x, 0.0));
            let q = QuadSpec::default();
            let a = free_thermal_wightman(&l, &p, &q).unwrap().value;
            let b = free_thermal_wightman(&r, &p, &q).unwrap().value;
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }
}
