//! Normal ordering of powers and polynomials against a covariance constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::SpectralCovariance;

pub const MAX_DEGREE: usize = 20;

const FACTORIAL: [f64; MAX_DEGREE + 1] = {
    let mut t = [1.0; MAX_DEGREE + 1];
    let mut i = 1;
    while i <= MAX_DEGREE {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

pub fn factorial(n: usize) -> f64 {
    FACTORIAL[n]
}

/// `(n - 1)!!` for even `n`, zero for odd `n` (Gaussian moment factor).
pub fn gaussian_moment_factor(n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    (1..n).step_by(2).map(|k| k as f64).product()
}

fn check(c: f64, n: i64) -> Result<usize> {
    if n < 0 {
        return Err(Error::NegativeOrder(n));
    }
    if !(c >= 0.0) {
        return Err(Error::NegativeCovariance(c));
    }
    if n as usize > MAX_DEGREE {
        return Err(Error::DegreeTooLarge(n as usize));
    }
    Ok(n as usize)
}

/// `:phi^n:_c = sum_m n!/(m!(n-2m)!) phi^{n-2m} (-c/2)^m`.
pub fn wick_power(phi: f64, c: f64, n: i64) -> Result<f64> {
    let n = check(c, n)?;
    let mut acc = 0.0;
    for m in 0..=n / 2 {
        let coef = FACTORIAL[n] / (FACTORIAL[m] * FACTORIAL[n - 2 * m]);
        acc += coef * phi.powi((n - 2 * m) as i32) * (-c / 2.0).powi(m as i32);
    }
    Ok(acc)
}

/// Same value through `c^{n/2} He_n(phi / sqrt c)`; `c = 0` falls back to `phi^n`.
pub fn wick_power_hermite(phi: f64, c: f64, n: i64) -> Result<f64> {
    let n = check(c, n)?;
    if c == 0.0 {
        return Ok(phi.powi(n as i32));
    }
    let s = c.sqrt();
    let x = phi / s;
    let (mut h0, mut h1) = (1.0, x);
    if n == 0 {
        return Ok(1.0);
    }
    for k in 1..n {
        let h2 = x * h1 - k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(s.powi(n as i32) * h1)
}

/// Same value through `:phi^{n+1}: = phi :phi^n: - n c :phi^{n-1}:`.
pub fn wick_power_recursive(phi: f64, c: f64, n: i64) -> Result<f64> {
    let n = check(c, n)?;
    let (mut w0, mut w1) = (1.0, phi);
    if n == 0 {
        return Ok(1.0);
    }
    for k in 1..n {
        let w2 = phi * w1 - k as f64 * c * w0;
        w0 = w1;
        w1 = w2;
    }
    Ok(w1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WickLabel {
    #[default]
    CFull,
    CZero,
    CBeta,
    Custom,
}

/// `P(lambda) = sum_j coefficients[j] :lambda^j:_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WickPolynomial {
    pub coefficients: Vec<f64>,
    pub wick_constant: f64,
    pub label: WickLabel,
}

/// Index of the last nonzero coefficient, or `None` for the zero polynomial.
fn degree(coefficients: &[f64]) -> Option<usize> {
    coefficients.iter().rposition(|&c| c != 0.0)
}

pub fn is_bounded_below(coefficients: &[f64]) -> bool {
    match degree(coefficients) {
        None | Some(0) => true,
        Some(d) => d % 2 == 0 && coefficients[d] > 0.0,
    }
}

impl WickPolynomial {
    pub fn new(coefficients: Vec<f64>, wick_constant: f64, label: WickLabel) -> Result<Self> {
        if !(wick_constant >= 0.0) {
            return Err(Error::NegativeCovariance(wick_constant));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::BoundedBelowViolation("non-finite coefficient".into()));
        }
        if let Some(d) = degree(&coefficients) {
            if d > MAX_DEGREE {
                return Err(Error::DegreeTooLarge(d));
            }
        }
        if !is_bounded_below(&coefficients) {
            return Err(Error::BoundedBelowViolation(format!(
                "leading term of {:?} is odd or negative",
                coefficients
            )));
        }
        let mut coefficients = coefficients;
        coefficients.truncate(degree(&coefficients).map_or(0, |d| d + 1));
        Ok(Self { coefficients, wick_constant, label })
    }

    pub fn zero() -> Self {
        Self { coefficients: Vec::new(), wick_constant: 0.0, label: WickLabel::Custom }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Recursion shares the lower powers across all terms.
        let c = self.wick_constant;
        let mut acc = self.coefficients[0];
        let (mut w0, mut w1) = (1.0, phi);
        for (k, &a) in self.coefficients.iter().enumerate().skip(1) {
            if k > 1 {
                let w2 = phi * w1 - (k - 1) as f64 * c * w0;
                w0 = w1;
                w1 = w2;
            }
            acc += a * w1;
        }
        acc
    }

    /// Same polynomial in `lambda`, written in `:.:_{c_new}` ordering.
    pub fn rewick(&self, c_new: f64, label: WickLabel) -> Result<Self> {
        if !(c_new >= 0.0) {
            return Err(Error::NegativeCovariance(c_new));
        }
        // :l^n:_{c1} = sum_m n!/(m!(n-2m)! ) (-(c1-c2)/2)^m :l^{n-2m}:_{c2}
        let shift = -(self.wick_constant - c_new) / 2.0;
        let mut q = vec![0.0; self.coefficients.len()];
        for (n, &a) in self.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for m in 0..=n / 2 {
                let coef = FACTORIAL[n] / (FACTORIAL[m] * FACTORIAL[n - 2 * m]);
                q[n - 2 * m] += a * coef * shift.powi(m as i32);
            }
        }
        Ok(Self { coefficients: q, wick_constant: c_new, label })
    }

    /// Ordinary monomial coefficients of the same polynomial.
    pub fn monomial_coefficients(&self) -> Vec<f64> {
        self.rewick(0.0, WickLabel::Custom).map(|p| p.coefficients).unwrap_or_default()
    }
}

/// Covariance constant used for ordering on a lattice: the site variance.
pub fn lattice_wick_constant(cov: &SpectralCovariance) -> f64 {
    cov.site_variance
}
