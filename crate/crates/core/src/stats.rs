//! Estimates with error bars: block jackknife, reweighted ratios and the
//! integrated autocorrelation time.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimateMethod {
    Exact,
    GaussianMonteCarlo,
    Reweighting,
    Metropolis,
    Combined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_eff: f64,
    pub method: EstimateMethod,
}

/// Number of jackknife blocks used for every error bar.
pub const JACKKNIFE_BLOCKS: usize = 64;

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, n_eff: 1.0, method: EstimateMethod::Exact }
    }

    /// `|self - other| <= k * sqrt(err_a^2 + err_b^2)`, with an absolute floor
    /// for zero-error comparisons.
    pub fn agrees_with(&self, other: &Estimate, k: f64) -> bool {
        let sigma = self.std_error.hypot(other.std_error);
        (self.value - other.value).abs() <= k * sigma + 1e-12 * (1.0 + self.value.abs())
    }

    pub fn agrees_with_value(&self, value: f64, k: f64) -> bool {
        self.agrees_with(&Estimate::exact(value), k)
    }

    /// Deviation in units of the combined error bar.
    pub fn pull(&self, other: &Estimate) -> f64 {
        let sigma = self.std_error.hypot(other.std_error);
        let d = (self.value - other.value).abs();
        if sigma == 0.0 {
            if d == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            d / sigma
        }
    }

    pub fn difference(&self, other: &Estimate) -> Estimate {
        Estimate {
            value: self.value - other.value,
            std_error: self.std_error.hypot(other.std_error),
            n_eff: self.n_eff.min(other.n_eff),
            method: EstimateMethod::Combined,
        }
    }
}

fn block_bounds(n: usize, blocks: usize) -> Vec<(usize, usize)> {
    let b = blocks.min(n).max(1);
    (0..b).map(|k| (k * n / b, (k + 1) * n / b)).collect()
}

/// Plain mean with a block-jackknife error over [`JACKKNIFE_BLOCKS`] blocks.
pub fn jackknife_mean(xs: &[f64], method: EstimateMethod) -> Estimate {
    let n = xs.len();
    let total: f64 = xs.iter().sum();
    let mean = total / n as f64;
    let bounds = block_bounds(n, JACKKNIFE_BLOCKS);
    let b = bounds.len();
    if b < 2 {
        return Estimate { value: mean, std_error: 0.0, n_eff: n as f64, method };
    }
    let leave_out: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| (total - xs[lo..hi].iter().sum::<f64>()) / (n - (hi - lo)) as f64)
        .collect();
    let lm = leave_out.iter().sum::<f64>() / b as f64;
    let var = (b - 1) as f64 / b as f64 * leave_out.iter().map(|v| (v - lm).powi(2)).sum::<f64>();
    Estimate { value: mean, std_error: var.sqrt(), n_eff: n as f64, method }
}

/// `sum w_i x_i / sum w_i` with a block-jackknife error on the ratio.
pub fn jackknife_ratio(xs: &[f64], ws: &[f64], method: EstimateMethod) -> Estimate {
    let num: f64 = xs.iter().zip(ws).map(|(x, w)| x * w).sum();
    let den: f64 = ws.iter().sum();
    let value = num / den;
    let bounds = block_bounds(xs.len(), JACKKNIFE_BLOCKS);
    let b = bounds.len();
    let ess = den * den / ws.iter().map(|w| w * w).sum::<f64>();
    if b < 2 {
        return Estimate { value, std_error: 0.0, n_eff: ess.max(1.0), method };
    }
    let leave_out: Vec<f64> = bounds
        .iter()
        .map(|&(lo, hi)| {
            let bn: f64 = xs[lo..hi].iter().zip(&ws[lo..hi]).map(|(x, w)| x * w).sum();
            let bd: f64 = ws[lo..hi].iter().sum();
            (num - bn) / (den - bd)
        })
        .collect();
    let lm = leave_out.iter().sum::<f64>() / b as f64;
    let var = (b - 1) as f64 / b as f64 * leave_out.iter().map(|v| (v - lm).powi(2)).sum::<f64>();
    Estimate { value, std_error: var.sqrt(), n_eff: ess.max(1.0), method }
}

/// Integrated autocorrelation time with Sokal's automatic window (c = 6).
/// Uses the convention `tau_int = 1/2 + sum_{t>=1} rho(t)`, so independent
/// samples give 1/2.
pub fn integrated_autocorrelation(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 0.5;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for t in 1..n / 2 {
        let ct = (0..n - t).map(|i| (xs[i] - mean) * (xs[i + t] - mean)).sum::<f64>() / n as f64;
        tau += ct / c0;
        if t as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}
