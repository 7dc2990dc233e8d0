//! Interacting measure at finite spatial cutoff: `d mu_l = e^{-S_int} d phi_C / Z_l`
//! with `S_int = int_{S_beta x [-l, l]} :P(phi):_C`.
//!
//! The cutoff window weights each x-site by the fraction of its lattice cell
//! that falls inside `[-l, l]` (periodically), so the window volume is exactly
//! `beta * 2l` and the window is symmetric under `x -> -x`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CylinderLattice, Dispersion, FieldConfiguration, SpectralCovariance};
use crate::rng::chain_rng;
use crate::stats::{integrated_autocorrelation, jackknife_mean, jackknife_ratio, Estimate, EstimateMethod};
use crate::wick::{is_bounded_below, lattice_wick_constant, WickLabel, WickPolynomial};

/// A real functional of a field configuration.
pub type Observable<'a> = dyn Fn(&FieldConfiguration) -> f64 + Sync + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Estimator {
    #[default]
    Reweighting,
    Metropolis,
}

#[derive(Debug, Clone)]
pub struct MeasureSpec {
    pub lattice: CylinderLattice,
    pub interaction: WickPolynomial,
    pub spatial_cutoff_l: f64,
    pub estimator: Estimator,
    pub covariance: SpectralCovariance,
    /// Fraction of each x-cell inside the cutoff window.
    pub window: Vec<f64>,
}

/// Overlap of cell `j` with `[-l, l]` and its periodic images, in units of `a_x`.
pub fn window_weights(lat: &CylinderLattice, l: f64) -> Vec<f64> {
    let a = lat.a_x();
    let period = 2.0 * lat.half_length;
    if l >= lat.half_length {
        return vec![1.0; lat.n_x];
    }
    (0..lat.n_x)
        .map(|j| {
            let x = lat.x_at(j);
            let mut overlap = 0.0;
            for shift in [-period, 0.0, period] {
                let lo = (x - a / 2.0).max(-l + shift);
                let hi = (x + a / 2.0).min(l + shift);
                overlap += (hi - lo).max(0.0);
            }
            overlap / a
        })
        .collect()
}

impl MeasureSpec {
    pub fn new(
        lattice: CylinderLattice,
        interaction: WickPolynomial,
        spatial_cutoff_l: f64,
        estimator: Estimator,
    ) -> Result<Self> {
        if !(spatial_cutoff_l > 0.0 && spatial_cutoff_l <= lattice.half_length) {
            return Err(Error::InvalidCutoff { l: spatial_cutoff_l, half_length: lattice.half_length });
        }
        if !is_bounded_below(&interaction.coefficients) {
            return Err(Error::BoundedBelowViolation(format!("{:?}", interaction.coefficients)));
        }
        if !(interaction.wick_constant >= 0.0) {
            return Err(Error::NegativeCovariance(interaction.wick_constant));
        }
        let covariance = SpectralCovariance::new(&lattice);
        let window = window_weights(&lattice, spatial_cutoff_l);
        Ok(Self { lattice, interaction, spatial_cutoff_l, estimator, covariance, window })
    }

    /// Interaction `P` ordered against the lattice's own site variance.
    pub fn with_coefficients(
        lattice: CylinderLattice,
        coefficients: Vec<f64>,
        spatial_cutoff_l: f64,
        estimator: Estimator,
    ) -> Result<Self> {
        let c = lattice_wick_constant(&SpectralCovariance::new(&lattice));
        let p = WickPolynomial::new(coefficients, c, WickLabel::CFull)?;
        Self::new(lattice, p, spatial_cutoff_l, estimator)
    }

    pub fn free(lattice: CylinderLattice, estimator: Estimator) -> Result<Self> {
        Self::new(lattice, WickPolynomial::zero(), lattice.half_length, estimator)
    }

    /// `int 1` over the cutoff window, as seen by the lattice sum.
    pub fn window_volume(&self) -> f64 {
        self.lattice.cell() * self.lattice.n_alpha as f64 * self.window.iter().sum::<f64>()
    }
}

/// `S_int = sum_sites a_alpha a_x w_j :P(phi):`.
pub fn interaction_action(config: &FieldConfiguration, spec: &MeasureSpec) -> Result<f64> {
    if config.lattice != spec.lattice {
        return Err(Error::LatticeMismatch);
    }
    Ok(action_unchecked(config, spec))
}

fn action_unchecked(config: &FieldConfiguration, spec: &MeasureSpec) -> f64 {
    if spec.interaction.is_zero() {
        return 0.0;
    }
    let nx = spec.lattice.n_x;
    let mut acc = 0.0;
    for (s, &phi) in config.values.iter().enumerate() {
        let w = spec.window[s % nx];
        if w != 0.0 {
            acc += w * spec.interaction.eval(phi);
        }
    }
    acc * spec.lattice.cell()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReweightReport {
    pub estimates: Vec<Estimate>,
    pub ess: f64,
    pub log_partition: Estimate,
}

/// Configurations per independent RNG stream in the Gaussian samplers.
pub const SAMPLE_CHUNK: usize = 1024;

/// Draws `n` Gaussian configurations in fixed chunks, one RNG stream per
/// chunk, and maps each through `f`. Output order is the draw order
/// regardless of thread scheduling.
pub fn map_gaussian_samples<T: Send, F>(cov: &SpectralCovariance, seed: u64, n: usize, f: F) -> Vec<T>
where
    F: Fn(&FieldConfiguration) -> T + Sync,
{
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chain_rng(seed, c as u64);
            let count = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
            let mut cfg = FieldConfiguration::zeros(cov.lattice);
            (0..count)
                .map(|_| {
                    cov.sample_into(&mut rng, &mut cfg.values);
                    f(&cfg)
                })
                .collect::<Vec<T>>()
        })
        .collect::<Vec<Vec<T>>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Reweighted Gaussian estimates of several observables from one sample set.
pub fn reweighted_expectations(
    observables: &[&Observable],
    spec: &MeasureSpec,
    seed: u64,
    n_samples: usize,
) -> Result<ReweightReport> {
    if n_samples < 100 {
        return Err(Error::InvalidRunParameters(format!("n_samples = {n_samples} < 100")));
    }
    let rows = map_gaussian_samples(&spec.covariance, seed, n_samples, |cfg| {
        let s = action_unchecked(cfg, spec);
        let obs: Vec<f64> = observables.iter().map(|o| o(cfg)).collect();
        (-s, obs)
    });
    let log_w: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let shift = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = log_w.iter().map(|lw| (lw - shift).exp()).collect();
    let sum_w: f64 = weights.iter().sum();
    let ess = sum_w * sum_w / weights.iter().map(|w| w * w).sum::<f64>();
    if ess < 10.0 {
        return Err(Error::DegenerateWeights { ess });
    }
    let estimates = (0..observables.len())
        .map(|k| {
            let xs: Vec<f64> = rows.iter().map(|r| r.1[k]).collect();
            jackknife_ratio(&xs, &weights, EstimateMethod::Reweighting)
        })
        .collect();
    let z = jackknife_mean(&weights, EstimateMethod::Reweighting);
    let log_partition = Estimate {
        value: shift + z.value.ln(),
        std_error: z.std_error / z.value,
        n_eff: ess,
        method: EstimateMethod::Reweighting,
    };
    Ok(ReweightReport { estimates, ess, log_partition })
}

pub fn reweighted_expectation(
    observable: &Observable,
    spec: &MeasureSpec,
    seed: u64,
    n_samples: usize,
) -> Result<Estimate> {
    Ok(reweighted_expectations(&[observable], spec, seed, n_samples)?.estimates[0])
}

/// Plain Gaussian Monte Carlo means, ignoring any interaction.
pub fn gaussian_expectations(
    observables: &[&Observable],
    cov: &SpectralCovariance,
    seed: u64,
    n_samples: usize,
) -> Vec<Estimate> {
    let rows = map_gaussian_samples(cov, seed, n_samples, |cfg| {
        observables.iter().map(|o| o(cfg)).collect::<Vec<f64>>()
    });
    (0..observables.len())
        .map(|k| {
            let xs: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            jackknife_mean(&xs, EstimateMethod::GaussianMonteCarlo)
        })
        .collect()
}

/// `Z_l = E_gauss[e^{-S_int}]` with a jackknife error.
pub fn partition_ratio(spec: &MeasureSpec, seed: u64, n_samples: usize) -> Result<Estimate> {
    let report = reweighted_expectations(&[], spec, seed, n_samples)?;
    let z = report.log_partition.value.exp();
    Ok(Estimate { value: z, std_error: z * report.log_partition.std_error, ..report.log_partition })
}

/// `ln Z_l` with a delta-method error; usable when `Z_l` itself underflows.
pub fn log_partition(spec: &MeasureSpec, seed: u64, n_samples: usize) -> Result<Estimate> {
    Ok(reweighted_expectations(&[], spec, seed, n_samples)?.log_partition)
}

/// Local form of the full action `1/2 a^2 phi^T K phi + S_int` on a periodic
/// 2D grid with the nearest-neighbour stencil. Neighbours that coincide on
/// short axes accumulate, matching [`crate::lattice::dense_periodic_operator`].
#[derive(Debug, Clone)]
pub struct LocalAction {
    pub dims: (usize, usize),
    pub cell: f64,
    pub diagonal: f64,
    neighbours: Vec<[(usize, f64); 4]>,
    site_weight: Vec<f64>,
    pub interaction: WickPolynomial,
}

impl LocalAction {
    pub fn new(
        dims: (usize, usize),
        spacings: (f64, f64),
        mass: f64,
        site_weight: Vec<f64>,
        interaction: WickPolynomial,
    ) -> Self {
        let (na, nx) = dims;
        let (wa, wx) = (1.0 / (spacings.0 * spacings.0), 1.0 / (spacings.1 * spacings.1));
        let neighbours = (0..na * nx)
            .map(|s| {
                let (i, j) = (s / nx, s % nx);
                [
                    (((i + 1) % na) * nx + j, wa),
                    (((i + na - 1) % na) * nx + j, wa),
                    (i * nx + (j + 1) % nx, wx),
                    (i * nx + (j + nx - 1) % nx, wx),
                ]
            })
            .collect();
        Self {
            dims,
            cell: spacings.0 * spacings.1,
            diagonal: mass * mass + 2.0 * wa + 2.0 * wx,
            neighbours,
            site_weight,
            interaction,
        }
    }

    pub fn from_spec(spec: &MeasureSpec) -> Result<Self> {
        let lat = &spec.lattice;
        if lat.dispersion != Dispersion::LatticeLaplacian {
            return Err(Error::NonLocalDispersion);
        }
        let weights = (0..lat.sites()).map(|s| spec.window[s % lat.n_x]).collect();
        Ok(Self::new(
            (lat.n_alpha, lat.n_x),
            (lat.a_alpha(), lat.a_x()),
            lat.mass,
            weights,
            spec.interaction.clone(),
        ))
    }

    pub fn sites(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    /// Full action of `phi`.
    pub fn total(&self, phi: &[f64]) -> f64 {
        let mut acc = 0.0;
        for s in 0..phi.len() {
            let k_phi = self.diagonal * phi[s] - self.neighbours[s].iter().map(|&(t, w)| w * phi[t]).sum::<f64>();
            acc += 0.5 * phi[s] * k_phi;
            if !self.interaction.is_zero() {
                acc += self.site_weight[s] * self.interaction.eval(phi[s]);
            }
        }
        acc * self.cell
    }

    /// Action change when site `s` moves from `phi[s]` to `phi[s] + d`.
    #[inline]
    pub fn delta(&self, phi: &[f64], s: usize, d: f64) -> f64 {
        let k_phi = self.diagonal * phi[s] - self.neighbours[s].iter().map(|&(t, w)| w * phi[t]).sum::<f64>();
        let mut ds = d * k_phi + 0.5 * self.diagonal * d * d;
        let w = self.site_weight[s];
        if w != 0.0 && !self.interaction.is_zero() {
            ds += w * (self.interaction.eval(phi[s] + d) - self.interaction.eval(phi[s]));
        }
        ds * self.cell
    }
}

/// Metropolis acceptance probability for an action change.
#[inline]
pub fn acceptance_probability(delta_s: f64) -> f64 {
    if delta_s <= 0.0 {
        1.0
    } else {
        (-delta_s).exp()
    }
}

/// Total-variation distance between the stationary law of one full Metropolis
/// sweep and `e^{-S}/Z`, on a state space where every site takes values in
/// `grid`. Proposals pick a uniformly random other grid value, accepted with
/// [`acceptance_probability`] of [`LocalAction::delta`].
pub fn sweep_stationary_tv(action: &LocalAction, grid: &[f64], iterations: usize) -> f64 {
    let sites = action.sites();
    let m = grid.len();
    let states = m.pow(sites as u32);
    let decode = |mut idx: usize| -> Vec<usize> {
        let mut digits = vec![0; sites];
        for d in digits.iter_mut() {
            *d = idx % m;
            idx /= m;
        }
        digits
    };
    let field = |digits: &[usize]| -> Vec<f64> { digits.iter().map(|&g| grid[g]).collect() };

    let energies: Vec<f64> = (0..states).map(|x| action.total(&field(&decode(x)))).collect();
    let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let mut target: Vec<f64> = energies.iter().map(|e| (-(e - e_min)).exp()).collect();
    let z: f64 = target.iter().sum();
    target.iter_mut().for_each(|p| *p /= z);

    // Single-site kernels as (from, to, probability) moves plus staying mass.
    let q = 1.0 / (m - 1) as f64;
    let kernels: Vec<Vec<(Vec<(usize, f64)>, f64)>> = (0..sites)
        .map(|s| {
            let stride = m.pow(s as u32);
            (0..states)
                .map(|x| {
                    let digits = decode(x);
                    let phi = field(&digits);
                    let mut moves = Vec::with_capacity(m - 1);
                    let mut stay = 1.0;
                    for g in 0..m {
                        if g == digits[s] {
                            continue;
                        }
                        let p = q * acceptance_probability(action.delta(&phi, s, grid[g] - phi[s]));
                        let y = x + g * stride - digits[s] * stride;
                        moves.push((y, p));
                        stay -= p;
                    }
                    (moves, stay)
                })
                .collect()
        })
        .collect();

    let mut dist = vec![1.0 / states as f64; states];
    for _ in 0..iterations {
        for kernel in &kernels {
            let mut next = vec![0.0; states];
            for (x, (moves, stay)) in kernel.iter().enumerate() {
                next[x] += dist[x] * stay;
                for &(y, p) in moves {
                    next[y] += dist[x] * p;
                }
            }
            dist = next;
        }
    }
    0.5 * dist.iter().zip(&target).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetropolisParams {
    pub seed: u64,
    pub n_sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// RNG stream within the seed; lets paired runs decorrelate.
    pub stream: u64,
}

impl MetropolisParams {
    pub fn new(seed: u64, n_sweeps: usize, burn_in: usize, thin: usize) -> Self {
        Self { seed, n_sweeps, burn_in, thin, stream: 0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetropolisReport {
    pub estimates: Vec<Estimate>,
    pub tau_int: Vec<f64>,
    pub acceptance: f64,
    pub proposal_width: f64,
    pub measurements: usize,
}

const TARGET_ACCEPTANCE: f64 = 0.45;

/// Site-wise Metropolis with Gaussian proposals, tuned during burn-in.
pub fn metropolis_expectations(
    observables: &[&Observable],
    spec: &MeasureSpec,
    params: &MetropolisParams,
) -> Result<MetropolisReport> {
    if params.n_sweeps <= params.burn_in || params.thin == 0 {
        return Err(Error::InvalidRunParameters(format!(
            "need n_sweeps > burn_in and thin >= 1 (got {}, {}, {})",
            params.n_sweeps, params.burn_in, params.thin
        )));
    }
    let action = LocalAction::from_spec(spec)?;
    let mut rng = chain_rng(params.seed, params.stream);
    let mut cfg = spec.covariance.sample(&mut rng);
    let sites = action.sites();
    let mut sigma = (1.0 / (action.diagonal * action.cell)).sqrt() * 2.0;

    let sweep = |cfg: &mut FieldConfiguration, sigma: f64, rng: &mut crate::rng::ChainRng| -> usize {
        let mut accepted = 0;
        for s in 0..sites {
            let z: f64 = rng.sample(StandardNormal);
            let d = sigma * z;
            let ds = action.delta(&cfg.values, s, d);
            let u: f64 = rng.random();
            if u < acceptance_probability(ds) {
                cfg.values[s] += d;
                accepted += 1;
            }
        }
        accepted
    };

    let window = 20;
    let mut acc_window = 0;
    for t in 1..=params.burn_in {
        acc_window += sweep(&mut cfg, sigma, &mut rng);
        if t % window == 0 {
            let rate = acc_window as f64 / (window * sites) as f64;
            sigma *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
            acc_window = 0;
        }
    }

    let mut series: Vec<Vec<f64>> = vec![Vec::new(); observables.len()];
    let mut accepted = 0usize;
    let production = params.n_sweeps - params.burn_in;
    for t in 1..=production {
        accepted += sweep(&mut cfg, sigma, &mut rng);
        if t % params.thin == 0 {
            for (k, o) in observables.iter().enumerate() {
                series[k].push(o(&cfg));
            }
        }
    }
    let acceptance = accepted as f64 / (production * sites) as f64;
    if !(0.3..=0.6).contains(&acceptance) {
        return Err(Error::AcceptanceOutOfRange { rate: acceptance });
    }
    let measurements = series.first().map_or(production / params.thin, |s| s.len());
    let mut estimates = Vec::with_capacity(series.len());
    let mut taus = Vec::with_capacity(series.len());
    for xs in &series {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        let tau = integrated_autocorrelation(xs);
        estimates.push(Estimate {
            value: mean,
            std_error: (var / n).sqrt() * (2.0 * tau).sqrt(),
            n_eff: (n / (2.0 * tau)).max(1.0),
            method: EstimateMethod::Metropolis,
        });
        taus.push(tau);
    }
    Ok(MetropolisReport { estimates, tau_int: taus, acceptance, proposal_width: sigma, measurements })
}

pub fn metropolis_expectation(
    observable: &Observable,
    spec: &MeasureSpec,
    params: &MetropolisParams,
) -> Result<Estimate> {
    Ok(metropolis_expectations(&[observable], spec, params)?.estimates[0])
}

/// Sampling budget shared by both estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub seed: u64,
    pub n_samples: usize,
    pub n_sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub stream: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self { seed: 1, n_samples: 20_000, n_sweeps: 22_000, burn_in: 2_000, thin: 2, stream: 0 }
    }
}

impl RunParams {
    pub fn metropolis(&self) -> MetropolisParams {
        MetropolisParams {
            seed: self.seed,
            n_sweeps: self.n_sweeps,
            burn_in: self.burn_in,
            thin: self.thin,
            stream: self.stream,
        }
    }
}

/// Expectations of several observables with the estimator chosen in `spec`.
pub fn expectations(observables: &[&Observable], spec: &MeasureSpec, run: &RunParams) -> Result<Vec<Estimate>> {
    match spec.estimator {
        Estimator::Reweighting => {
            let seed = crate::rng::derive_seed(run.seed, run.stream);
            Ok(reweighted_expectations(observables, spec, seed, run.n_samples)?.estimates)
        }
        Estimator::Metropolis => Ok(metropolis_expectations(observables, spec, &run.metropolis())?.estimates),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::dense_green_oracle;

    fn lattice(na: usize, nx: usize) -> CylinderLattice {
        CylinderLattice::new(2.0, 2.0, na, nx, 1.0, Dispersion::LatticeLaplacian).unwrap()
    }

    #[test]
    fn window_volume_and_symmetry() {
        let lat = lattice(8, 16);
        for l in [0.3, 0.5, 1.0, 1.9, 2.0] {
            let w = window_weights(&lat, l);
            let vol: f64 = w.iter().sum::<f64>() * lat.a_x();
            assert!((vol - 2.0 * l).abs() < 1e-12, "l = {l}: {vol}");
            for j in 1..lat.n_x {
                assert!((w[j] - w[lat.n_x - j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn action_examples() {
        let lat = lattice(8, 16);
        let zero = MeasureSpec::free(lat, Estimator::Reweighting).unwrap();
        let cfg = zero.covariance.sample(&mut chain_rng(1, 0));
        assert_eq!(interaction_action(&cfg, &zero).unwrap(), 0.0);

        let spec = MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 0.0, 0.0, 1.0], 1.0, Estimator::Reweighting)
            .unwrap();
        let c = spec.interaction.wick_constant;
        let s = interaction_action(&FieldConfiguration::zeros(lat), &spec).unwrap();
        assert!((s - 3.0 * c * c * spec.window_volume()).abs() < 1e-12);
        assert!((spec.window_volume() - 2.0 * 2.0).abs() < 1e-12);

        assert!(matches!(
            MeasureSpec::new(
                lat,
                WickPolynomial { coefficients: vec![0.0, 0.0, 0.0, 1.0], wick_constant: c, label: WickLabel::Custom },
                1.0,
                Estimator::Reweighting
            ),
            Err(Error::BoundedBelowViolation(_))
        ));
        let other = FieldConfiguration::zeros(lattice(4, 16));
        assert!(matches!(interaction_action(&other, &spec), Err(Error::LatticeMismatch)));
    }

    #[test]
    fn free_reweighting_is_plain_average() {
        let lat = lattice(8, 16);
        let spec = MeasureSpec::free(lat, Estimator::Reweighting).unwrap();
        let obs = |c: &FieldConfiguration| c.values[3] * c.values[40];
        let rw = reweighted_expectation(&obs, &spec, 9, 3000).unwrap();
        let plain = gaussian_expectations(&[&obs], &spec.covariance, 9, 3000)[0];
        assert_eq!(rw.value.to_bits(), plain.value.to_bits());
        let one = reweighted_expectation(&|_: &FieldConfiguration| 1.0, &spec, 9, 3000).unwrap();
        assert_eq!(one.value, 1.0);
        assert_eq!(partition_ratio(&spec, 9, 200).unwrap().value, 1.0);
    }

    #[test]
    fn constant_interaction_partition() {
        let lat = lattice(8, 16);
        let kappa = 0.3;
        let spec =
            MeasureSpec::with_coefficients(lat, vec![kappa], 1.25, Estimator::Reweighting).unwrap();
        let z = partition_ratio(&spec, 2, 500).unwrap();
        let exact = (-kappa * lat.beta * 2.0 * 1.25).exp();
        assert!((z.value - exact).abs() < 1e-12 * exact);
        assert!(z.std_error < 1e-12);
    }

    #[test]
    fn degenerate_weights_detected() {
        let lat = lattice(8, 16);
        let spec = MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 50.0, 0.0, 50.0], 2.0, Estimator::Reweighting)
            .unwrap();
        assert!(matches!(reweighted_expectation(&|_: &FieldConfiguration| 1.0, &spec, 1, 500), Err(Error::DegenerateWeights { .. })));
    }

    #[test]
    fn local_delta_matches_total() {
        let lat = lattice(4, 8);
        let spec = MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 0.3, 0.0, 0.2], 1.0, Estimator::Metropolis)
            .unwrap();
        let act = LocalAction::from_spec(&spec).unwrap();
        let cfg = spec.covariance.sample(&mut chain_rng(4, 0));
        let base = act.total(&cfg.values);
        // The free part agrees with the dense operator.
        let k = crate::lattice::dense_operator(&lat).unwrap();
        let v = nalgebra::DVector::from_column_slice(&cfg.values);
        let free = 0.5 * lat.cell() * v.dot(&(&k * &v));
        let int = interaction_action(&cfg, &spec).unwrap();
        assert!((base - free - int).abs() < 1e-10 * base.abs());
        for s in [0, 5, 17, 31] {
            let mut moved = cfg.values.clone();
            moved[s] += 0.37;
            let exact = act.total(&moved) - base;
            assert!((act.delta(&cfg.values, s, 0.37) - exact).abs() < 1e-10);
        }
        let cont = CylinderLattice::new(2.0, 2.0, 4, 8, 1.0, Dispersion::ContinuumModes).unwrap();
        let spec = MeasureSpec::free(cont, Estimator::Metropolis).unwrap();
        assert!(matches!(LocalAction::from_spec(&spec), Err(Error::NonLocalDispersion)));
    }

    #[test]
    fn metropolis_free_two_point_and_determinism() {
        let lat = lattice(4, 8);
        let spec = MeasureSpec::free(lat, Estimator::Metropolis).unwrap();
        let g = dense_green_oracle(&lat).unwrap();
        let obs = |c: &FieldConfiguration| c.values[0] * c.values[9];
        let params = MetropolisParams::new(5, 40_000, 2_000, 2);
        let e = metropolis_expectation(&obs, &spec, &params).unwrap();
        assert!(e.agrees_with_value(g[(0, 9)], 3.0), "{e:?} vs {}", g[(0, 9)]);
        let again = metropolis_expectation(&obs, &spec, &params).unwrap();
        assert_eq!(e, again);
        let kappa = metropolis_expectation(&|_: &FieldConfiguration| 2.5, &spec, &params).unwrap();
        assert_eq!(kappa.value, 2.5);
        assert_eq!(kappa.std_error, 0.0);
    }

    #[test]
    fn two_by_two_detailed_balance() {
        let p = WickPolynomial::new(vec![0.0, 0.0, 0.2, 0.0, 0.1], 0.1, WickLabel::Custom).unwrap();
        let act = LocalAction::new((2, 2), (1.0, 1.0), 1.0, vec![1.0; 4], p);
        let grid: Vec<f64> = (0..7).map(|g| -1.5 + 0.5 * g as f64).collect();
        let tv = sweep_stationary_tv(&act, &grid, 400);
        assert!(tv <= 1e-3, "tv = {tv}");
    }
}
