//! Torus discretization of the cylinder, spectral free covariance, FFT
//! sampling and a dense-matrix oracle for small lattices.
//!
//! Conventions: site `(i, j)` sits at `alpha_i = i * a_alpha` and
//! `x_j = (j - n_x/2) * a_x`, stored row-major (`i * n_x + j`). The free
//! action is `S_0 = 1/2 * a_alpha * a_x * phi^T K phi` with `K = -Delta + m^2`,
//! so the site covariance is `K^{-1} / (a_alpha * a_x)` and a lattice test
//! function pairs as `phi(f) = sum a_alpha * a_x * f * phi`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::chain_rng;

/// Largest site count the dense oracle will allocate for.
pub const DENSE_ORACLE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Dispersion {
    /// Nearest-neighbour stencil, `(2/a^2)(1 - cos(2 pi n / N))`.
    #[default]
    LatticeLaplacian,
    /// Exact circle frequencies `2 pi n / period` on signed mode indices.
    ContinuumModes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderLattice {
    pub beta: f64,
    pub half_length: f64,
    pub n_alpha: usize,
    pub n_x: usize,
    pub mass: f64,
    pub dispersion: Dispersion,
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveParameter { name, value })
    }
}

impl CylinderLattice {
    pub fn new(
        beta: f64,
        half_length: f64,
        n_alpha: usize,
        n_x: usize,
        mass: f64,
        dispersion: Dispersion,
    ) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("L", half_length)?;
        check_positive("mass", mass)?;
        for (name, n) in [("n_alpha", n_alpha), ("n_x", n_x)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::OddLatticeSize { name, value: n });
            }
        }
        Ok(Self { beta, half_length, n_alpha, n_x, mass, dispersion })
    }

    pub fn a_alpha(&self) -> f64 {
        self.beta / self.n_alpha as f64
    }

    pub fn a_x(&self) -> f64 {
        2.0 * self.half_length / self.n_x as f64
    }

    /// Area of one lattice cell, `a_alpha * a_x`.
    pub fn cell(&self) -> f64 {
        self.a_alpha() * self.a_x()
    }

    pub fn sites(&self) -> usize {
        self.n_alpha * self.n_x
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_x + j
    }

    pub fn alpha_at(&self, i: usize) -> f64 {
        i as f64 * self.a_alpha()
    }

    pub fn x_at(&self, j: usize) -> f64 {
        (j as f64 - (self.n_x / 2) as f64) * self.a_x()
    }

    /// Lattice with the two axes exchanged: `(beta, 2L, n_alpha, n_x)` becomes
    /// `(2L, beta, n_x, n_alpha)`.
    pub fn swapped(&self) -> Self {
        Self {
            beta: 2.0 * self.half_length,
            half_length: self.beta / 2.0,
            n_alpha: self.n_x,
            n_x: self.n_alpha,
            ..*self
        }
    }

    pub fn is_symmetric_torus(&self) -> bool {
        self.n_alpha == self.n_x && (self.beta - 2.0 * self.half_length).abs() <= 1e-12 * self.beta
    }

    /// Squared frequency of mode `n` along an axis of `count` sites, spacing `a`.
    pub fn axis_eigenvalue(&self, n: usize, count: usize, a: f64) -> f64 {
        match self.dispersion {
            Dispersion::LatticeLaplacian => {
                2.0 / (a * a) * (1.0 - (2.0 * PI * n as f64 / count as f64).cos())
            }
            Dispersion::ContinuumModes => {
                let k = 2.0 * PI * signed_mode(n, count) as f64 / (count as f64 * a);
                k * k
            }
        }
    }

    pub fn nu_hat_sq(&self, n: usize) -> f64 {
        self.axis_eigenvalue(n, self.n_alpha, self.a_alpha())
    }

    pub fn k_hat_sq(&self, j: usize) -> f64 {
        self.axis_eigenvalue(j, self.n_x, self.a_x())
    }
}

/// Signed representative of mode `n` in `(-count/2, count/2]`.
pub fn signed_mode(n: usize, count: usize) -> i64 {
    if n <= count / 2 {
        n as i64
    } else {
        n as i64 - count as i64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfiguration {
    pub lattice: CylinderLattice,
    pub values: Vec<f64>,
}

impl FieldConfiguration {
    pub fn zeros(lattice: CylinderLattice) -> Self {
        Self { lattice, values: vec![0.0; lattice.sites()] }
    }

    pub fn from_values(lattice: CylinderLattice, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.sites() {
            return Err(Error::LatticeMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRunParameters("non-finite field value".into()));
        }
        Ok(Self { lattice, values })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.lattice.n_x + j]
    }

    /// `phi(f) = sum a_alpha * a_x * f * phi`.
    pub fn smear(&self, f: &[f64]) -> f64 {
        self.lattice.cell() * dot(f, &self.values)
    }

    /// Configuration on the axis-swapped lattice, `phi'(j, i) = phi(i, j)`.
    pub fn transposed(&self) -> Self {
        let lat = self.lattice.swapped();
        Self { lattice: lat, values: transpose(&self.values, self.lattice.n_alpha, self.lattice.n_x) }
    }
}

/// Row-major transpose of an `rows x cols` array.
pub fn transpose(v: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = v[r * cols + c];
        }
    }
    out
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse 2D transform `sum_k c_k e^{+2 pi i (n i / rows + j c / cols)}`,
/// unnormalized, in place.
#[derive(Clone)]
struct Fft2 {
    rows: usize,
    cols: usize,
    row_plan: Arc<dyn Fft<f64>>,
    col_plan: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.rows, self.cols)
    }
}

impl Fft2 {
    fn inverse(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_plan: planner.plan_fft_inverse(cols),
            col_plan: planner.plan_fft_inverse(rows),
        }
    }

    fn process(&self, data: &mut [Complex64]) {
        for row in data.chunks_exact_mut(self.cols) {
            self.row_plan.process(row);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); self.rows];
        for c in 0..self.cols {
            for r in 0..self.rows {
                column[r] = data[r * self.cols + c];
            }
            self.col_plan.process(&mut column);
            for r in 0..self.rows {
                data[r * self.cols + c] = column[r];
            }
        }
    }
}

/// Per-mode multipliers of `(-Delta + m^2)^{-1}` and the lattice site variance.
#[derive(Debug, Clone)]
pub struct SpectralCovariance {
    pub lattice: CylinderLattice,
    pub multipliers: Vec<f64>,
    pub site_variance: f64,
    amplitudes: Vec<f64>,
    fft: Fft2,
}

impl SpectralCovariance {
    pub fn new(lattice: &CylinderLattice) -> Self {
        let (na, nx) = (lattice.n_alpha, lattice.n_x);
        let m2 = lattice.mass * lattice.mass;
        let nu: Vec<f64> = (0..na).map(|n| lattice.nu_hat_sq(n)).collect();
        let k: Vec<f64> = (0..nx).map(|j| lattice.k_hat_sq(j)).collect();
        let mut multipliers = Vec::with_capacity(na * nx);
        for nu_n in &nu {
            for k_j in &k {
                multipliers.push(1.0 / (nu_n + k_j + m2));
            }
        }
        let n = (na * nx) as f64;
        let site_variance = multipliers.iter().sum::<f64>() / (n * lattice.cell());
        let amplitudes = multipliers.iter().map(|m| (m / (n * lattice.cell())).sqrt()).collect();
        Self { lattice: *lattice, multipliers, site_variance, amplitudes, fft: Fft2::inverse(na, nx) }
    }

    /// Translation kernel `g[d_alpha * n_x + d_x] = G((0,0), (d_alpha, d_x))`.
    pub fn green_kernel(&self) -> Vec<f64> {
        let n = self.multipliers.len() as f64;
        let scale = 1.0 / (n * self.lattice.cell());
        let mut data: Vec<Complex64> =
            self.multipliers.iter().map(|m| Complex64::new(m * scale, 0.0)).collect();
        self.fft.process(&mut data);
        data.iter().map(|c| c.re).collect()
    }

    /// Green's function between two sites given the kernel from [`Self::green_kernel`].
    pub fn green_from_kernel(&self, kernel: &[f64], a: (usize, usize), b: (usize, usize)) -> f64 {
        let (na, nx) = (self.lattice.n_alpha, self.lattice.n_x);
        let di = (b.0 + na - a.0) % na;
        let dj = (b.1 + nx - a.1) % nx;
        kernel[di * nx + dj]
    }

    /// `(f, C g)` for lattice test functions, evaluated through the kernel.
    pub fn pairing(&self, kernel: &[f64], f: &[f64], g: &[f64]) -> f64 {
        let lat = &self.lattice;
        let nx = lat.n_x;
        let sup_f: Vec<usize> = (0..f.len()).filter(|&s| f[s] != 0.0).collect();
        let sup_g: Vec<usize> = (0..g.len()).filter(|&s| g[s] != 0.0).collect();
        let mut acc = 0.0;
        for &s in &sup_f {
            for &t in &sup_g {
                let g_st = self.green_from_kernel(kernel, (s / nx, s % nx), (t / nx, t % nx));
                acc += f[s] * g_st * g[t];
            }
        }
        acc * lat.cell() * lat.cell()
    }

    /// Fills `out` with one free-field draw; returns the largest imaginary
    /// residue left by the inverse transform.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> f64 {
        let (na, nx) = (self.lattice.n_alpha, self.lattice.n_x);
        let mut modes = vec![Complex64::new(0.0, 0.0); na * nx];
        for n in 0..na {
            let nc = (na - n) % na;
            for j in 0..nx {
                let jc = (nx - j) % nx;
                let s = n * nx + j;
                let sc = nc * nx + jc;
                if sc == s {
                    let xi: f64 = rng.sample(StandardNormal);
                    modes[s] = Complex64::new(xi * self.amplitudes[s], 0.0);
                } else if s < sc {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    let z = Complex64::new(re, im) * (self.amplitudes[s] / std::f64::consts::SQRT_2);
                    modes[s] = z;
                    modes[sc] = z.conj();
                }
            }
        }
        self.fft.process(&mut modes);
        let mut residue = 0.0f64;
        for (o, c) in out.iter_mut().zip(&modes) {
            *o = c.re;
            residue = residue.max(c.im.abs());
        }
        residue
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldConfiguration {
        let mut cfg = FieldConfiguration::zeros(self.lattice);
        self.sample_into(rng, &mut cfg.values);
        cfg
    }
}

/// `count` independent free-field configurations from stream 0 of `seed`.
pub fn sample_gaussian(cov: &SpectralCovariance, seed: u64, count: usize) -> Vec<FieldConfiguration> {
    let mut rng = chain_rng(seed, 0);
    (0..count).map(|_| cov.sample(&mut rng)).collect()
}

/// Dense matrix of `-Delta + m^2` on a periodic grid of arbitrary rank with
/// the nearest-neighbour stencil. Coinciding neighbours (axes of length 1 or
/// 2) accumulate, so a 2-site ring has off-diagonal `-2/a^2`.
pub fn dense_periodic_operator(dims: &[usize], spacings: &[f64], mass: f64) -> DMatrix<f64> {
    let n: usize = dims.iter().product();
    let mut k = DMatrix::zeros(n, n);
    let strides: Vec<usize> = dims
        .iter()
        .enumerate()
        .map(|(d, _)| dims[d + 1..].iter().product())
        .collect();
    for s in 0..n {
        k[(s, s)] += mass * mass;
        for d in 0..dims.len() {
            let w = 1.0 / (spacings[d] * spacings[d]);
            let coord = (s / strides[d]) % dims[d];
            let base = s - coord * strides[d];
            for step in [1, dims[d] - 1] {
                let t = base + ((coord + step) % dims[d]) * strides[d];
                k[(s, s)] += w;
                k[(s, t)] -= w;
            }
        }
    }
    k
}

/// Dense operator of the lattice, built without any FFT: the stencil for
/// [`Dispersion::LatticeLaplacian`], an explicit cosine sum otherwise.
pub fn dense_operator(lat: &CylinderLattice) -> Result<DMatrix<f64>> {
    let n = lat.sites();
    if n > DENSE_ORACLE_LIMIT {
        return Err(Error::LatticeTooLargeForDenseOracle { sites: n, limit: DENSE_ORACLE_LIMIT });
    }
    Ok(match lat.dispersion {
        Dispersion::LatticeLaplacian => {
            dense_periodic_operator(&[lat.n_alpha, lat.n_x], &[lat.a_alpha(), lat.a_x()], lat.mass)
        }
        Dispersion::ContinuumModes => {
            let axis = |count: usize, a: f64| -> Vec<f64> {
                // Circulant row: (1/N) sum_n lambda_n cos(2 pi n d / N).
                (0..count)
                    .map(|d| {
                        (0..count)
                            .map(|m| {
                                lat.axis_eigenvalue(m, count, a)
                                    * (2.0 * PI * (m * d) as f64 / count as f64).cos()
                            })
                            .sum::<f64>()
                            / count as f64
                    })
                    .collect()
            };
            let ra = axis(lat.n_alpha, lat.a_alpha());
            let rx = axis(lat.n_x, lat.a_x());
            let mut k = DMatrix::zeros(n, n);
            for s in 0..n {
                let (i, j) = (s / lat.n_x, s % lat.n_x);
                k[(s, s)] += lat.mass * lat.mass;
                for t in 0..n {
                    let (p, q) = (t / lat.n_x, t % lat.n_x);
                    let di = (p + lat.n_alpha - i) % lat.n_alpha;
                    let dj = (q + lat.n_x - j) % lat.n_x;
                    if dj == 0 {
                        k[(s, t)] += ra[di];
                    }
                    if di == 0 {
                        k[(s, t)] += rx[dj];
                    }
                }
            }
            k
        }
    })
}

/// Site covariance `K^{-1} / (a_alpha * a_x)` by dense inversion.
pub fn dense_green_oracle(lat: &CylinderLattice) -> Result<DMatrix<f64>> {
    let k = dense_operator(lat)?;
    let inv = k
        .cholesky()
        .expect("lattice operator is positive definite for m > 0")
        .inverse();
    Ok(inv / lat.cell())
}
