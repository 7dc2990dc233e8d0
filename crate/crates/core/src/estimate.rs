//! Schwinger functions and the statistical checks built on them: Gaussian
//! pairing, imaginary-time periodicity, reflection positivity, axis-swap
//! symmetry, moment growth and the staggered Hoelder chain.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{transpose, CylinderLattice, FieldConfiguration, SpectralCovariance};
use crate::measure::{expectations, MeasureSpec, Observable, RunParams};
use crate::oracles::{cov_mixed_sharp_time, cov_thermal_c0, DispersionParams};
use crate::stats::{Estimate, EstimateMethod};
use crate::wick::{factorial, gaussian_moment_factor, WickLabel};

/// Statistical acceptance threshold in units of the error bar.
pub const SIGMA: f64 = 3.0;

/// Sharp-time field `phi(alpha, h) = sum_j a_x h_j phi(i_alpha, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmearedPoint {
    pub alpha: f64,
    pub slice: usize,
    pub profile: Vec<f64>,
    /// `sum_j a_x h_j^2`.
    pub normalization: f64,
}

impl SmearedPoint {
    pub fn new(lat: &CylinderLattice, alpha: f64, profile: Vec<f64>) -> Result<Self> {
        let t = alpha / lat.a_alpha();
        let slice = t.round();
        if !(0.0..lat.beta).contains(&alpha) || (t - slice).abs() > 1e-9 {
            return Err(Error::OffLatticeTime { alpha });
        }
        if profile.len() != lat.n_x {
            return Err(Error::InvalidSmearing(format!("profile has {} entries, lattice has {}", profile.len(), lat.n_x)));
        }
        if profile.iter().any(|v| !v.is_finite()) || profile.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidSmearing("profile must be finite and not identically zero".into()));
        }
        let normalization = lat.a_x() * profile.iter().map(|h| h * h).sum::<f64>();
        Ok(Self { alpha, slice: slice as usize, profile, normalization })
    }

    pub fn at_slice(lat: &CylinderLattice, slice: usize, profile: Vec<f64>) -> Result<Self> {
        Self::new(lat, (slice % lat.n_alpha) as f64 * lat.a_alpha(), profile)
    }

    pub fn value(&self, cfg: &FieldConfiguration) -> f64 {
        let nx = cfg.lattice.n_x;
        let row = &cfg.values[self.slice * nx..(self.slice + 1) * nx];
        cfg.lattice.a_x() * row.iter().zip(&self.profile).map(|(p, h)| p * h).sum::<f64>()
    }

    /// Same field written as a full lattice test function for `phi(f)`.
    pub fn test_function(&self, lat: &CylinderLattice) -> Vec<f64> {
        let mut f = vec![0.0; lat.sites()];
        for (j, h) in self.profile.iter().enumerate() {
            f[lat.index(self.slice, j)] = h / lat.a_alpha();
        }
        f
    }
}

/// Gaussian spatial profile `exp(-(x - x0)^2 / (2 w^2))` on the lattice's x-sites.
pub fn gaussian_profile(lat: &CylinderLattice, x0: f64, width: f64) -> Vec<f64> {
    (0..lat.n_x).map(|j| (-(lat.x_at(j) - x0).powi(2) / (2.0 * width * width)).exp()).collect()
}

/// Exact free covariance of two sharp-time fields at lattice resolution.
pub fn free_covariance(cov: &SpectralCovariance, kernel: &[f64], a: &SmearedPoint, b: &SmearedPoint) -> f64 {
    let lat = &cov.lattice;
    let mut acc = 0.0;
    for (j, ha) in a.profile.iter().enumerate() {
        if *ha == 0.0 {
            continue;
        }
        for (q, hb) in b.profile.iter().enumerate() {
            acc += ha * hb * cov.green_from_kernel(kernel, (a.slice, j), (b.slice, q));
        }
    }
    acc * lat.a_x() * lat.a_x()
}

/// Sum over perfect matchings of products of `c[i][j]` (Gaussian moment of
/// centred variables with covariance `c`). Zero for an odd count.
pub fn isserlis(c: &[Vec<f64>]) -> f64 {
    fn rec(c: &[Vec<f64>], rest: &mut Vec<usize>) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest.remove(0);
        let mut total = 0.0;
        for k in 0..rest.len() {
            let partner = rest.remove(k);
            total += c[first][partner] * rec(c, rest);
            rest.insert(k, partner);
        }
        rest.insert(0, first);
        total
    }
    if c.len() % 2 == 1 {
        return 0.0;
    }
    rec(c, &mut (0..c.len()).collect())
}

/// Free n-point value from the exact lattice covariances.
pub fn free_npoint(cov: &SpectralCovariance, points: &[SmearedPoint]) -> f64 {
    let kernel = cov.green_kernel();
    let c: Vec<Vec<f64>> = points
        .iter()
        .map(|a| points.iter().map(|b| free_covariance(cov, &kernel, a, b)).collect())
        .collect();
    isserlis(&c)
}

/// `E[prod_j phi(alpha_j, h_j)]` under the measure described by `spec`.
pub fn schwinger_npoint(points: &[SmearedPoint], spec: &MeasureSpec, run: &RunParams) -> Result<Estimate> {
    if points.is_empty() || points.len() > 8 {
        return Err(Error::InvalidRunParameters(format!("n-point order {} outside 1..=8", points.len())));
    }
    let obs = |c: &FieldConfiguration| points.iter().map(|p| p.value(c)).product::<f64>();
    Ok(expectations(&[&obs], spec, run)?[0])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileRow {
    pub d_alpha: f64,
    pub estimate: Estimate,
    /// `S(d) - S(beta - d)` estimated on the same samples.
    pub asymmetry: Estimate,
}

/// Two-point function of `phi(0, h)` with `phi(d, h)` for every lattice
/// separation `d`, plus the reflection asymmetry `S(d) - S(beta - d)`.
pub fn sharp_time_two_point_profile(h: &[f64], spec: &MeasureSpec, run: &RunParams) -> Result<Vec<ProfileRow>> {
    let lat = spec.lattice;
    let points: Vec<SmearedPoint> =
        (0..lat.n_alpha).map(|i| SmearedPoint::at_slice(&lat, i, h.to_vec())).collect::<Result<_>>()?;
    let na = lat.n_alpha;
    let pair = |c: &FieldConfiguration, d: usize| points[0].value(c) * points[d].value(c);
    let mut obs: Vec<Box<Observable>> = Vec::new();
    for d in 0..na {
        obs.push(Box::new(move |c: &FieldConfiguration| pair(c, d)));
    }
    for d in 0..na {
        obs.push(Box::new(move |c: &FieldConfiguration| pair(c, d) - pair(c, (na - d) % na)));
    }
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = expectations(&refs, spec, run)?;
    Ok((0..na)
        .map(|d| ProfileRow { d_alpha: d as f64 * lat.a_alpha(), estimate: est[d], asymmetry: est[na + d] })
        .collect())
}

/// Continuum-in-alpha oracle for the free smeared two-point function:
/// `(1/2L) sum_j |h^(k_j)|^2 cov_mixed(d, k_j)` with the lattice's spatial momenta.
pub fn mode_sum_profile(lat: &CylinderLattice, h: &[f64], d_alpha: f64) -> Result<f64> {
    let p = DispersionParams::new(lat.beta, lat.mass)?;
    let nx = lat.n_x;
    let mut acc = 0.0;
    for q in 0..nx {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, hj) in h.iter().enumerate() {
            let phase = -2.0 * std::f64::consts::PI * (q * j) as f64 / nx as f64;
            re += lat.a_x() * hj * phase.cos();
            im += lat.a_x() * hj * phase.sin();
        }
        let k = lat.k_hat_sq(q).sqrt();
        acc += (re * re + im * im) * cov_mixed_sharp_time(d_alpha, k, &p)?;
    }
    Ok(acc / (2.0 * lat.half_length))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reflection {
    /// `alpha -> -alpha`, positive half `alpha in [0, beta/2]`.
    AlphaReflection,
    /// `x -> -x`, positive half `x >= 0`.
    XReflection,
}

impl Reflection {
    pub fn reflect(&self, lat: &CylinderLattice, site: (usize, usize)) -> (usize, usize) {
        match self {
            Reflection::AlphaReflection => ((lat.n_alpha - site.0) % lat.n_alpha, site.1),
            Reflection::XReflection => (site.0, (lat.n_x - site.1) % lat.n_x),
        }
    }

    pub fn in_positive_half(&self, lat: &CylinderLattice, site: (usize, usize)) -> bool {
        match self {
            Reflection::AlphaReflection => site.0 <= lat.n_alpha / 2,
            Reflection::XReflection => site.1 >= lat.n_x / 2,
        }
    }
}

/// A functional reading the field only at `sites`; `eval` receives the
/// values at those sites in order.
pub struct LocalFunctional<'a> {
    pub name: String,
    pub sites: Vec<(usize, usize)>,
    pub eval: Box<dyn Fn(&[f64]) -> f64 + Sync + 'a>,
}

impl<'a> LocalFunctional<'a> {
    /// Product of sharp-time fields.
    pub fn smeared_product(lat: &CylinderLattice, points: Vec<SmearedPoint>) -> Self {
        let nx = lat.n_x;
        let a_x = lat.a_x();
        let mut sites = Vec::new();
        for p in &points {
            sites.extend((0..nx).map(|j| (p.slice, j)));
        }
        let name = format!(
            "prod phi({})",
            points.iter().map(|p| format!("{:.4}", p.alpha)).collect::<Vec<_>>().join(",")
        );
        let eval = Box::new(move |v: &[f64]| {
            points
                .iter()
                .enumerate()
                .map(|(k, p)| a_x * p.profile.iter().zip(&v[k * nx..(k + 1) * nx]).map(|(h, f)| h * f).sum::<f64>())
                .product::<f64>()
        });
        Self { name, sites, eval }
    }

    fn read(&self, cfg: &FieldConfiguration, map: impl Fn((usize, usize)) -> (usize, usize)) -> f64 {
        let buf: Vec<f64> = self
            .sites
            .iter()
            .map(|&s| {
                let (i, j) = map(s);
                cfg.at(i, j)
            })
            .collect();
        (self.eval)(&buf)
    }
}

/// Functionals used by the batteries: up to three sharp-time fields and a
/// product of two under alpha reflection; three site fields and a squared field
/// under x reflection. All sit strictly inside the positive half.
pub fn default_os_functionals(lat: &CylinderLattice, reflection: Reflection) -> Result<Vec<LocalFunctional<'static>>> {
    match reflection {
        Reflection::AlphaReflection => {
            let h = gaussian_profile(lat, 0.0, 0.5);
            let half = lat.n_alpha / 2;
            let mut slices: Vec<usize> = (1..=3).map(|k| ((k * half) as f64 / 3.0).round().max(1.0) as usize).collect();
            slices.dedup();
            let mut fs: Vec<LocalFunctional> = slices
                .iter()
                .map(|&s| Ok(LocalFunctional::smeared_product(lat, vec![SmearedPoint::at_slice(lat, s, h.clone())?])))
                .collect::<Result<_>>()?;
            fs.push(LocalFunctional::smeared_product(
                lat,
                vec![SmearedPoint::at_slice(lat, 1, h.clone())?, SmearedPoint::at_slice(lat, *slices.last().unwrap(), h)?],
            ));
            Ok(fs)
        }
        Reflection::XReflection => {
            let nx = lat.n_x;
            let mut fs: Vec<LocalFunctional> = [nx / 2 + 1, nx / 2 + 2, nx / 2 + 3]
                .iter()
                .map(|&j| LocalFunctional {
                    name: format!("phi(0,{j})"),
                    sites: vec![(0, j % nx)],
                    eval: Box::new(|v: &[f64]| v[0]),
                })
                .collect();
            fs.push(LocalFunctional {
                name: format!("phi(1,{})^2", nx / 2 + 1),
                sites: vec![(1, nx / 2 + 1)],
                eval: Box::new(|v: &[f64]| v[0] * v[0]),
            });
            Ok(fs)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GramReport {
    pub entries: Vec<Vec<Estimate>>,
    pub min_eigenvalue: f64,
    /// Frobenius norm of the entry errors; the check allows `-3 * noise`.
    pub noise: f64,
    pub pass: bool,
}

/// Gram matrix `M_ij = E[F_i(R phi) F_j(phi)]` for functionals supported in
/// the positive half of `reflection`.
pub fn os_positivity_gram(
    functionals: &[LocalFunctional],
    reflection: Reflection,
    spec: &MeasureSpec,
    run: &RunParams,
) -> Result<GramReport> {
    let lat = spec.lattice;
    for f in functionals {
        if f.sites.iter().any(|&s| !reflection.in_positive_half(&lat, s)) {
            return Err(Error::SupportViolation(f.name.clone()));
        }
    }
    let n = functionals.len();
    let mut obs: Vec<Box<Observable>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let (fi, fj) = (&functionals[i], &functionals[j]);
            obs.push(Box::new(move |c: &FieldConfiguration| {
                fi.read(c, |s| reflection.reflect(&lat, s)) * fj.read(c, |s| s)
            }));
        }
    }
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = expectations(&refs, spec, run)?;
    let entries: Vec<Vec<Estimate>> = (0..n).map(|i| est[i * n..(i + 1) * n].to_vec()).collect();
    Ok(gram_from_entries(entries))
}

fn gram_from_entries(entries: Vec<Vec<Estimate>>) -> GramReport {
    let n = entries.len();
    let sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (entries[i][j].value + entries[j][i].value));
    let noise = entries.iter().flatten().map(|e| e.std_error * e.std_error).sum::<f64>().sqrt();
    let min_eigenvalue = if n == 0 { 0.0 } else { sym.symmetric_eigen().eigenvalues.min() };
    GramReport { entries, min_eigenvalue, noise, pass: min_eigenvalue >= -SIGMA * noise }
}

/// Exact Gram matrix for sharp-time fields under alpha reflection of the free
/// measure: entry `(i, j)` is the two-point function at separation `alpha_i + alpha_j`.
pub fn free_alpha_gram_oracle(lat: &CylinderLattice, h: &[f64], alphas: &[f64]) -> Result<Vec<Vec<f64>>> {
    alphas
        .iter()
        .map(|a| alphas.iter().map(|b| mode_sum_profile(lat, h, a + b)).collect())
        .collect()
}

/// Lattice Wick constant of the circle picture:
/// `(1/beta) sum_n 1/(2 nu_hat_n)` over the alpha modes.
pub fn lattice_c_beta(lat: &CylinderLattice) -> f64 {
    let m2 = lat.mass * lat.mass;
    (0..lat.n_alpha).map(|n| 0.5 / (lat.nu_hat_sq(n) + m2).sqrt()).sum::<f64>() / lat.beta
}

/// Lattice Wick constant of the thermal picture:
/// `(1/2L) sum_j c0(k_hat_j)` over the x modes.
pub fn lattice_c_zero(lat: &CylinderLattice) -> f64 {
    let p = DispersionParams { beta: lat.beta, mass: lat.mass };
    (0..lat.n_x).map(|j| cov_thermal_c0(lat.k_hat_sq(j).sqrt(), &p)).sum::<f64>() / (2.0 * lat.half_length)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NelsonVariant {
    /// Free measure on a symmetric torus; exact covariances, no sampling.
    ExactFree,
    /// Symmetric torus; one run with the interaction rewritten in the
    /// circle-picture ordering, a second on the swapped axes in the
    /// thermal-picture ordering.
    ReorderedPair,
    /// Asymmetric torus against its axis-swapped partner.
    SwappedLattice,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NelsonRow {
    pub name: String,
    pub original: Estimate,
    pub swapped: Estimate,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NelsonReport {
    pub variant: NelsonVariant,
    pub rows: Vec<NelsonRow>,
    pub pass: bool,
}

fn moments_of(f: &[f64], g: &[f64], spec: &MeasureSpec, run: &RunParams) -> Result<Vec<Estimate>> {
    let pf = |c: &FieldConfiguration| c.smear(f);
    let pg = |c: &FieldConfiguration| c.smear(g);
    let o1 = |c: &FieldConfiguration| pf(c) * pf(c);
    let o2 = |c: &FieldConfiguration| pf(c) * pg(c);
    let o3 = |c: &FieldConfiguration| pf(c).powi(4);
    expectations(&[&o1, &o2, &o3], spec, run)
}

/// Axis-swap symmetry of the Euclidean measure. `base` carries the lattice
/// and the interaction in its default ordering; the window must cover the
/// whole torus so the swap is a symmetry of the cutoff as well.
pub fn nelson_symmetry_check(
    f: &[f64],
    g: &[f64],
    base: &MeasureSpec,
    variant: NelsonVariant,
    run: &RunParams,
) -> Result<NelsonReport> {
    let lat = base.lattice;
    let ft = transpose(f, lat.n_alpha, lat.n_x);
    let gt = transpose(g, lat.n_alpha, lat.n_x);
    let swapped_lat = lat.swapped();
    let names = ["<phi(f)^2>", "<phi(f)phi(g)>", "<phi(f)^4>"];
    if base.spatial_cutoff_l < lat.half_length {
        return Err(Error::InvalidRunParameters("axis-swap check needs the window to cover the torus (l = L)".into()));
    }
    let rows: Vec<NelsonRow> = match variant {
        NelsonVariant::ExactFree => {
            if !lat.is_symmetric_torus() {
                return Err(Error::AsymmetricLatticeForExactVariant);
            }
            let cov = &base.covariance;
            let kernel = cov.green_kernel();
            let pairs = [(f, f, &ft, &ft), (f, g, &ft, &gt)];
            pairs
                .iter()
                .zip(names)
                .map(|((a, b, at, bt), name)| {
                    let orig = cov.pairing(&kernel, a, b);
                    let swap = cov.pairing(&kernel, at, bt);
                    NelsonRow {
                        name: name.to_string(),
                        original: Estimate::exact(orig),
                        swapped: Estimate::exact(swap),
                        pass: (orig - swap).abs() <= 1e-12 * orig.abs().max(1e-300).max(1.0),
                    }
                })
                .collect()
        }
        NelsonVariant::ReorderedPair | NelsonVariant::SwappedLattice => {
            if variant == NelsonVariant::ReorderedPair && !lat.is_symmetric_torus() {
                return Err(Error::AsymmetricLatticeForExactVariant);
            }
            let (p_a, p_b) = if variant == NelsonVariant::ReorderedPair {
                (
                    base.interaction.rewick(lattice_c_beta(&lat), WickLabel::CBeta)?,
                    base.interaction.rewick(lattice_c_zero(&swapped_lat), WickLabel::CZero)?,
                )
            } else {
                let c_swapped = SpectralCovariance::new(&swapped_lat).site_variance;
                (base.interaction.clone(), base.interaction.rewick(c_swapped, base.interaction.label)?)
            };
            let spec_a = MeasureSpec::new(lat, p_a, lat.half_length, base.estimator)?;
            let spec_b = MeasureSpec::new(swapped_lat, p_b, swapped_lat.half_length, base.estimator)?;
            let run_b = RunParams { seed: crate::rng::derive_seed(run.seed, 0x5EED), stream: run.stream + 1, ..*run };
            let a = moments_of(f, g, &spec_a, run)?;
            let b = moments_of(&ft, &gt, &spec_b, &run_b)?;
            names
                .iter()
                .zip(a.iter().zip(&b))
                .map(|(name, (x, y))| NelsonRow {
                    name: name.to_string(),
                    original: *x,
                    swapped: *y,
                    pass: x.agrees_with(y, SIGMA),
                })
                .collect()
        }
    };
    let pass = rows.iter().all(|r| r.pass);
    Ok(NelsonReport { variant, rows, pass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentRow {
    pub p: usize,
    pub estimate: Estimate,
    pub bound: f64,
    pub pass: bool,
}

/// `E[phi(0,h)^p] <= p! K^p` with `K^2` fitted to the second moment.
pub fn moment_growth_check(h: &[f64], p_list: &[usize], spec: &MeasureSpec, run: &RunParams) -> Result<Vec<MomentRow>> {
    if p_list.iter().any(|&p| p > 8 || p % 2 == 1 || p == 0) {
        return Err(Error::InvalidRunParameters("moment orders must be even and at most 8".into()));
    }
    let point = SmearedPoint::at_slice(&spec.lattice, 0, h.to_vec())?;
    let mut orders = vec![2];
    orders.extend(p_list.iter().copied().filter(|&p| p != 2));
    let obs: Vec<Box<Observable>> = orders
        .iter()
        .map(|&p| {
            let pt = &point;
            Box::new(move |c: &FieldConfiguration| pt.value(c).powi(p as i32)) as Box<Observable>
        })
        .collect();
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = expectations(&refs, spec, run)?;
    let k2 = est[0].value;
    Ok(p_list
        .iter()
        .map(|&p| {
            let e = est[orders.iter().position(|&q| q == p).unwrap()];
            let bound = factorial(p) * k2.powi(p as i32 / 2);
            MomentRow { p, estimate: e, bound, pass: e.value <= bound + SIGMA * e.std_error }
        })
        .collect())
}

/// Exact free moments `(p-1)!! v^{p/2}` against the `p! v^{p/2}` bound.
pub fn free_moment_growth(variance: f64, p_list: &[usize]) -> Vec<MomentRow> {
    p_list
        .iter()
        .map(|&p| {
            let value = gaussian_moment_factor(p) * variance.powi(p as i32 / 2);
            let bound = factorial(p) * variance.powi(p as i32 / 2);
            MomentRow { p, estimate: Estimate::exact(value), bound, pass: value <= bound }
        })
        .collect()
}

/// Smallest positive even `p` with `1/p < gap / beta`.
pub fn holder_exponent(gap: f64, beta: f64) -> Result<usize> {
    if !(gap > 0.0) {
        return Err(Error::GapTooSmall { p: usize::MAX });
    }
    let mut p = 2;
    while 1.0 / p as f64 >= gap / beta {
        p += 2;
        if p > 12 {
            return Err(Error::GapTooSmall { p });
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderRow {
    pub signs: Vec<i8>,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderReport {
    pub exponents: Vec<usize>,
    pub rows: Vec<HolderRow>,
    pub pass: bool,
}

fn signed_part(v: f64, sign: i8) -> f64 {
    (sign as f64 * v).max(0.0)
}

/// Staggered norm `E[prod_{k<p} phi_s(k beta/p, h)]^{1/p}` as an observable.
fn staggered_product<'a>(lat: &'a CylinderLattice, h: &'a [f64], p: usize, sign: i8) -> Result<Box<Observable<'a>>> {
    if lat.n_alpha % p != 0 {
        return Err(Error::OffLatticeTime { alpha: lat.beta / p as f64 });
    }
    let pts: Vec<SmearedPoint> =
        (0..p).map(|k| SmearedPoint::at_slice(lat, k * lat.n_alpha / p, h.to_vec())).collect::<Result<_>>()?;
    Ok(Box::new(move |c: &FieldConfiguration| pts.iter().map(|q| signed_part(q.value(c), sign)).product()))
}

/// `|E[prod phi_s(alpha_i, h_i)]| <= prod ||phi_s(h_i)||_{p_i}` for every sign
/// pattern `s`, with exponents from the cyclic gaps around each time.
pub fn holder_chain_check(
    h_list: &[Vec<f64>],
    alpha_list: &[f64],
    spec: &MeasureSpec,
    run: &RunParams,
) -> Result<HolderReport> {
    let lat = spec.lattice;
    let n = alpha_list.len();
    if n == 0 || n != h_list.len() || n > 6 {
        return Err(Error::InvalidRunParameters("need 1..=6 times with one profile each".into()));
    }
    if alpha_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidRunParameters("times must be strictly increasing".into()));
    }
    let points: Vec<SmearedPoint> =
        alpha_list.iter().zip(h_list).map(|(&a, h)| SmearedPoint::new(&lat, a, h.clone())).collect::<Result<_>>()?;
    let gap = |i: usize| {
        if i + 1 < n {
            alpha_list[i + 1] - alpha_list[i]
        } else {
            lat.beta - alpha_list[n - 1] + alpha_list[0]
        }
    };
    let exponents: Vec<usize> = (0..n)
        .map(|i| holder_exponent(gap((i + n - 1) % n).min(gap(i)), lat.beta))
        .collect::<Result<_>>()?;

    let patterns: Vec<Vec<i8>> =
        (0..1usize << n).map(|m| (0..n).map(|i| if m >> i & 1 == 1 { -1 } else { 1 }).collect()).collect();
    let mut obs: Vec<Box<Observable>> = Vec::new();
    for signs in &patterns {
        let (pts, s) = (&points, signs.clone());
        obs.push(Box::new(move |c: &FieldConfiguration| {
            pts.iter().zip(&s).map(|(p, &sg)| signed_part(p.value(c), sg)).product()
        }));
    }
    for i in 0..n {
        for sign in [1i8, -1] {
            obs.push(staggered_product(&lat, &h_list[i], exponents[i], sign)?);
        }
    }
    let refs: Vec<&Observable> = obs.iter().map(|b| b.as_ref()).collect();
    let est = expectations(&refs, spec, run)?;
    let norm = |i: usize, sign: i8| -> Estimate {
        let e = est[patterns.len() + 2 * i + usize::from(sign < 0)];
        let p = exponents[i] as f64;
        let v = e.value.max(0.0).powf(1.0 / p);
        let err = if e.value > 0.0 { v * e.std_error / (p * e.value) } else { e.std_error.powf(1.0 / p) };
        Estimate { value: v, std_error: err, n_eff: e.n_eff, method: EstimateMethod::Combined }
    };
    let rows: Vec<HolderRow> = patterns
        .iter()
        .enumerate()
        .map(|(k, signs)| {
            let lhs = Estimate { value: est[k].value.abs(), ..est[k] };
            let factors: Vec<Estimate> = signs.iter().enumerate().map(|(i, &s)| norm(i, s)).collect();
            let value: f64 = factors.iter().map(|f| f.value).product();
            let rel: f64 = factors
                .iter()
                .map(|f| if f.value > 0.0 { (f.std_error / f.value).powi(2) } else { 0.0 })
                .sum::<f64>()
                .sqrt();
            let rhs = Estimate { value, std_error: value * rel, n_eff: lhs.n_eff, method: EstimateMethod::Combined };
            let pass = lhs.value <= rhs.value + SIGMA * lhs.std_error.hypot(rhs.std_error);
            HolderRow { signs: signs.clone(), lhs, rhs, pass }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(HolderReport { exponents, rows, pass })
}

/// Observables of the cross-estimator battery: site-averaged moments of
/// degree 1 to 4 and the site-averaged two-point function at x-separations 1 to 5.
pub fn standard_battery(lat: &CylinderLattice) -> Vec<(String, Box<Observable<'static>>)> {
    let mut out: Vec<(String, Box<Observable<'static>>)> = Vec::new();
    for k in 1..=4 {
        out.push((
            format!("moment_{k}"),
            Box::new(move |c: &FieldConfiguration| {
                c.values.iter().map(|v| v.powi(k)).sum::<f64>() / c.values.len() as f64
            }),
        ));
    }
    let (na, nx) = (lat.n_alpha, lat.n_x);
    for d in 1..=5usize {
        out.push((
            format!("two_point_dx{d}"),
            Box::new(move |c: &FieldConfiguration| {
                let mut acc = 0.0;
                for i in 0..na {
                    for j in 0..nx {
                        acc += c.at(i, j) * c.at(i, (j + d) % nx);
                    }
                }
                acc / (na * nx) as f64
            }),
        ));
    }
    out
}
