//! Truncated bosonic Fock space on the circle of circumference `beta`:
//! ladder operators, `H0 = dGamma(nu)`, momentum, the Wick-ordered
//! interaction, field-operator bounds, and the finite-dimensional Gibbs
//! Hoelder inequality.
//!
//! Mode `n in [-N, N]` carries momentum `k_n = 2 pi n / beta` and energy
//! `nu_n = sqrt(k_n^2 + m^2)`. The basis is every occupation vector with
//! total occupation at most `T`.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wick::{WickLabel, WickPolynomial};

pub const DIMENSION_LIMIT: usize = 20_000;
/// Largest dimension for which full dense matrices are formed.
pub const DENSE_LIMIT: usize = 4_000;

type Ladder = Vec<Option<(usize, f64)>>;

#[derive(Debug, Clone)]
pub struct Interaction {
    pub polynomial: WickPolynomial,
    pub v: DMatrix<f64>,
    pub e_c: f64,
    pub ground: DVector<f64>,
    pub vacuum_overlap: f64,
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct FockModel {
    pub beta: f64,
    pub mass: f64,
    pub mode_cut: usize,
    pub occ_cut: usize,
    pub modes: Vec<i64>,
    pub basis: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    lower: Vec<Ladder>,
    raise: Vec<Ladder>,
    /// Diagonal of `H0`.
    pub h0: Vec<f64>,
    /// Total momentum of each basis state, in units of `2 pi / beta`.
    pub momentum: Vec<i64>,
    pub interaction: Option<Interaction>,
}

fn enumerate(modes: usize, budget: usize, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if prefix.len() == modes {
        out.push(prefix.clone());
        return;
    }
    for t in 0..=budget {
        prefix.push(t as u8);
        enumerate(modes, budget - t, prefix, out);
        prefix.pop();
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Number of occupation vectors over `modes` modes with total at most `t`.
pub fn fock_dimension(modes: usize, t: usize) -> usize {
    binomial(modes + t, t).round() as usize
}

impl FockModel {
    pub fn new(beta: f64, mass: f64, mode_cut: usize, occ_cut: usize) -> Result<Self> {
        for (name, v) in [("beta", beta), ("mass", mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::NonPositiveParameter { name, value: v });
            }
        }
        if occ_cut == 0 {
            return Err(Error::InvalidRunParameters("occupation cutoff must be at least 1".into()));
        }
        let m = 2 * mode_cut + 1;
        let dim = fock_dimension(m, occ_cut);
        if dim > DIMENSION_LIMIT || mode_cut > 6 || occ_cut > 6 {
            return Err(Error::DimensionTooLarge { dim, limit: DIMENSION_LIMIT });
        }
        let mut basis = Vec::with_capacity(dim);
        enumerate(m, occ_cut, &mut Vec::with_capacity(m), &mut basis);
        basis.sort_by_key(|b| (b.iter().map(|&t| t as usize).sum::<usize>(), std::cmp::Reverse(b.clone())));
        let index: HashMap<Vec<u8>, usize> = basis.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let modes: Vec<i64> = (-(mode_cut as i64)..=mode_cut as i64).collect();
        let mut lower = vec![vec![None; dim]; m];
        let mut raise = vec![vec![None; dim]; m];
        for (s, occ) in basis.iter().enumerate() {
            let total: usize = occ.iter().map(|&t| t as usize).sum();
            for q in 0..m {
                if occ[q] > 0 {
                    let mut o = occ.clone();
                    o[q] -= 1;
                    lower[q][s] = Some((index[&o], (occ[q] as f64).sqrt()));
                }
                if total < occ_cut {
                    let mut o = occ.clone();
                    o[q] += 1;
                    raise[q][s] = Some((index[&o], (occ[q] as f64 + 1.0).sqrt()));
                }
            }
        }
        let mut model = Self {
            beta,
            mass,
            mode_cut,
            occ_cut,
            modes,
            basis,
            index,
            lower,
            raise,
            h0: Vec::new(),
            momentum: Vec::new(),
            interaction: None,
        };
        model.h0 = model.basis.iter().map(|o| o.iter().enumerate().map(|(q, &t)| t as f64 * model.nu_q(q)).sum()).collect();
        model.momentum =
            model.basis.iter().map(|o| o.iter().enumerate().map(|(q, &t)| t as i64 * model.modes[q]).sum()).collect();
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn k(&self, n: i64) -> f64 {
        2.0 * std::f64::consts::PI * n as f64 / self.beta
    }

    pub fn nu(&self, n: i64) -> f64 {
        self.k(n).hypot(self.mass)
    }

    fn nu_q(&self, q: usize) -> f64 {
        self.nu(self.modes[q])
    }

    pub fn vacuum(&self) -> usize {
        0
    }

    pub fn total_occupation(&self, s: usize) -> usize {
        self.basis[s].iter().map(|&t| t as usize).sum()
    }

    pub fn state_index(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }

    fn dense_guard(&self) -> Result<()> {
        if self.dim() > DENSE_LIMIT {
            return Err(Error::DimensionTooLarge { dim: self.dim(), limit: DENSE_LIMIT });
        }
        Ok(())
    }

    pub fn annihilation(&self, q: usize) -> Result<DMatrix<f64>> {
        self.dense_guard()?;
        let mut a = DMatrix::zeros(self.dim(), self.dim());
        for (s, e) in self.lower[q].iter().enumerate() {
            if let Some((t, c)) = e {
                a[(*t, s)] = *c;
            }
        }
        Ok(a)
    }

    pub fn creation(&self, q: usize) -> Result<DMatrix<f64>> {
        Ok(self.annihilation(q)?.transpose())
    }

    /// Largest entry of `[a_n, a+_m] - delta_nm` on states with occupation at most `T - 1`.
    pub fn commutator_defect(&self) -> f64 {
        let m = self.mode_count();
        let mut worst = 0.0f64;
        for s in 0..self.dim() {
            if self.total_occupation(s) + 1 > self.occ_cut {
                continue;
            }
            for n in 0..m {
                for q in 0..m {
                    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                    if let Some((t, c1)) = self.raise[q][s] {
                        if let Some((u, c2)) = self.lower[n][t] {
                            *acc.entry(u).or_default() += c1 * c2;
                        }
                    }
                    if let Some((t, c1)) = self.lower[n][s] {
                        if let Some((u, c2)) = self.raise[q][t] {
                            *acc.entry(u).or_default() -= c1 * c2;
                        }
                    }
                    if n == q {
                        *acc.entry(s).or_default() -= 1.0;
                    }
                    worst = acc.values().fold(worst, |w, v| w.max(v.abs()));
                }
            }
        }
        worst
    }

    /// `phi_C(g) = (1/sqrt 2) sum_n g_n nu_n^{-1/2} (a+_n + a_n)` for real mode coefficients.
    pub fn field_operator(&self, g: &[f64]) -> Result<DMatrix<f64>> {
        self.dense_guard()?;
        if g.len() != self.mode_count() {
            return Err(Error::InvalidMatrix(format!("need {} mode coefficients", self.mode_count())));
        }
        let mut phi = DMatrix::zeros(self.dim(), self.dim());
        for (q, &gq) in g.iter().enumerate() {
            if gq == 0.0 {
                continue;
            }
            let w = gq / (2.0 * self.nu_q(q)).sqrt();
            for (s, e) in self.lower[q].iter().enumerate() {
                if let Some((t, c)) = e {
                    phi[(*t, s)] += w * c;
                    phi[(s, *t)] += w * c;
                }
            }
        }
        Ok(phi)
    }

    /// `sum g_n^2 nu_n^{-1-eps}`, the squared `H^{-1/2-eps/2}` norm.
    pub fn sobolev_norm(&self, g: &[f64], eps: f64) -> f64 {
        g.iter().enumerate().map(|(q, x)| x * x * self.nu_q(q).powf(-1.0 - eps)).sum::<f64>().sqrt()
    }

    /// Truncated circle Wick constant `sum_{|n| <= N} 1/(2 beta nu_n)`.
    pub fn truncated_c_beta(&self) -> f64 {
        self.modes.iter().map(|&n| 1.0 / (2.0 * self.beta * self.nu(n))).sum()
    }

    /// Applies `prod a+ (created) prod a (annihilated)` to basis state `s`;
    /// `None` if the result vanishes or leaves the truncation.
    fn apply_word(&self, s: usize, created: &[usize], annihilated: &[usize]) -> Option<(usize, f64)> {
        let mut state = s;
        let mut coef = 1.0;
        for &q in annihilated.iter().rev() {
            let (t, c) = self.lower[q][state]?;
            state = t;
            coef *= c;
        }
        for &q in created.iter().rev() {
            let (t, c) = self.raise[q][state]?;
            state = t;
            coef *= c;
        }
        Some((state, coef))
    }

    /// `V = beta sum_j c_j sum_r C(j, r) sum (prod 1/sqrt(2 beta nu)) a+^r a^{j-r}`
    /// over momentum-conserving mode tuples, restricted to retained states.
    /// Also fixes `E_C`, the ground vector and the spectral gap.
    pub fn build_interaction(&mut self, polynomial: &WickPolynomial) -> Result<&Interaction> {
        self.dense_guard()?;
        if polynomial.degree() > 4 {
            return Err(Error::DegreeTooLarge(polynomial.degree()));
        }
        let p = polynomial.rewick(self.truncated_c_beta(), WickLabel::CBeta)?;
        let m = self.mode_count();
        let dim = self.dim();
        let weight: Vec<f64> = (0..m).map(|q| 1.0 / (2.0 * self.beta * self.nu_q(q)).sqrt()).collect();

        let tuples = |len: usize| -> Vec<Vec<usize>> {
            let mut out = vec![Vec::new()];
            for _ in 0..len {
                out = out
                    .into_iter()
                    .flat_map(|t| (0..m).map(move |q| {
                        let mut u = t.clone();
                        u.push(q);
                        u
                    }))
                    .collect();
            }
            out
        };
        let mut v = DMatrix::zeros(dim, dim);
        for (j, &c) in p.coefficients.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if j == 0 {
                for s in 0..dim {
                    v[(s, s)] += self.beta * c;
                }
                continue;
            }
            for r in 0..=j {
                let mut by_momentum: HashMap<i64, Vec<(Vec<usize>, f64)>> = HashMap::new();
                for t in tuples(r) {
                    let mom = t.iter().map(|&q| self.modes[q]).sum::<i64>();
                    let w = t.iter().map(|&q| weight[q]).product::<f64>();
                    by_momentum.entry(mom).or_default().push((t, w));
                }
                let ann = tuples(j - r);
                let pref = self.beta * c * binomial(j, r);
                for s in 0..dim {
                    for d in &ann {
                        let mom = d.iter().map(|&q| self.modes[q]).sum::<i64>();
                        let Some(creators) = by_momentum.get(&mom) else { continue };
                        let wd = d.iter().map(|&q| weight[q]).product::<f64>();
                        for (cr, wc) in creators {
                            if let Some((t, amp)) = self.apply_word(s, cr, d) {
                                v[(t, s)] += pref * wd * wc * amp;
                            }
                        }
                    }
                }
            }
        }
        let h = DMatrix::from_diagonal(&DVector::from_vec(self.h0.clone())) + &v;
        let sectors = self.sector_spectra(&h);
        let mut all: Vec<(f64, i64, usize)> = Vec::new();
        for (mom, (vals, _, _)) in &sectors {
            for (k, &e) in vals.iter().enumerate() {
                all.push((e, *mom, k));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (e_c, mom0, k0) = all[0];
        let gap = all.get(1).map_or(f64::INFINITY, |x| x.0 - e_c);
        if gap < 1e-9 {
            return Err(Error::DegenerateGround { gap });
        }
        let (_, vecs, states) = &sectors[&mom0];
        let mut ground = DVector::zeros(dim);
        for (row, &s) in states.iter().enumerate() {
            ground[s] = vecs[(row, k0)];
        }
        if ground[self.vacuum()] < 0.0 {
            ground = -ground;
        }
        let vacuum_overlap = ground[self.vacuum()];
        self.interaction = Some(Interaction { polynomial: p, v, e_c, ground, vacuum_overlap, gap });
        Ok(self.interaction.as_ref().unwrap())
    }

    /// `H0 + V - E_C`, or `H0` when no interaction has been built.
    pub fn hamiltonian(&self) -> Result<DMatrix<f64>> {
        self.dense_guard()?;
        let mut h = DMatrix::from_diagonal(&DVector::from_vec(self.h0.clone()));
        if let Some(int) = &self.interaction {
            h += &int.v;
            for s in 0..self.dim() {
                h[(s, s)] -= int.e_c;
            }
        }
        Ok(h)
    }

    pub fn free_hamiltonian(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(self.h0.clone()))
    }

    pub fn momentum_operator(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.dim(), self.momentum.iter().map(|&n| self.k(n))))
    }

    /// Eigenvalues, eigenvectors and member states of `h` per momentum sector.
    fn sector_spectra(&self, h: &DMatrix<f64>) -> BTreeMap<i64, (Vec<f64>, DMatrix<f64>, Vec<usize>)> {
        let mut members: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (s, &p) in self.momentum.iter().enumerate() {
            members.entry(p).or_default().push(s);
        }
        members
            .into_par_iter()
            .map(|(p, states)| {
                let block = DMatrix::from_fn(states.len(), states.len(), |i, j| h[(states[i], states[j])]);
                let eig = block.symmetric_eigen();
                (p, (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors, states))
            })
            .collect()
    }

    /// Joint `(p, E)` spectrum of momentum and the current Hamiltonian.
    pub fn joint_spectrum(&self) -> Result<Vec<(f64, f64)>> {
        let h = self.hamiltonian()?;
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.dim());
        for (p, (vals, _, _)) in self.sector_spectra(&h) {
            out.extend(vals.into_iter().map(|e| (self.k(p), e)));
        }
        out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
        Ok(out)
    }

    /// `E >= |p| - tolerance` for every joint eigenvalue outside the top decile.
    pub fn spectrum_condition(&self, tolerance: f64) -> Result<SpectrumReport> {
        let spec = self.joint_spectrum()?;
        let retained = spec.len() - spec.len() / 10;
        let margin = |&(p, e): &(f64, f64)| e - p.abs();
        let bad_retained = spec[..retained].iter().filter(|x| margin(x) < -tolerance).count();
        let bad_top = spec[retained..].iter().filter(|x| margin(x) < -tolerance).count();
        if bad_retained == 0 && bad_top > 0 {
            return Err(Error::TruncationTooSevere { violations: bad_top });
        }
        let min_margin = spec[..retained].iter().map(margin).fold(f64::INFINITY, f64::min);
        Ok(SpectrumReport {
            states: spec.len(),
            retained,
            violations: bad_retained,
            min_margin,
            pass: bad_retained == 0,
        })
    }

    /// Indices of basis states with total occupation at most `T - 2`.
    pub fn guarded_states(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&s| self.total_occupation(s) + 2 <= self.occ_cut).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub states: usize,
    pub retained: usize,
    pub violations: usize,
    /// Smallest `E - |p|` over retained joint eigenvalues.
    pub min_margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundHamiltonian {
    Free,
    Interacting,
}

/// Power `(H + c)^s` of a symmetric positive semi-definite `H`.
fn shifted_power(eig: &nalgebra::SymmetricEigen<f64, nalgebra::Dyn>, c: f64, s: f64) -> DMatrix<f64> {
    let d = DVector::from_iterator(eig.eigenvalues.len(), eig.eigenvalues.iter().map(|&l| (l.max(0.0) + c).powf(s)));
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

fn compressed_min_eig(m: &DMatrix<f64>, keep: &[usize]) -> f64 {
    let c = DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])]);
    c.symmetric_eigen().eigenvalues.min()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhiBoundResult {
    pub c1: f64,
    pub c2: f64,
    pub min_eig_plus: f64,
    pub min_eig_minus: f64,
}

/// Search grid for both constants.
pub const CONSTANT_GRID: [f64; 13] = [1.0, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0, 50.0, 70.0, 100.0];

/// Precomputed pieces of the field bound for one `g`, `eps` and Hamiltonian.
pub struct PhiBound {
    eig: nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
    phi: DMatrix<f64>,
    norm: f64,
    power: f64,
    keep: Vec<usize>,
}

impl PhiBound {
    pub fn new(model: &FockModel, g: &[f64], eps: f64, which: BoundHamiltonian) -> Result<Self> {
        Self::with_power(model, g, eps, 0.5 + eps, which)
    }

    /// Same construction with an explicit power of `H + c2`.
    pub fn with_power(model: &FockModel, g: &[f64], eps: f64, power: f64, which: BoundHamiltonian) -> Result<Self> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::InvalidRunParameters(format!("epsilon {eps} outside [0, 1]")));
        }
        let h = match which {
            BoundHamiltonian::Free => model.free_hamiltonian(),
            BoundHamiltonian::Interacting => {
                if model.interaction.is_none() {
                    return Err(Error::InvalidRunParameters("interacting bound needs build_interaction first".into()));
                }
                model.hamiltonian()?
            }
        };
        Ok(Self {
            eig: h.symmetric_eigen(),
            phi: model.field_operator(g)?,
            norm: model.sobolev_norm(g, eps),
            power,
            keep: model.guarded_states(),
        })
    }

    /// Minimum eigenvalues of the compressed `c1 |g| (H + c2)^power -/+ phi(g)`.
    pub fn min_eigs(&self, c1: f64, c2: f64) -> (f64, f64) {
        let base = shifted_power(&self.eig, c2, self.power) * (c1 * self.norm);
        (compressed_min_eig(&(&base - &self.phi), &self.keep), compressed_min_eig(&(&base + &self.phi), &self.keep))
    }

    /// First `(c1, c2)` on [`CONSTANT_GRID`] (ordered by `c1`, then `c2`) where
    /// both compressed operators are `>= -tolerance`.
    pub fn find_constants(&self, tolerance: f64) -> Result<PhiBoundResult> {
        for &c1 in &CONSTANT_GRID {
            for &c2 in &CONSTANT_GRID {
                let (plus, minus) = self.min_eigs(c1, c2);
                if plus >= -tolerance && minus >= -tolerance {
                    return Ok(PhiBoundResult { c1, c2, min_eig_plus: plus, min_eig_minus: minus });
                }
            }
        }
        Err(Error::NoConstantsFound)
    }
}

pub fn phi_bound_check(
    model: &FockModel,
    g: &[f64],
    eps: f64,
    c1: f64,
    c2: f64,
    which: BoundHamiltonian,
) -> Result<(f64, f64)> {
    Ok(PhiBound::new(model, g, eps, which)?.min_eigs(c1, c2))
}

#[derive(Debug, Clone)]
pub struct GibbsSpec {
    pub hamiltonian: DMatrix<f64>,
    pub beta: f64,
    eig: nalgebra::SymmetricEigen<f64, nalgebra::Dyn>,
}

impl GibbsSpec {
    pub fn new(hamiltonian: DMatrix<f64>, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::NonPositiveParameter { name: "beta", value: beta });
        }
        if !hamiltonian.is_square() || (&hamiltonian - hamiltonian.transpose()).abs().max() > 1e-12 {
            return Err(Error::InvalidMatrix("hamiltonian must be square and symmetric".into()));
        }
        let eig = hamiltonian.clone().symmetric_eigen();
        Ok(Self { hamiltonian, beta, eig })
    }

    fn ground(&self) -> f64 {
        self.eig.eigenvalues.min()
    }

    /// `e^{-t beta (H - E_0)}`; the ground shift cancels in every ratio with `Z`.
    pub fn boltzmann(&self, t: f64) -> DMatrix<f64> {
        let e0 = self.ground();
        let d = DVector::from_iterator(
            self.eig.eigenvalues.len(),
            self.eig.eigenvalues.iter().map(|&l| (-t * self.beta * (l - e0)).exp()),
        );
        &self.eig.eigenvectors * DMatrix::from_diagonal(&d) * self.eig.eigenvectors.transpose()
    }

    /// Shifted partition function `tr e^{-beta (H - E_0)}`.
    pub fn partition(&self) -> f64 {
        let e0 = self.ground();
        self.eig.eigenvalues.iter().map(|&l| (-self.beta * (l - e0)).exp()).sum()
    }

    pub fn state(&self, a: &DMatrix<f64>) -> f64 {
        (self.boltzmann(1.0) * a).trace() / self.partition()
    }

    /// `||A||_p = (tr((e^{-beta H/p} A)^p) / Z)^{1/p}`.
    pub fn norm(&self, a: &DMatrix<f64>, p: usize) -> f64 {
        let x = self.boltzmann(1.0 / p as f64) * a;
        let mut acc = x.clone();
        for _ in 1..p {
            acc = &acc * &x;
        }
        (acc.trace().max(0.0) / self.partition()).powf(1.0 / p as f64)
    }
}

/// Smallest positive even `p` with `1/p <= gap`.
pub fn gibbs_exponent(gap: f64) -> Result<usize> {
    if !(gap > 0.0) {
        return Err(Error::ExponentInfeasible);
    }
    let mut p = 2usize;
    while 1.0 / (p as f64) > gap {
        p += 2;
    }
    Ok(p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsHolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub exponents: Vec<usize>,
    pub norms: Vec<f64>,
    pub pass: bool,
}

fn check_psd(a: &DMatrix<f64>, dim: usize) -> Result<()> {
    if a.nrows() != dim || a.ncols() != dim {
        return Err(Error::InvalidMatrix(format!("expected {dim}x{dim}")));
    }
    if (a - a.transpose()).abs().max() > 1e-10 || a.clone().symmetric_eigen().eigenvalues.min() < -1e-10 {
        return Err(Error::InvalidMatrix("observable must be positive semi-definite".into()));
    }
    Ok(())
}

/// `|tr(e^{-(1 - sum z) beta H} A_n e^{-z_n beta H} ... A_1 e^{-z_1 beta H} A_0)| / Z
/// <= prod ||A_j||_{p_j}`. Each `A_j` sees the two imaginary-time gaps next to
/// it on the circle, the wrap-around gap `1 - sum z` included, and `p_j` is the
/// smallest even integer with `1/p_j <= ` the smaller one.
pub fn gibbs_holder_check(spec: &GibbsSpec, a_list: &[DMatrix<f64>], z_list: &[f64]) -> Result<GibbsHolderReport> {
    let n = z_list.len();
    if a_list.len() != n + 1 {
        return Err(Error::InvalidMatrix(format!("need {} observables for {} gaps", n + 1, n)));
    }
    let dim = spec.hamiltonian.nrows();
    for a in a_list {
        check_psd(a, dim)?;
    }
    let total: f64 = z_list.iter().sum();
    if z_list.iter().any(|&z| !(z >= 0.0)) || total > 1.0 + 1e-15 {
        return Err(Error::InvalidRunParameters("need z_j >= 0 with sum at most 1".into()));
    }
    let wrap = (1.0 - total).max(0.0);
    // gaps[j] sits to the right of A_j in the product (between A_j and A_{j+1}).
    let mut gaps: Vec<f64> = z_list.to_vec();
    gaps.push(wrap);
    let exponents: Vec<usize> = (0..=n)
        .map(|j| {
            let left = if j == 0 { wrap } else { gaps[j - 1] };
            gibbs_exponent(left.min(gaps[j]))
        })
        .collect::<Result<_>>()?;

    let mut prod = &a_list[0] * DMatrix::<f64>::identity(dim, dim);
    for j in 1..=n {
        prod = &a_list[j] * spec.boltzmann(z_list[j - 1]) * prod;
    }
    prod = spec.boltzmann(wrap) * prod;
    let lhs = prod.trace().abs() / spec.partition();
    let norms: Vec<f64> = a_list.iter().zip(&exponents).map(|(a, &p)| spec.norm(a, p)).collect();
    let rhs: f64 = norms.iter().product();
    Ok(GibbsHolderReport { lhs, rhs, exponents, norms, pass: lhs <= rhs * (1.0 + 1e-10) })
}

/// Random Hamiltonian, PSD observables and feasible gaps for the Gibbs check.
pub fn random_gibbs_trial<R: Rng>(rng: &mut R, max_dim: usize) -> Result<(GibbsSpec, Vec<DMatrix<f64>>, Vec<f64>)> {
    let dim = rng.random_range(2..=max_dim);
    let x = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
    let spec = GibbsSpec::new((&x + x.transpose()) * 0.5, rng.random_range(0.1..3.0))?;
    let n = rng.random_range(0..=4);
    let mut z: Vec<f64> = (0..=n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = z.iter().sum();
    z.iter_mut().for_each(|v| *v /= total);
    z.pop();
    let a = (0..=n)
        .map(|_| {
            let cols = rng.random_range(1..=dim);
            let b = DMatrix::from_fn(dim, cols, |_, _| rng.random_range(-1.0..1.0));
            &b * b.transpose()
        })
        .collect();
    Ok((spec, a, z))
}
