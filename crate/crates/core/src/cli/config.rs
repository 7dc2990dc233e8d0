//! Run configuration: TOML with one table per experiment.
//!
//! Every key is optional. Unknown keys are rejected so typos fail loudly.
//!
//! ```toml
//! seed = 1
//! threads = 0            # 0 = all cores
//! out = "out"
//! tolerance_scale = 1.0
//!
//! [lattice]
//! beta = 1.0
//! half_length = 4.0
//! n_alpha = 16
//! n_x = 64
//! mass = 1.0
//! dispersion = "lattice-laplacian"  # or "continuum-modes"
//!
//! [measure]
//! P = [0, 0, 0, 0, 0.05]  # coefficients of lambda^0, lambda^1, ...
//! l = 2.0                 # spatial cutoff, defaults to half_length
//! estimator = "reweighting"
//! n_samples = 20000
//! sweeps = 22000
//! burn_in = 2000
//! thin = 2
//! ```
//!
//! The `[sample]`, `[battery]`, `[tube]`, `[fock]`, `[nelson]` and
//! `[oracles]` tables configure the matching subcommands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{CylinderLattice, Dispersion};
use crate::measure::Estimator;
use crate::wick::is_bounded_below;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub threads: usize,
    pub out: String,
    pub tolerance_scale: f64,
    pub lattice: LatticeConfig,
    pub measure: MeasureConfig,
    pub sample: SampleConfig,
    pub battery: BatteryConfig,
    pub tube: TubeConfig,
    pub fock: FockConfig,
    pub nelson: NelsonConfig,
    pub oracles: OracleConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: 0,
            out: "out".into(),
            tolerance_scale: 1.0,
            lattice: LatticeConfig::default(),
            measure: MeasureConfig::default(),
            sample: SampleConfig::default(),
            battery: BatteryConfig::default(),
            tube: TubeConfig::default(),
            fock: FockConfig::default(),
            nelson: NelsonConfig::default(),
            oracles: OracleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeConfig {
    pub beta: f64,
    pub half_length: f64,
    pub n_alpha: usize,
    pub n_x: usize,
    pub mass: f64,
    #[serde(with = "dispersion_name")]
    pub dispersion: Dispersion,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { beta: 1.0, half_length: 4.0, n_alpha: 16, n_x: 64, mass: 1.0, dispersion: Dispersion::LatticeLaplacian }
    }
}

mod dispersion_name {
    use super::Dispersion;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Dispersion, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match d {
            Dispersion::LatticeLaplacian => "lattice-laplacian",
            Dispersion::ContinuumModes => "continuum-modes",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Dispersion, D::Error> {
        match String::deserialize(d)?.as_str() {
            "lattice-laplacian" => Ok(Dispersion::LatticeLaplacian),
            "continuum-modes" => Ok(Dispersion::ContinuumModes),
            other => Err(serde::de::Error::unknown_variant(other, &["lattice-laplacian", "continuum-modes"])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    pub l: Option<f64>,
    #[serde(with = "estimator_name")]
    pub estimator: Estimator,
    pub n_samples: usize,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thin: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            p: Vec::new(),
            l: None,
            estimator: Estimator::Reweighting,
            n_samples: 20_000,
            sweeps: 22_000,
            burn_in: 2_000,
            thin: 2,
        }
    }
}

mod estimator_name {
    use super::Estimator;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Estimator, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match e {
            Estimator::Reweighting => "reweighting",
            Estimator::Metropolis => "metropolis",
        })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Estimator, D::Error> {
        match String::deserialize(d)?.as_str() {
            "reweighting" => Ok(Estimator::Reweighting),
            "metropolis" => Ok(Estimator::Metropolis),
            other => Err(serde::de::Error::unknown_variant(other, &["reweighting", "metropolis"])),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub count: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { count: 4 }
    }
}

pub const BATTERY_CHECKS: [&str; 8] =
    ["green", "moments", "wick", "estimators", "os", "periodicity", "moment-growth", "holder"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatteryConfig {
    pub checks: Vec<String>,
    /// Width of the Gaussian spatial profile used for sharp-time fields.
    pub profile_width: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self { checks: BATTERY_CHECKS.iter().map(|s| s.to_string()).collect(), profile_width: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeConfig {
    /// Defaults to `lattice.beta` / `lattice.mass`.
    pub beta: Option<f64>,
    pub mass: Option<f64>,
    pub lambda: f64,
    pub n_inside: usize,
    pub n_outside: usize,
    pub kms: bool,
    pub tolerance: f64,
}

impl Default for TubeConfig {
    fn default() -> Self {
        Self { beta: None, mass: None, lambda: 1.0, n_inside: 50, n_outside: 50, kms: true, tolerance: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FockConfig {
    pub beta: f64,
    pub mass: f64,
    pub mode_cut: usize,
    pub occ_cut: usize,
    #[serde(rename = "P")]
    pub p: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub n_g: usize,
    pub gibbs_trials: usize,
    pub gibbs_max_dim: usize,
}

impl Default for FockConfig {
    fn default() -> Self {
        Self {
            beta: 2.0 * std::f64::consts::PI,
            mass: 1.0,
            mode_cut: 2,
            occ_cut: 4,
            p: vec![0.0, 0.0, 0.0, 0.0, 0.05],
            epsilons: vec![0.0, 0.5, 1.0],
            n_g: 20,
            gibbs_trials: 200,
            gibbs_max_dim: 40,
        }
    }
}

pub const NELSON_VARIANTS: [&str; 3] = ["exact-free", "reordered-pair", "swapped-lattice"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NelsonConfig {
    /// Empty selects every variant the lattice supports.
    pub variants: Vec<String>,
}

impl Default for NelsonConfig {
    fn default() -> Self {
        Self { variants: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub k_max: f64,
    pub n_k: usize,
    pub n_max: i64,
    pub n_d: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { k_max: 10.0, n_k: 21, n_max: 10, n_d: 11 }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::ValidationError { field: field.to_string(), message: message.into() }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| Error::ParseError {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

impl RunConfig {
    pub fn lattice(&self) -> Result<CylinderLattice> {
        let l = &self.lattice;
        CylinderLattice::new(l.beta, l.half_length, l.n_alpha, l.n_x, l.mass, l.dispersion).map_err(|e| match e {
            Error::NonPositiveParameter { name, .. } | Error::OddLatticeSize { name, .. } => {
                let key = if name == "L" { "half_length" } else { name };
                invalid(&format!("lattice.{key}"), e.to_string())
            }
            other => other,
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.measure.l.unwrap_or(self.lattice.half_length)
    }

    /// Fails on the first parameter that breaks a module invariant.
    pub fn validate(&self) -> Result<()> {
        let lat = self.lattice()?;
        if !(self.tolerance_scale.is_finite() && self.tolerance_scale >= 0.0) {
            return Err(invalid("tolerance_scale", "must be finite and non-negative"));
        }
        let m = &self.measure;
        if m.p.iter().any(|c| !c.is_finite()) {
            return Err(invalid("measure.P", "coefficients must be finite"));
        }
        if !is_bounded_below(&m.p) {
            return Err(invalid("measure.P", "polynomial is not bounded below (bounded-below)"));
        }
        if m.p.len() > crate::wick::MAX_DEGREE + 1 {
            return Err(invalid("measure.P", format!("degree above {}", crate::wick::MAX_DEGREE)));
        }
        let l = self.cutoff();
        if !(l > 0.0 && l <= lat.half_length) {
            return Err(invalid("measure.l", format!("must lie in (0, {}]", lat.half_length)));
        }
        if m.n_samples < 100 {
            return Err(invalid("measure.n_samples", "at least 100 samples"));
        }
        if m.thin == 0 || m.sweeps <= m.burn_in {
            return Err(invalid("measure.sweeps", "need sweeps > burn_in and thin >= 1"));
        }
        if m.estimator == Estimator::Metropolis && lat.dispersion != Dispersion::LatticeLaplacian {
            return Err(invalid("measure.estimator", "Metropolis needs the lattice-laplacian dispersion"));
        }
        if self.sample.count == 0 {
            return Err(invalid("sample.count", "must be positive"));
        }
        for c in &self.battery.checks {
            if !BATTERY_CHECKS.contains(&c.as_str()) {
                return Err(invalid("battery.checks", format!("unknown check {c:?}")));
            }
        }
        if !(self.battery.profile_width > 0.0) {
            return Err(invalid("battery.profile_width", "must be positive"));
        }
        let t = &self.tube;
        for (name, v) in [("tube.beta", t.beta), ("tube.mass", t.mass)] {
            if v.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
                return Err(invalid(name, "must be positive"));
            }
        }
        if !(t.lambda > 0.0 && t.lambda <= 1.0) {
            return Err(invalid("tube.lambda", "must lie in (0, 1]"));
        }
        if t.n_inside < 10 || t.n_outside < 10 {
            return Err(invalid("tube.n_inside", "at least 10 points of each kind"));
        }
        if !(t.tolerance > 0.0) {
            return Err(invalid("tube.tolerance", "must be positive"));
        }
        let f = &self.fock;
        for (name, v) in [("fock.beta", f.beta), ("fock.mass", f.mass)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, "must be positive"));
            }
        }
        if f.mode_cut > 6 || f.occ_cut > 6 || f.occ_cut < 2 {
            return Err(invalid("fock.occ_cut", "need mode_cut <= 6 and 2 <= occ_cut <= 6"));
        }
        if f.p.len() > 5 || !is_bounded_below(&f.p) {
            return Err(invalid("fock.P", "need a bounded-below polynomial of degree at most 4"));
        }
        if f.epsilons.iter().any(|e| !(0.0..=1.0).contains(e)) {
            return Err(invalid("fock.epsilons", "each epsilon must lie in [0, 1]"));
        }
        if f.gibbs_max_dim < 2 {
            return Err(invalid("fock.gibbs_max_dim", "at least 2"));
        }
        for v in &self.nelson.variants {
            if !NELSON_VARIANTS.contains(&v.as_str()) {
                return Err(invalid("nelson.variants", format!("unknown variant {v:?}")));
            }
        }
        let o = &self.oracles;
        if o.n_k < 2 || o.n_d < 2 || o.n_max < 0 || !(o.k_max > 0.0) {
            return Err(invalid("oracles", "need n_k, n_d >= 2, n_max >= 0, k_max > 0"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}
