//! Lattice simulator and verification suite for the thermal P(phi)_2 model
//! on a Euclidean cylinder `S_beta x R`, approximated by a torus.
//!
//! The pieces build on each other: [`lattice`] discretizes and samples the
//! free field, [`wick`] handles normal ordering, [`oracles`] holds the
//! closed-form continuum formulas, [`measure`] samples the interacting
//! measure, [`estimate`] runs the statistical checks, [`continuation`] covers
//! complex-time analyticity of the free theory, and [`fock`] works in a
//! truncated Fock space on the circle. [`cli`] drives batch runs.

pub mod cli;
pub mod continuation;
pub mod error;
pub mod estimate;
pub mod fock;
pub mod lattice;
pub mod measure;
pub mod oracles;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod wick;

pub use error::{Error, Result};
pub use lattice::{CylinderLattice, Dispersion, FieldConfiguration, SpectralCovariance};
pub use stats::{Estimate, EstimateMethod};
pub use wick::{WickLabel, WickPolynomial};
