//! Wick powers three ways, and a check that `:phi^n:` has zero Gaussian mean
//! when the ordering constant is the field variance.
//!
//! cargo run --release --example wick_ordering

use pphi2::lattice::sample_gaussian;
use pphi2::wick::{lattice_wick_constant, wick_power, wick_power_hermite, wick_power_recursive};
use pphi2::{CylinderLattice, Dispersion, SpectralCovariance, WickLabel, WickPolynomial};

fn main() -> pphi2::Result<()> {
    let (phi, c) = (1.3, 0.7);
    for n in 0..=6 {
        println!(
            ":phi^{n}: = {:>10.6} (explicit) {:>10.6} (hermite) {:>10.6} (recursive)",
            wick_power(phi, c, n)?,
            wick_power_hermite(phi, c, n)?,
            wick_power_recursive(phi, c, n)?
        );
    }

    let lat = CylinderLattice::new(1.0, 2.0, 8, 16, 1.0, Dispersion::LatticeLaplacian)?;
    let cov = SpectralCovariance::new(&lat);
    let c = lattice_wick_constant(&cov);
    let samples = sample_gaussian(&cov, 7, 20_000);
    println!("site variance C = {c:.6}");
    for n in 1..=4 {
        let mean = samples.iter().map(|s| wick_power(s.at(0, 0), c, n).unwrap()).sum::<f64>() / samples.len() as f64;
        println!("<:phi^{n}:_C> = {mean:+.4}");
    }

    // Same quartic written against a different constant.
    let p = WickPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.1], c, WickLabel::CFull)?;
    let q = p.rewick(0.5 * c, WickLabel::Custom)?;
    println!("reordered coefficients {:?}", q.coefficients);
    println!("P(0.8) = {:.12} = {:.12}", p.eval(0.8), q.eval(0.8));
    Ok(())
}
