//! Samples the free field on a small cylinder and compares the empirical
//! two-point function with the spectral and dense Green's functions.
//!
//! cargo run --release --example free_field_sampling

use pphi2::lattice::{dense_green_oracle, sample_gaussian};
use pphi2::{CylinderLattice, Dispersion, SpectralCovariance};

fn main() -> pphi2::Result<()> {
    let lat = CylinderLattice::new(1.0, 2.0, 8, 16, 1.0, Dispersion::LatticeLaplacian)?;
    let cov = SpectralCovariance::new(&lat);
    let kernel = cov.green_kernel();
    let dense = dense_green_oracle(&lat)?;
    let samples = sample_gaussian(&cov, 42, 20_000);

    println!("{:>8} {:>12} {:>12} {:>12}", "dx", "empirical", "spectral", "dense");
    for dx in 0..=lat.n_x / 2 {
        let emp = samples.iter().map(|c| c.at(0, 0) * c.at(0, dx)).sum::<f64>() / samples.len() as f64;
        let spec = cov.green_from_kernel(&kernel, (0, 0), (0, dx));
        println!("{:>8.3} {:>12.6} {:>12.6} {:>12.6}", dx as f64 * lat.a_x(), emp, spec, dense[(0, lat.index(0, dx))]);
    }
    Ok(())
}
