//! Closed-form thermal covariances: the two forms of the sharp-time
//! covariance, the mixed kernel across the circle, and the spatial kernel.
//!
//! cargo run --release --example oracle_tables

use pphi2::oracles::{cov_circle_cbeta, cov_mixed_sharp_time, cov_spatial_circle, cov_thermal_c0, cov_thermal_c0_coth, DispersionParams};

fn main() -> pphi2::Result<()> {
    let p = DispersionParams::new(2.0, 1.0)?;
    println!("{:>6} {:>14} {:>14} {:>14}", "k", "c0", "coth form", "mixed d=beta/4");
    for i in 0..=10 {
        let k = i as f64;
        println!(
            "{k:>6.1} {:>14.10} {:>14.10} {:>14.10}",
            cov_thermal_c0(k, &p),
            cov_thermal_c0_coth(k, &p),
            cov_mixed_sharp_time(p.beta / 4.0, k, &p)?
        );
    }
    println!("{:>6} {:>14} {:>14}", "n", "circle c_beta", "spatial d=0.5");
    for n in 0..=5 {
        println!("{n:>6} {:>14.10} {:>14.10}", cov_circle_cbeta(n, &p), cov_spatial_circle(0.5, n, &p));
    }
    Ok(())
}
