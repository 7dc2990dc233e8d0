//! Random points inside and outside the relativistic tube: membership is
//! predicted from the imaginary parts and confirmed by evaluating the
//! Wightman function and probing the Cauchy-Riemann equations.
//!
//! cargo run --release --example tube_scan

use pphi2::continuation::{tube_scan, ScanSettings};
use pphi2::oracles::{DispersionParams, RegionSpec};

fn main() -> pphi2::Result<()> {
    let p = DispersionParams::new(2.0, 1.0)?;
    let spec = RegionSpec::new(2.0, vec![1.0])?;
    let r = tube_scan(&p, &spec, 10, 10, 3, &ScanSettings::default())?;
    println!("{}/{} classified correctly", r.correct, r.total);
    for row in &r.rows {
        let (a, b) = row.point.imaginary_offset();
        println!(
            "  Im = ({a:+.3}, {b:+.3}) inside {:<5} evaluated {:<5} tail {:.1e} CR {:.1e}",
            row.expected_inside, row.evaluated, row.tail_bound, row.cr_residual
        );
    }
    Ok(())
}
