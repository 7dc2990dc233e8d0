//! Boundary values of the free thermal two-point function approached from
//! both edges of the strip, compared through the KMS condition.
//!
//! cargo run --release --example kms_boundary

use pphi2::continuation::{default_kms_grid, kms_boundary_check};
use pphi2::oracles::{DispersionParams, QuadSpec};

fn main() -> pphi2::Result<()> {
    let p = DispersionParams::new(2.0, 1.0)?;
    let r = kms_boundary_check(&p, &default_kms_grid(), &QuadSpec::default())?;
    println!("{} grid points, max deviation {:.2e}, refinement ratio >= {:.2}", r.rows.len(), r.max_deviation, r.min_refinement_ratio);
    for row in r.rows.iter().step_by(17) {
        println!("  s = {:+.2} y = {:+.2}: deviation {:.1e}, raw {:.1e}, richardson {:.1e}", row.s, row.y, row.deviation, row.raw_errors[0], row.richardson_errors[0]);
    }
    Ok(())
}
