//! Reflection positivity: Gram matrices of functionals supported in the
//! positive half, for both the time and the space reflection.
//!
//! cargo run --release --example os_positivity

use pphi2::estimate::{default_os_functionals, os_positivity_gram, Reflection};
use pphi2::measure::{Estimator, MeasureSpec, RunParams};
use pphi2::{CylinderLattice, Dispersion};

fn main() -> pphi2::Result<()> {
    let lat = CylinderLattice::new(1.0, 2.0, 8, 16, 1.0, Dispersion::LatticeLaplacian)?;
    let spec = MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 0.0, 0.0, 0.1], 1.0, Estimator::Reweighting)?;
    let run = RunParams { n_samples: 40_000, ..RunParams::default() };
    for reflection in [Reflection::AlphaReflection, Reflection::XReflection] {
        let fs = default_os_functionals(&lat, reflection)?;
        let r = os_positivity_gram(&fs, reflection, &spec, &run)?;
        println!("{reflection:?}: {} functionals", fs.len());
        for row in &r.entries {
            println!("  {}", row.iter().map(|e| format!("{:>9.5}", e.value)).collect::<Vec<_>>().join(" "));
        }
        println!("  min eigenvalue {:.3e}, noise {:.1e}, pass {}", r.min_eigenvalue, r.noise, r.pass);
    }
    Ok(())
}
