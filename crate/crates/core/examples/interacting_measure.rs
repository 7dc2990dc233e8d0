//! Quartic interaction in a spatial window: reweighted Gaussian samples
//! against local Metropolis on the same lattice.
//!
//! cargo run --release --example interacting_measure

use pphi2::measure::{metropolis_expectations, reweighted_expectations, Estimator, MeasureSpec, MetropolisParams, Observable};
use pphi2::{CylinderLattice, Dispersion, FieldConfiguration};

fn main() -> pphi2::Result<()> {
    let lat = CylinderLattice::new(1.0, 2.0, 8, 16, 1.0, Dispersion::LatticeLaplacian)?;
    let spec = MeasureSpec::with_coefficients(lat, vec![0.0, 0.0, 0.0, 0.0, 0.2], 1.0, Estimator::Reweighting)?;
    let centre = lat.n_x / 2;
    let phi2 = move |c: &FieldConfiguration| c.at(0, centre).powi(2);
    let phi4 = move |c: &FieldConfiguration| c.at(0, centre).powi(4);
    let corr = move |c: &FieldConfiguration| c.at(0, centre) * c.at(lat.n_alpha / 2, centre);
    let obs: [&Observable; 3] = [&phi2, &phi4, &corr];

    let rw = reweighted_expectations(&obs, &spec, 1, 50_000)?;
    let mc = metropolis_expectations(&obs, &spec, &MetropolisParams::new(2, 40_000, 4_000, 2))?;
    println!("reweighting ESS {:.0}, ln Z/Z0 = {:.4}", rw.ess, rw.log_partition.value);
    println!("metropolis acceptance {:.2}, tau_int {:?}", mc.acceptance, mc.tau_int);
    for (name, (a, b)) in ["<phi^2>", "<phi^4>", "<phi(0)phi(beta/2)>"].iter().zip(rw.estimates.iter().zip(&mc.estimates)) {
        println!("{name:>22}: {:.5} +- {:.5} vs {:.5} +- {:.5} (pull {:.2})", a.value, a.std_error, b.value, b.std_error, a.pull(b));
    }
    Ok(())
}
