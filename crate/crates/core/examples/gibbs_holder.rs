//! Hoelder inequality for imaginary-time ordered Gibbs correlators of random
//! matrices, with exponents chosen from the cyclic time gaps.
//!
//! cargo run --release --example gibbs_holder

use pphi2::fock::random_gibbs_trial;
use pphi2::fock::gibbs_holder_check;
use rand::SeedableRng;

fn main() -> pphi2::Result<()> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let (spec, a, z) = random_gibbs_trial(&mut rng, 12)?;
        let r = gibbs_holder_check(&spec, &a, &z)?;
        worst = worst.max(r.lhs / r.rhs);
        println!(
            "trial {trial:>2}: dim {:>2}, {} factors, exponents {:?}, |corr| {:.3e} <= {:.3e}",
            spec.hamiltonian.nrows(),
            a.len(),
            r.exponents,
            r.lhs,
            r.rhs
        );
    }
    println!("largest lhs/rhs ratio {worst:.3}");
    Ok(())
}
