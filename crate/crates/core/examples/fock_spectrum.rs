//! Truncated Fock space on the circle: interacting ground state, the
//! spectrum condition E >= |P| and the relative bound of the smeared field.
//!
//! cargo run --release --example fock_spectrum

use pphi2::fock::{BoundHamiltonian, FockModel, PhiBound};
use pphi2::{WickLabel, WickPolynomial};

fn main() -> pphi2::Result<()> {
    let mut model = FockModel::new(2.0 * std::f64::consts::PI, 1.0, 2, 4)?;
    println!("dimension {}, truncated c_beta {:.6}", model.dim(), model.truncated_c_beta());
    println!("[a, a*] defect {:.1e}", model.commutator_defect());

    let p = WickPolynomial::new(vec![0.0, 0.0, 0.0, 0.0, 0.1], model.truncated_c_beta(), WickLabel::CBeta)?;
    let int = model.build_interaction(&p)?;
    println!("E_C = {:.6}, |<Omega_0|Omega>|^2 = {:.4}, gap {:.4}", int.e_c, int.vacuum_overlap.powi(2), int.gap);

    let s = model.spectrum_condition(1e-10)?;
    println!("spectrum: {}/{} states retained, {} violations, min E - |P| {:.4}", s.retained, s.states, s.violations, s.min_margin);

    let g: Vec<f64> = (0..model.mode_count()).map(|q| 1.0 / (1.0 + q as f64)).collect();
    for eps in [0.0, 0.5, 1.0] {
        let b = PhiBound::new(&model, &g, eps, BoundHamiltonian::Interacting)?;
        let c = b.find_constants(1e-10)?;
        println!("eps = {eps}: c1 = {}, c2 = {}, min eigenvalues {:.3e} / {:.3e}", c.c1, c.c2, c.min_eig_plus, c.min_eig_minus);
    }
    Ok(())
}
