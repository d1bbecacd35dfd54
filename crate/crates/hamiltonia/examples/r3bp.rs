//! Regularized restricted three-body Hamiltonian near circular orbits.

use hamiltonia::kepler::r3bp::{polar_to_pq, pq_hessian};
use hamiltonia::kepler::{levi_civita_map, r3bp_secular_hamiltonian, regularized_r3bp_hamiltonian, R3bpForm, R3bpParams};

fn main() -> hamiltonia::Result<()> {
    let p = R3bpParams::default();
    let (l, g, lambda, gamma, eps) = (1.2, 0.1, 0.7, 1.9, 0.01);
    let (pp, qq) = polar_to_pq(g, gamma);
    let secular = r3bp_secular_hamiltonian(l, l - g, lambda + gamma, -gamma, eps, &p)?;
    for form in [R3bpForm::Composition, R3bpForm::AsPrinted] {
        let h = regularized_r3bp_hamiltonian(l, lambda, pp, qq, eps, &p, form)?;
        println!("{form:?}: H = {h:.15}, secular = {secular:.15}, gap = {:.2e}", (h - secular).abs());
    }
    let hess = pq_hessian(1.0, 0.3, 0.0, 0.0, 0.05, &p, R3bpForm::Composition, 1e-4)?;
    println!("Hessian in (p, q) at the origin: {hess:?}");
    println!("square roots of -0.3 + 2.2i: {:?}", levi_civita_map(-0.3, 2.2));
    Ok(())
}
