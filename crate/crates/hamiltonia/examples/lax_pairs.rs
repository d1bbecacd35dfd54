//! Isospectral Lax matrices of the Toda and Calogero lattices.

use hamiltonia::quadrature::{lax_eigenvalue_drift, LatticeKind, LatticeState};

fn main() -> hamiltonia::Result<()> {
    let cases = [
        (LatticeKind::Toda { m: 1.0, g: 1.0, kappa: 2.0 }, vec![1.0, -1.0], vec![0.0, 1.0]),
        (LatticeKind::Toda { m: 1.7, g: 0.6, kappa: 1.3 }, vec![0.5, -0.2, 0.1], vec![0.0, 0.8, 1.5]),
        (LatticeKind::Calogero { m: 1.0, g: 1.0, omega: 0.0 }, vec![0.3, 0.0, -0.4], vec![-1.0, 0.2, 1.5]),
        (LatticeKind::Sutherland { m: 1.0, g: 0.5 }, vec![0.2, 0.0, -0.2], vec![-1.0, 0.0, 1.0]),
    ];
    for (kind, p, q) in cases {
        let r = lax_eigenvalue_drift(&LatticeState::new(kind, p, q)?, 10.0, 0.1)?;
        println!("{kind:?}\n  spectrum {:?}\n  eigenvalue drift {:.1e}, matrix entries move by {:.3}", r.initial_spectrum, r.max_drift, r.max_entry_variation);
    }
    Ok(())
}
