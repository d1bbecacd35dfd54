//! Melnikov matrix along the pendulum separatrix, numeric against closed form.

use hamiltonia::quadrature::{arnold_melnikov_analytic, arnold_perturbation, melnikov_matrix};

fn main() -> hamiltonia::Result<()> {
    for alpha in [[0.3, 1.1], [1.0, -0.4]] {
        for omega in [[0.0, 0.0], [0.5, 1.0]] {
            let m = melnikov_matrix(arnold_perturbation, [0.0, 0.0], alpha, omega, 1.0)?;
            let exact = arnold_melnikov_analytic(alpha, omega, 1.0);
            println!("alpha {alpha:?} omega {omega:?}: det {:+.12} closed form {:+.12}", m.det, exact.det);
        }
    }
    Ok(())
}
