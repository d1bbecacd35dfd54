//! Normal modes of coupled oscillators and free rotators.

use hamiltonia::quadrature::{free_rotator_flow, normal_modes};

fn main() -> hamiltonia::Result<()> {
    let m = normal_modes(&[1.0, 2.0, 1.0], &[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]])?;
    println!("frequencies {:?}", m.frequencies);
    let (p, q) = ([0.1, -0.2, 0.3], [0.5, 0.0, -0.4]);
    println!("actions {:?}; H = {:.12} = sum omega A = {:.12}", m.actions(&p, &q), m.hamiltonian(&p, &q), m.energy_from_actions(&p, &q));
    let r = free_rotator_flow(&[1.0, 2.0], &[0.5, 1.0], &[0.0, 1.0], 3.0)?;
    println!("rotators after t = 3: alpha {:?}, frequencies {:?}", r.alpha, r.frequencies);
    Ok(())
}
