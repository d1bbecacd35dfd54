//! Central motion: frequencies and actions from quadratures against an integrated orbit.

use hamiltonia::quadrature::{central_actions, central_frequencies, central_orbit_frequencies, CentralPotential};

fn main() -> hamiltonia::Result<()> {
    let kepler = CentralPotential::newtonian(1.0, 1.0);
    let (e, g) = (-0.3, 1.0);
    let f = central_frequencies(&kepler, e, g)?;
    let a = central_actions(&kepler, e, g)?;
    let o = central_orbit_frequencies(&kepler, e, g, 3, f.radial_period / 200.0)?;
    println!("Newtonian: omega0 {:.12} omega1 {:.12} (integrated {:.12} {:.12})", f.omega0, f.omega1, o.omega0, o.omega1);
    println!("actions A1 = {:.12}, A2 = {}", a.a1, a.a2);
    let osc = CentralPotential::harmonic(1.0, 1.0);
    let f = central_frequencies(&osc, 2.0, 1.0)?;
    println!("harmonic: omega0 {:.12} omega1 {:.12}", f.omega0, f.omega1);
    Ok(())
}
