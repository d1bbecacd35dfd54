//! Period, action and the standard solution of one-dimensional wells.

use hamiltonia::quadrature::{orbit_table, Potential1D};

fn main() -> hamiltonia::Result<()> {
    for pot in [Potential1D::harmonic(1.0, 2.0), Potential1D::quartic(1.0, 1.0), Potential1D::pendulum(1.0, 1.0, 1.0)] {
        println!("{}:", pot.name());
        for row in orbit_table(&pot, &[0.1, 0.5, 1.5])? {
            println!("  E={:<4} T={:.10} A={:.10}", row.energy, row.period, row.action);
        }
    }
    let pot = Potential1D::quartic(1.0, 1.0);
    let t = pot.period(1.0)?;
    for k in 0..4 {
        let (q, qdot) = pot.standard_solution(1.0, k as f64 * t / 4.0)?;
        println!("quartic at t = {k}T/4: q = {q:+.10}, qdot = {qdot:+.10}");
    }
    Ok(())
}
