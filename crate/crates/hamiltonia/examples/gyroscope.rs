//! Lagrange gyroscope integrated in Deprit variables.

use hamiltonia::numerics::OdeOptions;
use hamiltonia::rigidbody::{DepritPoint, Gyroscope};

fn main() -> hamiltonia::Result<()> {
    let gyro = Gyroscope::new(1.0, 2.0, 1.0, 1.0, 0.5)?;
    let d = DepritPoint { m3: 0.4, gamma: 0.2, l: 0.7, psi: -0.5, g: 1.2, phi: 1.1 };
    println!("H = {:.12}", gyro.hamiltonian(&d)?);
    let run = gyro.integrate(&d, 20.0, 0.5, OdeOptions::tight())?;
    println!("drifts: H {:.1e}, M3 {:.1e}, L {:.1e}", run.energy_drift, run.m3_drift, run.l_drift);
    println!("G moved from {} to {:.6}", d.g, run.final_point.g);
    Ok(())
}
