//! Free rigid body: Euler equations, the Deprit chart and the period quadratures.

use hamiltonia::numerics::OdeOptions;
use hamiltonia::rigidbody::{body_periods, integrate_free_body, integrated_periods, verify_deprit_canonicity, EulerAngles, InertiaTriple};

fn main() -> hamiltonia::Result<()> {
    let i = InertiaTriple::new(1.0, 2.0, 3.0)?;
    let w0 = [0.3, 0.2, 0.8];
    let run = integrate_free_body(&i, &w0, &[1.0, 0.0, 0.0, 0.0], 100.0, 0.5, OdeOptions::tight())?;
    println!("relative drift: energy {:.1e}, |M|^2 {:.1e}, lab momentum {:.1e}", run.energy_drift, run.momentum_drift, run.lab_momentum_drift);
    let quad = body_periods(&i, i.kinetic_energy(&w0), i.momentum_squared(&w0).sqrt())?;
    let num = integrated_periods(&i, &w0, &EulerAngles::new(0.9, 0.4, -0.3))?;
    println!("T_L {:.10} (integrated {:.10}), T_G {:.10} (integrated {:.10})", quad.t_l, num.t_l, quad.t_g, num.t_g);
    let r = verify_deprit_canonicity(&[0.2, -0.4, 0.7, 1.1, 0.5, -2.0])?;
    println!("Deprit chart symplectic residual {:.2e}", r.residual);
    Ok(())
}
