//! Lindstedt series of the invariant torus, residual scaling and the flow check.

use hamiltonia::base::{golden_frequency, DoubleDouble, Real};
use hamiltonia::lindstedt::{default_perturbation, lindstedt_recursion, residual_doubling_ratio, torus_residual, verify_torus_flow};

fn main() -> hamiltonia::Result<()> {
    let (f, omega) = (default_perturbation(), golden_frequency());
    let dd = lindstedt_recursion::<DoubleDouble>(&f, &omega, 8)?;
    let eps = DoubleDouble::from_f64(1e-3);
    println!("K = 8 residual at eps = 1e-3: {:.3e}", torus_residual(&dd, eps, 8)?);
    println!("residual ratio under eps doubling: {:.2} (expect 2^9 = 512)", residual_doubling_ratio(&dd, eps, 8)?);
    let series = lindstedt_recursion::<f64>(&f, &omega, 8)?;
    let flow = verify_torus_flow(&series, 1e-3, &[0.3, -1.2], 10.0, 0.5)?;
    println!("max deviation of the flow from the torus over t <= 10: {:.2e}", flow.max_deviation);
    Ok(())
}
