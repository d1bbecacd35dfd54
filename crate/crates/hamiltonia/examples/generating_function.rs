//! Generating function of the family of invariant tori.

use hamiltonia::base::golden_frequency;
use hamiltonia::lindstedt::{default_perturbation, lindstedt_recursion, torus_generating_function};

fn main() -> hamiltonia::Result<()> {
    let series = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), 8)?;
    let s = torus_generating_function(&series, 1e-3, 16)?.summary();
    println!("closure residual {:.2e}, torus defect {:.2e}", s.closure_residual, s.torus_defect);
    println!("a = {:?} (alternative form {:?})", s.a, s.a_alt);
    Ok(())
}
