//! Symplectic Jacobian test, Poisson brackets and maps from generating functions.

use hamiltonia::canonical::{
    bracket_defect, jacobi_residual, map_from_generating_function, point_transformation_generator, poisson_bracket,
    DomainBox, ObservableFn, PhaseMap,
};

fn main() -> hamiltonia::Result<()> {
    let x = [0.3, -0.7, 1.2, 0.5];
    let generated = map_from_generating_function(&point_transformation_generator(2, 0.1), DomainBox::cube(2, -50.0, 50.0));
    for m in [PhaseMap::identity(2), PhaseMap::polar(), generated] {
        println!("{:<24} residual {:.2e}", m.name, m.symplectic_residual(&x)?);
    }
    println!("{:<24} residual {:.6}", "scaling by 2", PhaseMap::scaling(1, 2.0).symplectic_residual(&[0.4, -1.1])?);
    println!("polar bracket defect {:.2e}", bracket_defect(&PhaseMap::polar(), &x)?);
    let f = ObservableFn::new(|x| x[0] * x[0] * x[1]);
    let g = ObservableFn::new(|x| x[0] * x[1] * x[1]);
    let q = ObservableFn::new(|x| x[0] + x[1]);
    println!("{{p^2 q, p q^2}} at (1, 2) = {:.10}", poisson_bracket(&f, &g, &[1.0, 2.0]));
    println!("Jacobi residual {:.2e}", jacobi_residual(&f, &g, &q, &[1.0, 2.0]));
    Ok(())
}
