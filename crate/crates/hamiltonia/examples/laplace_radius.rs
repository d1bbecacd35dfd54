//! Radius of convergence of the eccentricity series and the crude bounds.

use hamiltonia::kepler::laplace_report;

fn main() {
    let r = laplace_report();
    println!("Laplace radius          {:.10}", r.radius);
    println!("|eta(i r)|              {:.3e}", r.imaginary_axis_abs_eta);
    println!("eta(r) on the real axis {:.6}", r.real_axis_eta);
    println!("real unit point         {:.6}", r.real_axis_unit_point);
    println!("crude bounds            {} and {:.6}", r.crude_quarter, r.crude_inverse_e);
}
