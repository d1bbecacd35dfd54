//! Resonance surfaces crossing a box of actions for an anisochronous system.

use hamiltonia::base::FourierSeries;
use hamiltonia::lindstedt::poincare_obstruction_scan;

fn main() -> hamiltonia::Result<()> {
    let f = FourierSeries::cosine(2, &[1, -1], 1.0).add(&FourierSeries::cosine(2, &[1, 0], 1.0));
    let omega = |a: &[f64]| vec![a[0], a[1]];
    for w in poincare_obstruction_scan(&f, omega, &[0.5, 0.5], &[1.5, 1.5], 4, 9)? {
        println!("nu {:?}: {} points, first {:?}", w.nu, w.points.len(), w.points.first());
    }
    Ok(())
}
