//! Lower-dimensional torus surviving a resonance.

use std::f64::consts::PI;

use hamiltonia::base::{FourierSeries, FrequencyVector};
use hamiltonia::lindstedt::resonant_lindstedt;

fn main() -> hamiltonia::Result<()> {
    let f = FourierSeries::cosine(2, &[0, 1], 1.0)
        .add(&FourierSeries::cosine(2, &[1, 1], 1.0))
        .add(&FourierSeries::sine(2, &[1, 0], 0.5));
    let s = resonant_lindstedt(&f, &FrequencyVector::new(vec![1.3]), &[PI], 3)?;
    for eps in [1e-2, 1e-3] {
        println!("eps = {eps}: residual {:.3e}", s.residual(eps, 16));
    }
    println!("slow-angle shifts per order: {:?}", s.shifts);
    Ok(())
}
