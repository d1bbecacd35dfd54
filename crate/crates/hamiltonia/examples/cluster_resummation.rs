//! Cluster matrices on the smallest divisors and the resummed propagator.

use hamiltonia::base::{golden_frequency, HarmonicVector};
use hamiltonia::lindstedt::{default_perturbation, divisor_probe, resummation_gap, smallest_divisors, ClusterKernel};

fn main() -> hamiltonia::Result<()> {
    let omega = golden_frequency();
    let kernel = ClusterKernel::build(&default_perturbation(), &omega, 5f64.sqrt(), 4, u64::MAX)?;
    let m = kernel.matrix(&HarmonicVector::new(&[1, 0]))?;
    println!("first-order cluster norm {:.1e}, hermiticity defect {:.1e}", m.first_order_norm(), m.hermiticity_defect());
    for p in divisor_probe(&kernel, 1e-3, 30, 8)? {
        println!("nu {:?}: divisor {:+.3e}, ratio {:.6}", p.nu, p.divisor, p.ratio);
    }
    let mut gap = 0.0f64;
    for nu in smallest_divisors(&omega, 30, 20) {
        gap = gap.max(resummation_gap(omega.dot(&nu), &kernel.matrix(&nu)?.value(1e-3), 10)?);
    }
    println!("resummed against 10-term geometric sum: {gap:.2e}");
    Ok(())
}
