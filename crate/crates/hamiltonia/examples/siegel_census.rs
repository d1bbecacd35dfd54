//! Exhaustive divisor census over restricted trees with the golden frequency.
//!
//! Run with `cargo run --release --example siegel_census -- 6 2`.

use hamiltonia::base::golden_frequency;
use hamiltonia::trees::{siegel_scan, LabeledTree, siegel_census};
use hamiltonia::base::HarmonicVector;

fn main() -> hamiltonia::Result<()> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let omega = golden_frequency();

    let chain = LabeledTree::from_parents(&[
        (HarmonicVector::new(&[2, -3]), None),
        (HarmonicVector::new(&[-1, 1]), Some(0)),
        (HarmonicVector::new(&[0, 1]), Some(1)),
    ])?;
    println!("chain currents: {:?}", chain.line_currents());
    for scale in 0..3 {
        println!("  lines on scale {scale}: {}", siegel_census(&chain, &omega, scale, 5)?);
    }

    let start = std::time::Instant::now();
    let report = siegel_scan(&omega, k, n, 200_000_000)?;
    println!("restricted trees per order: {:?}", report.trees_per_order);
    println!("violations: {}", report.violations);
    println!("max count/bound ratio: {:.4}", report.max_ratio);
    println!("deepest scale seen: {}", report.max_scale);
    println!("elapsed: {:.2?}", start.elapsed());
    Ok(())
}
