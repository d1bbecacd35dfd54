//! Canonical labeled trees per order under the three filters.

use hamiltonia::base::HarmonicVector;
use hamiltonia::trees::{Forest, TreeFilter};

fn main() -> hamiltonia::Result<()> {
    let alphabet = HarmonicVector::ball(1, 1);
    for filter in [TreeFilter::All, TreeFilter::NonzeroCurrents, TreeFilter::Restricted] {
        let forest = Forest::build(&alphabet, 6, filter, u64::MAX)?;
        let counts: Vec<usize> = (1..=6).map(|k| forest.ids_of_order(k).len()).collect();
        println!("{filter:?}: {counts:?}");
    }
    let forest = Forest::build(&alphabet, 3, TreeFilter::All, u64::MAX)?;
    for id in forest.ids_of_order(3) {
        let t = forest.view(id).to_labeled();
        println!("{} multiplicity {}", t.encoding(), t.multiplicity());
    }
    Ok(())
}
