//! Exact eccentricity series of ξ − λ by recursion, trees and the Lagrange formula.

use hamiltonia::kepler::{kepler_series_recursion, kepler_series_trees, lagrange_series, resummed_series_eval};
use hamiltonia::trees::default_budget;

fn main() -> hamiltonia::Result<()> {
    let orders = kepler_series_recursion(6)?;
    for (k, h) in orders.iter().enumerate() {
        let terms: Vec<String> = h.iter().map(|(nu, c)| format!("{nu}:({} + {}i)", c.re, c.im)).collect();
        println!("h^({}) = {}", k + 1, terms.join("  "));
    }
    for k in 1..=6 {
        let trees = kepler_series_trees(k, true, default_budget())?;
        println!("order {k}: trees agree {}, Lagrange agrees {}", trees == orders[k - 1], lagrange_series(k) == orders[k - 1]);
    }
    let v = resummed_series_eval(0.3, 1.0, 12)?;
    println!("e = 0.3, psi = 1: plain {:.12} levi-civita {:.12} newton {:.12}", v.plain, v.levi_civita, v.newton);
    Ok(())
}
