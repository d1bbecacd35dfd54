//! Birkhoff series of an isochronous system and the conjugacy check.

use hamiltonia::base::GOLDEN;
use hamiltonia::lindstedt::{birkhoff_closed_form, birkhoff_conjugacy, birkhoff_series, positive_perturbation};

fn main() -> hamiltonia::Result<()> {
    let f = positive_perturbation(3, 0.5);
    let omega0 = [1.0, GOLDEN];
    let s = birkhoff_series(&f, &omega0, 8)?;
    println!("geometric ratio at eps = 0.05: {:.4}", s.geometric_ratio(0.05));
    println!("order-8 partial sum against the closed form: {:.2e}", s.resummation_gap(0.05)?);
    let rep = birkhoff_conjugacy(&f, &omega0, 0.05, &[0.4, -0.2], &[0.3, 1.1], 10.0, 0.1)?;
    println!("conjugacy error over t <= 10: {:.2e}", rep.max_error());
    match birkhoff_closed_form(&f, &omega0, 2.0 - GOLDEN) {
        Err(e) => println!("at eps = 2 - golden: {e}"),
        Ok(_) => println!("at eps = 2 - golden: unexpectedly finite"),
    }
    Ok(())
}
