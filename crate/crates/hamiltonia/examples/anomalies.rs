//! Mean, eccentric and true anomalies with the identities that tie them, plus the f/g fit.

use hamiltonia::kepler::{anomalies, fg_leading_coefficients};

fn main() -> hamiltonia::Result<()> {
    for (e, lambda) in [(0.1, 0.5), (0.5, 2.0), (0.8, -1.0)] {
        let t = anomalies(e, lambda)?;
        println!("e={e} lambda={lambda}: xi={:.12} theta={:.12} rho/a={:.12} max residual {:.1e}", t.xi, t.theta, t.rho_over_a, t.max_residual());
    }
    let fg = fg_leading_coefficients(3)?;
    println!("g ~ x({:.6} + {:.6} y)   f ~ x({:.6} + {:.6} y)", fg.g_linear, fg.g_xy, fg.f_linear, fg.f_xy);
    Ok(())
}
