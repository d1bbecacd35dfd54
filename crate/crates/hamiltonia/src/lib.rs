//! Constructive machinery of classical Hamiltonian perturbation theory.
//!
//! The crate is organised by topic:
//!
//! - [`base`]: Fourier series on the torus, Diophantine frequencies, exact scalars.
//! - [`trees`]: rooted labeled trees, currents, tree values, divisor census.
//! - [`kepler`]: Kepler equation solvers, tree/recursion series, resummations.
//! - [`quadrature`]: action-angle quadratures, normal modes, Lax lattices, Melnikov matrix.
//! - [`canonical`]: symplectic Jacobian checks, Poisson brackets, generating functions.
//! - [`rigidbody`]: Euler equations, Deprit chart, symmetric top, gyroscope.
//! - [`lindstedt`]: Lindstedt series for invariant tori and their verification.
//! - [`cli`]: command-line front end and the acceptance battery.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod base;
pub mod canonical;
pub mod cli;
pub mod error;
pub mod kepler;
pub mod lindstedt;
pub mod numerics;
pub mod quadrature;
pub mod rigidbody;
pub mod suite;
pub mod trees;

pub use error::{Error, Result};
