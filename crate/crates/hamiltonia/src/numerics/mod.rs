//! Numerical kernels shared by the physics modules: ODE integration, root
//! finding, quadrature and finite-difference derivatives.

pub mod diff;
pub mod ode;
pub mod quad;
pub mod roots;

pub use ode::{integrate, integrate_at, integrate_dense, leapfrog, OdeOptions, Trajectory};
