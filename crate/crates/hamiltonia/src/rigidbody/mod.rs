//! Rigid body with a fixed point: Euler equations with quaternion
//! orientation, the Deprit chart, symmetric-top quadratures and the
//! Lagrange gyroscope.

pub mod deprit;
pub mod free;
pub mod gyroscope;
pub mod periods;

pub use deprit::{
    body_omega_from_rates, canonical_momenta, canonical_to_deprit, deprit_hamiltonian, deprit_map,
    deprit_to_canonical, verify_deprit_canonicity, DepritPoint, EulerAngles,
};
pub use free::{euler_rhs, integrate_free_body, rotation_of, FreeBodyRun, FreeBodySample, InertiaTriple};
pub use gyroscope::{gyroscope_hamiltonian, GyroRun, Gyroscope};
pub use periods::{
    body_periods, integrated_periods, phi_rate, psi_rate, rate_spread, BodyPeriods, PsiBranch,
};
