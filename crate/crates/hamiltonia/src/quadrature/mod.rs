//! Integration by quadratures: one-dimensional action-angle variables,
//! central motion, normal modes, free rotators, Lax-pair lattices and the
//! Melnikov matrix.

pub mod central;
pub mod lattice;
pub mod melnikov;
pub mod modes;
pub mod onedim;

pub use central::{
    central_actions, central_energy_jacobian, central_frequencies, central_orbit_frequencies, CentralActions,
    CentralFrequencies, CentralPotential, OrbitFrequencies,
};
pub use lattice::{lax_eigenvalue_drift, LatticeKind, LatticeState, LaxReport};
pub use melnikov::{arnold_melnikov_analytic, arnold_perturbation, melnikov_matrix, separatrix, MelnikovMatrix};
pub use modes::{free_rotator_flow, normal_modes, NormalModes, RotatorFlow};
pub use onedim::{orbit_table, OrbitRow, Potential1D};
