//! Canonical transformations: the symplectic Jacobian test, Poisson
//! brackets, and maps built from generating functions.

pub mod bracket;
pub mod generating;
pub mod map;

pub use bracket::{bracket_defect, jacobi_residual, poisson_bracket, ObservableFn};
pub use generating::{
    energy_time_check, harmonic_energy_time_generator, map_from_generating_function, point_transformation_generator,
    DomainBox, EnergyTimeCheck, GeneratingFamily, GeneratingFunction,
};
pub use map::{symplectic_unit, PhaseMap, VerificationReport, CANONICAL_TOL};
