//! Two-body problem: Kepler equation solvers, the tree and recursion series
//! for the eccentric anomaly, resummations, the Laplace radius, anomaly
//! relations, the f/g expansions and the regularized restricted three-body
//! Hamiltonian.

pub mod anomalies;
pub mod r3bp;
pub mod resum;
pub mod series;
pub mod solve;

pub use anomalies::{anomalies, fg_leading_coefficients, AnomalyTriple, FgCoefficients, OrbitElements};
pub use r3bp::{levi_civita_map, regularized_r3bp_hamiltonian, r3bp_secular_hamiltonian, R3bpForm, R3bpParams};
pub use resum::{
    crude_radius_bounds, laplace_radius, laplace_report, levi_civita_eval, plain_series_eval, resummed_series_eval,
    starred_eval, LaplaceReport, ResummedValues,
};
pub use series::{
    exact_to_fourier, kepler_series_recursion, kepler_series_trees, lagrange_coefficient, lagrange_series,
    zero_current_sum, ExactSeries,
};
pub use solve::{solve_kepler, KeplerMethod};
