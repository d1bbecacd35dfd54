//! Perturbation theory for H = ½A² + εf(α) on T^ℓ: Lindstedt series for
//! maximal tori, the Birkhoff series for the near-integrable rotator, the
//! zero-mean obstruction scan, resonant tori, cluster matrices and the
//! generating function of the torus.

pub mod birkhoff;
pub mod cluster;
pub mod genfun;
pub mod obstruction;
pub mod resonant;
pub mod series;

pub use series::{
    default_perturbation, lindstedt_coefficient, max_tree_bound_ratio, tree_bound_constant, lindstedt_recursion, lindstedt_trees, residual_csv,
    residual_doubling_ratio, torus_residual, verify_torus_flow, FlowReport, LindstedtMethod, TorusSeries,
};
pub use birkhoff::{
    birkhoff_closed_form, birkhoff_conjugacy, birkhoff_series, positive_perturbation, BirkhoffSeries, ConjugacyReport,
    RESONANCE_TOL,
};
pub use obstruction::{poincare_obstruction_scan, ObstructionWitness};
pub use resonant::{resonant_lindstedt, slow_average_derivatives, ResonantSeries, HESSIAN_TOL, STATIONARITY_TOL};
pub use cluster::{
    cluster_matrix, divisor_probe, geometric_propagator, is_scale_zero, resummation_gap, resummed_propagator,
    smallest_divisors, ClusterKernel, ClusterMatrix, CMatrix, DivisorProbe,
};
pub use genfun::{torus_generating_function, GeneratingFunctionSummary, TorusGeneratingFunction, CLOSURE_TOL};
