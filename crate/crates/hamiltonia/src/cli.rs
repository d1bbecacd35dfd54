//! Command-line front end.
//!
//! `run` parses arguments, merges a flat `key=value` config file (flags on
//! the command line win), dispatches to the library and writes a JSON
//! report, plus CSV tables where natural, to `--out`. Exit codes: 0 on
//! success, 1 when a verification fails, 2 on usage errors.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::base::{golden_frequency, DoubleDouble, FourierSeries, FrequencyVector, HarmonicVector, Real};
use crate::canonical::{
    energy_time_check, jacobi_residual, map_from_generating_function, point_transformation_generator, poisson_bracket,
    DomainBox, ObservableFn, PhaseMap,
};
use crate::error::{Error, Result};
use crate::kepler::r3bp::{polar_to_pq, pq_hessian};
use crate::kepler::{
    anomalies, fg_leading_coefficients, kepler_series_recursion, kepler_series_trees, lagrange_series, laplace_report,
    r3bp_secular_hamiltonian, regularized_r3bp_hamiltonian, resummed_series_eval, solve_kepler, ExactSeries,
    KeplerMethod, R3bpForm, R3bpParams,
};
use crate::lindstedt::{
    birkhoff_conjugacy, birkhoff_series, default_perturbation, divisor_probe, lindstedt_recursion, lindstedt_trees,
    poincare_obstruction_scan, residual_csv, residual_doubling_ratio, resonant_lindstedt, resummation_gap,
    smallest_divisors, torus_generating_function, torus_residual, verify_torus_flow, ClusterKernel, TorusSeries,
};
use crate::numerics::OdeOptions;
use crate::quadrature::{
    arnold_melnikov_analytic, arnold_perturbation, central_actions, central_frequencies, central_orbit_frequencies,
    lax_eigenvalue_drift, melnikov_matrix, normal_modes, orbit_table, CentralPotential, LatticeKind, LatticeState,
    Potential1D,
};
use crate::rigidbody::{
    body_periods, integrate_free_body, integrated_periods, verify_deprit_canonicity, DepritPoint, EulerAngles,
    Gyroscope, InertiaTriple,
};
use crate::suite::{run_suite, SuiteConfig, SuiteMode};
use crate::trees::{default_budget, siegel_scan, Forest, TreeFilter};

#[derive(Debug, Parser)]
#[command(name = "hamiltonia", version, about = "Constructive Hamiltonian perturbation theory toolkit")]
pub struct Cli {
    /// Output directory for JSON/CSV artifacts (a file path for `suite`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Flat key=value file; keys are long flag names.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw; always recorded in the report.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Do not echo the JSON report on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kepler equation, eccentricity series and the three-body Hamiltonian.
    #[command(subcommand)]
    Kepler(KeplerCmd),
    /// Action-angle quadratures, normal modes, Lax lattices, Melnikov matrix.
    #[command(subcommand)]
    Quadrature(QuadratureCmd),
    /// Canonicity of maps, Poisson brackets, generating functions.
    #[command(subcommand)]
    Canonical(CanonicalCmd),
    /// Rigid body: Euler equations, Deprit chart, periods, gyroscope.
    #[command(subcommand)]
    Rigidbody(RigidbodyCmd),
    /// Lindstedt series and related constructions.
    #[command(subcommand)]
    Lindstedt(LindstedtCmd),
    /// Tree enumeration and the divisor census.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Acceptance battery.
    Suite(SuiteArgs),
}

#[derive(Debug, Subcommand)]
pub enum KeplerCmd {
    /// Solve ξ − e sin ξ = λ.
    Solve(KeplerSolveArgs),
    /// Exact series coefficients of ξ − λ in powers of e.
    Series(KeplerSeriesArgs),
    /// Laplace radius and the crude bounds.
    Radius,
    /// Mean, eccentric and true anomalies with identity residuals.
    Anomalies(AnomaliesArgs),
    /// Leading coefficients of the f/g expansions.
    Fg(FgArgs),
    /// Regularized restricted three-body Hamiltonian.
    R3bp(R3bpArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Newton,
    Bisection,
}

#[derive(Debug, Args)]
pub struct KeplerSolveArgs {
    #[arg(long, default_value_t = 0.3)]
    pub e: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Newton)]
    pub method: MethodArg,
}

#[derive(Debug, Args)]
pub struct KeplerSeriesArgs {
    #[arg(long, default_value_t = 6)]
    pub order: usize,
    /// Also sum trees and compare with the recursion.
    #[arg(long)]
    pub check_trees: bool,
    #[arg(long)]
    pub budget: Option<u64>,
    /// Evaluate the truncated and resummed series at this eccentricity.
    #[arg(long)]
    pub eval_e: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eval_psi: f64,
}

#[derive(Debug, Args)]
pub struct AnomaliesArgs {
    #[arg(long, default_value_t = 0.5)]
    pub e: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Additional random (e, λ) samples checked with the seed.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct FgArgs {
    #[arg(long, default_value_t = 3)]
    pub fit_order: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormArg {
    Composition,
    Printed,
}

#[derive(Debug, Args)]
pub struct R3bpArgs {
    #[arg(long = "L", default_value_t = 1.2)]
    pub l: f64,
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long = "G", default_value_t = 0.1)]
    pub g: f64,
    #[arg(long, default_value_t = 1.9, allow_hyphen_values = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = FormArg::Composition)]
    pub form: FormArg,
}

#[derive(Debug, Subcommand)]
pub enum QuadratureCmd {
    /// Period and action over a list of energies.
    Period(PotentialArgs),
    /// Action, its inverse and dA/dE = T/2π at one energy.
    Action(PotentialArgs),
    /// Central motion frequencies and actions.
    Central(CentralArgs),
    /// Normal modes of a quadratic system.
    Modes(ModesArgs),
    /// Lax spectrum conservation along a lattice flow.
    Lax(LaxArgs),
    /// Melnikov matrix of the Arnold perturbation.
    Melnikov(MelnikovArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PotentialKind {
    Harmonic,
    Quartic,
    Pendulum,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long, value_enum, default_value_t = PotentialKind::Pendulum)]
    pub potential: PotentialKind,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    /// Harmonic frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Quartic coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Pendulum gravity.
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Pendulum length.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1.0,1.5")]
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CentralKind {
    Newtonian,
    Harmonic,
}

#[derive(Debug, Args)]
pub struct CentralArgs {
    #[arg(long, value_enum, default_value_t = CentralKind::Newtonian)]
    pub potential: CentralKind,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = -0.3, allow_hyphen_values = true)]
    pub energy: f64,
    /// Angular momentum G.
    #[arg(long = "G", default_value_t = 1.0)]
    pub g: f64,
    /// Compare with frequencies measured on an integrated orbit.
    #[arg(long)]
    pub integrate: bool,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    pub masses: Vec<f64>,
    /// Rows separated by ';', entries by ','.
    #[arg(long, default_value = "2,-1;-1,2", allow_hyphen_values = true)]
    pub stiffness: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LatticeArg {
    Toda,
    Calogero,
    Sutherland,
}

#[derive(Debug, Args)]
pub struct LaxArgs {
    #[arg(long, value_enum, default_value_t = LatticeArg::Toda)]
    pub lattice: LatticeArg,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 2.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0.0)]
    pub omega: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,-1")]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,1")]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MelnikovArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,1.1")]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0")]
    pub omega: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
}

#[derive(Debug, Subcommand)]
pub enum CanonicalCmd {
    /// Symplectic residual of a built-in map at a point.
    Check(CanonicalCheckArgs),
    /// Poisson brackets and the Jacobi identity at a point.
    Bracket(BracketArgs),
    /// Map from a generating function, or the energy-time generator check.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MapArg {
    Identity,
    Polar,
    Scaling,
    Point,
    Deprit,
}

#[derive(Debug, Args)]
pub struct CanonicalCheckArgs {
    #[arg(long, value_enum, default_value_t = MapArg::Polar)]
    pub map: MapArg,
    /// Phase point (p, q); defaults depend on the map.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub point: Option<Vec<f64>>,
    /// Scale factor or point-transformation strength.
    #[arg(long, default_value_t = 2.0)]
    pub c: f64,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2")]
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Point,
    EnergyTime,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value_t = FamilyArg::Point)]
    pub family: FamilyArg,
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,-0.7,1.2,0.5")]
    pub point: Vec<f64>,
    /// Starting position of the energy-time check (quartic well).
    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub q0: f64,
}

#[derive(Debug, Subcommand)]
pub enum RigidbodyCmd {
    /// Integrate Euler's equations with quaternion orientation.
    Euler(EulerArgs),
    /// Symplectic residual of the Deprit chart at random points.
    DepritCheck(DepritArgs),
    /// T_L and T_G from quadratures against integration.
    Quadratures(QuadraturesArgs),
    /// Lagrange gyroscope in Deprit variables.
    Gyroscope(GyroArgs),
}

#[derive(Debug, Args)]
pub struct EulerArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub inertia: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,0.2,0.8")]
    pub w: Vec<f64>,
    #[arg(long, default_value_t = 100.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct DepritArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct QuadraturesArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub inertia: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,0.2,0.8")]
    pub w: Vec<f64>,
    /// Initial Euler angles θ, φ, ψ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.9,0.4,-0.3")]
    pub orient: Vec<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct GyroArgs {
    #[arg(long, default_value_t = 1.0)]
    pub i: f64,
    #[arg(long, default_value_t = 2.0)]
    pub i3: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 0.5)]
    pub h: f64,
    /// Deprit point M₃, L, G, γ, ψ, φ.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.4,0.7,1.2,0.2,-0.5,1.1")]
    pub point: Vec<f64>,
    #[arg(long, default_value_t = 20.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum LindstedtCmd {
    /// Lindstedt series of the invariant torus with residual checks.
    Torus(TorusArgs),
    /// Birkhoff series and the conjugacy check.
    Birkhoff(BirkhoffArgs),
    /// Lower-dimensional resonant torus.
    Resonant(ResonantArgs),
    /// Resonance surfaces of an anisochronous system.
    Obstruction(ObstructionArgs),
    /// Cluster matrices and resummed propagators.
    Resum(ResumArgs),
    /// Generating function of the torus family.
    Genfun(GenfunArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PrecisionArg {
    Double,
    DoubleDouble,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LindstedtMethodArg {
    Recursion,
    Trees,
}

#[derive(Debug, Args)]
pub struct PerturbationArgs {
    /// Cosine terms "n1,n2:a;..."; prefix a term with 's' for a sine.
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    /// Frequency vector (default (1, golden mean)).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct TorusArgs {
    #[command(flatten)]
    pub pert: PerturbationArgs,
    #[arg(long = "K", default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = PrecisionArg::Double)]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value_t = LindstedtMethodArg::Recursion)]
    pub method: LindstedtMethodArg,
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Integrate the flow and compare with the parametrized torus.
    #[arg(long)]
    pub verify_flow: bool,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.3,-1.2")]
    pub psi0: Vec<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BirkhoffArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub decay: f64,
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long = "K", default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ResonantArgs {
    #[arg(long, default_value_t = 1.3)]
    pub omega: f64,
    #[arg(long, default_value_t = PI, allow_hyphen_values = true)]
    pub beta0: f64,
    #[arg(long = "K", default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ObstructionArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0.5,0.5")]
    pub lo: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1.5,1.5")]
    pub hi: Vec<f64>,
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 9)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct ResumArgs {
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
    pub nu: Vec<i64>,
    #[arg(long = "K", default_value_t = 4)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct GenfunArgs {
    #[arg(long = "K", default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
}

#[derive(Debug, Subcommand)]
pub enum TreesCmd {
    /// Count canonical labeled trees per order.
    Enumerate(EnumerateArgs),
    /// Exhaustive Siegel census over restricted trees.
    Census(CensusArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FilterArg {
    All,
    Nonzero,
    Restricted,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, default_value_t = 4)]
    pub order: usize,
    /// Torus dimension of the node harmonics.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub n_max: usize,
    #[arg(long, value_enum, default_value_t = FilterArg::All)]
    pub filter: FilterArg,
    /// List the trees of orders up to this value.
    #[arg(long, default_value_t = 0)]
    pub print: usize,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long, default_value_t = 5)]
    pub order: usize,
    #[arg(long, default_value_t = 2)]
    pub n_max: usize,
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteName {
    Fast,
    Full,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    pub name: SuiteName,
    /// Exit 1 also when a known-infeasible criterion fails.
    #[arg(long)]
    pub strict: bool,
}

/// Report body plus CSV side files.
struct Output {
    pass: bool,
    result: Value,
    csv: Vec<(String, String)>,
}

impl Output {
    fn new(pass: bool, result: Value) -> Self {
        Output { pass, result, csv: Vec::new() }
    }

    fn with_csv(mut self, name: &str, body: String) -> Self {
        self.csv.push((name.into(), body));
        self
    }
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> std::result::Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key=value", n + 1))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Appends config entries whose flag is absent from `args`.
fn merge_config(args: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut merged = args.clone();
    for (k, v) in parse_config(&text)? {
        if k == "config" {
            continue;
        }
        let flag = format!("--{k}");
        let present = args.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v.as_str() {
            "true" => merged.push(flag),
            "false" => {}
            _ => merged.push(format!("{flag}={v}")),
        }
    }
    Ok(merged)
}

fn usage_help(args: &[String]) -> String {
    let mut cmd = Cli::command();
    for a in args.iter().skip(1) {
        if let Some(sc) = cmd.find_subcommand(a).cloned() {
            cmd = sc;
        }
    }
    cmd.render_help().to_string()
}

fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::InvalidInput(_) | Error::DomainViolation(_) | Error::PreconditionViolated(_))
}

/// Runs the command line and returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let args = match merge_config(args) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            if code == 2 && e.kind() != clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                eprintln!("\n{}", usage_help(&args));
            }
            return code;
        }
    };
    if let Command::Suite(s) = &cli.command {
        return run_suite_command(&cli, s);
    }
    let (name, result) = dispatch(&cli);
    match result {
        Ok(out) => match emit(&cli, &name, out) {
            Ok(code) => code,
            Err(msg) => {
                eprintln!("error: {msg}");
                1
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                2
            } else {
                1
            }
        }
    }
}

fn emit(cli: &Cli, name: &str, out: Output) -> std::result::Result<i32, String> {
    let report = json!({ "command": name.replacen('-', " ", 1), "seed": cli.seed, "pass": out.pass, "result": out.result });
    let text = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n";
    if !cli.quiet {
        print!("{text}");
    }
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        write_file(&dir.join(format!("{name}.json")), &text)?;
        for (file, body) in &out.csv {
            write_file(&dir.join(file), body)?;
        }
    }
    Ok(if out.pass { 0 } else { 1 })
}

fn write_file(path: &Path, body: &str) -> std::result::Result<(), String> {
    fs::write(path, body).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run_suite_command(cli: &Cli, s: &SuiteArgs) -> i32 {
    let mode = match s.name {
        SuiteName::Fast => SuiteMode::Fast,
        SuiteName::Full => SuiteMode::Full,
    };
    let report = run_suite(&SuiteConfig::new(mode, cli.seed));
    if !cli.quiet {
        for o in &report.outcomes {
            println!("{}", o.line());
        }
        println!("{} passed, {} failed (seed {})", report.passed, report.failed, report.seed);
    }
    if let Some(path) = &cli.out {
        let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            if let Err(e) = fs::create_dir_all(parent) {
                eprintln!("error: cannot create {}: {e}", parent.display());
                return 1;
            }
        }
        if let Err(msg) = write_file(path, &text) {
            eprintln!("error: {msg}");
            return 1;
        }
    }
    let failed = if s.strict { report.failed > 0 } else { !report.unexpected_failures.is_empty() };
    if failed {
        1
    } else {
        0
    }
}

fn dispatch(cli: &Cli) -> (String, Result<Output>) {
    let seed = cli.seed;
    match &cli.command {
        Command::Kepler(c) => match c {
            KeplerCmd::Solve(a) => ("kepler-solve".into(), kepler_solve(a)),
            KeplerCmd::Series(a) => ("kepler-series".into(), kepler_series(a)),
            KeplerCmd::Radius => ("kepler-radius".into(), kepler_radius()),
            KeplerCmd::Anomalies(a) => ("kepler-anomalies".into(), kepler_anomalies(a, seed)),
            KeplerCmd::Fg(a) => ("kepler-fg".into(), kepler_fg(a)),
            KeplerCmd::R3bp(a) => ("kepler-r3bp".into(), kepler_r3bp(a)),
        },
        Command::Quadrature(c) => match c {
            QuadratureCmd::Period(a) => ("quadrature-period".into(), quad_period(a)),
            QuadratureCmd::Action(a) => ("quadrature-action".into(), quad_action(a)),
            QuadratureCmd::Central(a) => ("quadrature-central".into(), quad_central(a)),
            QuadratureCmd::Modes(a) => ("quadrature-modes".into(), quad_modes(a)),
            QuadratureCmd::Lax(a) => ("quadrature-lax".into(), quad_lax(a)),
            QuadratureCmd::Melnikov(a) => ("quadrature-melnikov".into(), quad_melnikov(a)),
        },
        Command::Canonical(c) => match c {
            CanonicalCmd::Check(a) => ("canonical-check".into(), canonical_check(a)),
            CanonicalCmd::Bracket(a) => ("canonical-bracket".into(), canonical_bracket(a)),
            CanonicalCmd::Generate(a) => ("canonical-generate".into(), canonical_generate(a)),
        },
        Command::Rigidbody(c) => match c {
            RigidbodyCmd::Euler(a) => ("rigidbody-euler".into(), rb_euler(a)),
            RigidbodyCmd::DepritCheck(a) => ("rigidbody-deprit-check".into(), rb_deprit(a, seed)),
            RigidbodyCmd::Quadratures(a) => ("rigidbody-quadratures".into(), rb_quadratures(a)),
            RigidbodyCmd::Gyroscope(a) => ("rigidbody-gyroscope".into(), rb_gyroscope(a)),
        },
        Command::Lindstedt(c) => match c {
            LindstedtCmd::Torus(a) => ("lindstedt-torus".into(), ls_torus(a)),
            LindstedtCmd::Birkhoff(a) => ("lindstedt-birkhoff".into(), ls_birkhoff(a)),
            LindstedtCmd::Resonant(a) => ("lindstedt-resonant".into(), ls_resonant(a)),
            LindstedtCmd::Obstruction(a) => ("lindstedt-obstruction".into(), ls_obstruction(a)),
            LindstedtCmd::Resum(a) => ("lindstedt-resum".into(), ls_resum(a)),
            LindstedtCmd::Genfun(a) => ("lindstedt-genfun".into(), ls_genfun(a)),
        },
        Command::Trees(c) => match c {
            TreesCmd::Enumerate(a) => ("trees-enumerate".into(), trees_enumerate(a)),
            TreesCmd::Census(a) => ("trees-census".into(), trees_census(a)),
        },
        Command::Suite(_) => unreachable!("handled before dispatch"),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn fixed<const N: usize>(v: &[f64], what: &str) -> Result<[f64; N]> {
    v.try_into().map_err(|_| Error::InvalidInput(format!("{what} needs {N} comma-separated values, got {}", v.len())))
}

fn rational_text(r: &BigRational) -> String {
    r.to_string()
}

fn series_json(s: &ExactSeries) -> Value {
    Value::Array(
        s.iter()
            .map(|(nu, c)| json!({ "nu": nu, "re": rational_text(&c.re), "im": rational_text(&c.im) }))
            .collect(),
    )
}

/// Parses "n1,n2:a;s n1,n2:a" into a real trigonometric polynomial.
pub fn parse_perturbation(text: &str, dim: usize) -> Result<FourierSeries> {
    let mut f = FourierSeries::new(dim, 0);
    for term in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (sine, body) = match term.strip_prefix('s') {
            Some(rest) => (true, rest.trim()),
            None => (false, term),
        };
        let (nu, a) = body.split_once(':').ok_or_else(|| Error::InvalidInput(format!("term '{term}' lacks ':'")))?;
        let nu: Vec<i64> = nu
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| Error::InvalidInput(format!("bad harmonic in '{term}'"))))
            .collect::<Result<_>>()?;
        if nu.len() != dim {
            return Err(Error::InvalidInput(format!("harmonic {nu:?} is not of dimension {dim}")));
        }
        let a: f64 = a.trim().parse().map_err(|_| Error::InvalidInput(format!("bad amplitude in '{term}'")))?;
        let t = if sine { FourierSeries::sine(dim, &nu, a) } else { FourierSeries::cosine(dim, &nu, a) };
        f = f.add(&t);
    }
    Ok(f)
}

fn perturbation(p: &PerturbationArgs) -> Result<(FourierSeries, FrequencyVector)> {
    let omega = match &p.omega {
        Some(w) => FrequencyVector::new(w.clone()),
        None => golden_frequency(),
    };
    let f = match &p.f {
        Some(text) => parse_perturbation(text, omega.dim())?,
        None if omega.dim() == 2 => default_perturbation(),
        None => return Err(Error::InvalidInput("--f is required when ω is not two-dimensional".into())),
    };
    Ok((f, omega))
}

fn kepler_solve(a: &KeplerSolveArgs) -> Result<Output> {
    let method = match a.method {
        MethodArg::Newton => KeplerMethod::Newton,
        MethodArg::Bisection => KeplerMethod::Bisection,
    };
    let xi = solve_kepler(a.e, a.lambda, method)?;
    let residual = xi - a.e * xi.sin() - a.lambda;
    Ok(Output::new(residual.abs() <= 1e-12, json!({ "e": a.e, "lambda": a.lambda, "xi": xi, "residual": residual })))
}

fn kepler_series(a: &KeplerSeriesArgs) -> Result<Output> {
    if a.order == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    let rec = kepler_series_recursion(a.order)?;
    let lagrange: Vec<bool> = (1..=a.order).map(|k| lagrange_series(k) == rec[k - 1]).collect();
    let mut pass = lagrange.iter().all(|&b| b);
    let mut trees = Value::Null;
    if a.check_trees {
        let budget = a.budget.unwrap_or_else(default_budget);
        let mut eq = Vec::new();
        for k in 1..=a.order {
            eq.push(kepler_series_trees(k, true, budget)? == rec[k - 1]);
        }
        pass &= eq.iter().all(|&b| b);
        trees = json!(eq);
    }
    let mut csv = String::from("k,nu,re,im\n");
    for (k, s) in rec.iter().enumerate() {
        for (nu, c) in s {
            csv.push_str(&format!("{},{nu},{},{}\n", k + 1, c.re, c.im));
        }
    }
    let eval = match a.eval_e {
        Some(e) => to_json(&resummed_series_eval(e, a.eval_psi, a.order)?),
        None => Value::Null,
    };
    let orders: Vec<Value> = rec.iter().map(series_json).collect();
    Ok(Output::new(
        pass,
        json!({ "order": a.order, "coefficients": orders, "lagrange_agrees": lagrange, "trees_agree": trees, "evaluation": eval }),
    )
    .with_csv("kepler-series.csv", csv))
}

fn kepler_radius() -> Result<Output> {
    let r = laplace_report();
    Ok(Output::new((r.radius - 0.6627).abs() <= 5e-4, to_json(&r)))
}

fn kepler_anomalies(a: &AnomaliesArgs, seed: u64) -> Result<Output> {
    let t = anomalies(a.e, a.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = t.max_residual();
    for _ in 0..a.samples {
        worst = worst.max(anomalies(rng.gen_range(0.0..0.9), rng.gen_range(-PI..PI))?.max_residual());
    }
    Ok(Output::new(
        worst <= 1e-12,
        json!({ "triple": t, "residuals": t.residuals(), "samples": a.samples, "max_residual": worst }),
    ))
}

fn kepler_fg(a: &FgArgs) -> Result<Output> {
    let fg = fg_leading_coefficients(a.fit_order)?;
    let pass = (fg.g_linear - 1.0).abs() <= 1e-3
        && (fg.f_linear - 2.0).abs() <= 1e-3
        && (fg.g_xy - 1.0).abs() <= 1e-2
        && (fg.f_xy - 2.5).abs() <= 1e-2;
    Ok(Output::new(pass, to_json(&fg)))
}

fn kepler_r3bp(a: &R3bpArgs) -> Result<Output> {
    let p = R3bpParams::default();
    let form = match a.form {
        FormArg::Composition => R3bpForm::Composition,
        FormArg::Printed => R3bpForm::AsPrinted,
    };
    let (pp, qq) = polar_to_pq(a.g, a.gamma);
    let h = regularized_r3bp_hamiltonian(a.l, a.lambda, pp, qq, a.eps, &p, form)?;
    let composed = regularized_r3bp_hamiltonian(a.l, a.lambda, pp, qq, a.eps, &p, R3bpForm::Composition)?;
    let secular = r3bp_secular_hamiltonian(a.l, a.l - a.g, a.lambda + a.gamma, -a.gamma, a.eps, &p)?;
    let at0 = pq_hessian(a.l, a.lambda, 0.0, 0.0, a.eps, &p, form, 1e-4)?;
    let near = pq_hessian(a.l, a.lambda, 1e-5, -1e-5, a.eps, &p, form, 1e-4)?;
    let jump = (0..4).map(|k| (at0[k / 2][k % 2] - near[k / 2][k % 2]).abs()).fold(0.0, f64::max);
    let gap = (composed - secular).abs();
    Ok(Output::new(
        gap <= 1e-10 && jump <= 1e-6,
        json!({
            "form": format!("{form:?}"),
            "p": pp,
            "q": qq,
            "hamiltonian": h,
            "secular": secular,
            "composition_gap": gap,
            "form_gap": (h - secular).abs(),
            "hessian_origin": at0,
            "hessian_jump": jump,
        }),
    ))
}

fn potential(a: &PotentialArgs) -> (Potential1D, f64) {
    match a.potential {
        PotentialKind::Harmonic => (Potential1D::harmonic(a.mass, a.omega), f64::INFINITY),
        PotentialKind::Quartic => (Potential1D::quartic(a.mass, a.c), f64::INFINITY),
        PotentialKind::Pendulum => (Potential1D::pendulum(a.mass, a.g, a.h), 2.0 * a.mass * a.g),
    }
}

fn quad_period(a: &PotentialArgs) -> Result<Output> {
    let (pot, _) = potential(a);
    let rows = orbit_table(&pot, &a.energy)?;
    let mut csv = String::from("energy,period,action\n");
    for r in &rows {
        csv.push_str(&format!("{:.15e},{:.15e},{:.15e}\n", r.energy, r.period, r.action));
    }
    let pass = rows.iter().all(|r| r.period.is_finite() && r.action.is_finite());
    Ok(Output::new(pass, json!({ "potential": pot.name(), "rows": rows })).with_csv("quadrature-period.csv", csv))
}

fn quad_action(a: &PotentialArgs) -> Result<Output> {
    let (pot, cap) = potential(a);
    let mut rows = Vec::new();
    let mut pass = true;
    for &e in &a.energy {
        let action = pot.action_of_energy(e)?;
        let back = pot.energy_of_action(action, cap)?;
        let h = 1e-4 * (1.0 + e.abs());
        let slope = (pot.action_of_energy(e + h)? - pot.action_of_energy(e - h)?) / (2.0 * h);
        let period = pot.period(e)?;
        let slope_err = (slope - period / (2.0 * PI)).abs();
        pass &= (back - e).abs() <= 1e-8 * (1.0 + e.abs()) && slope_err <= 1e-6 * (1.0 + period);
        rows.push(json!({ "energy": e, "action": action, "energy_of_action": back, "dA_dE": slope, "period_over_2pi": period / (2.0 * PI) }));
    }
    Ok(Output::new(pass, json!({ "potential": pot.name(), "rows": rows })))
}

fn quad_central(a: &CentralArgs) -> Result<Output> {
    let pot = match a.potential {
        CentralKind::Newtonian => CentralPotential::newtonian(a.k, a.mass),
        CentralKind::Harmonic => CentralPotential::harmonic(a.mass, a.omega),
    };
    let freq = central_frequencies(&pot, a.energy, a.g)?;
    let act = central_actions(&pot, a.energy, a.g)?;
    let mut pass = true;
    let mut orbit = Value::Null;
    if a.integrate {
        let o = central_orbit_frequencies(&pot, a.energy, a.g, 3, freq.radial_period / 200.0)?;
        let err = ((o.omega0 - freq.omega0) / freq.omega0).abs().max(((o.omega1 - freq.omega1) / freq.omega1).abs());
        pass = err <= 1e-6;
        orbit = json!({ "measured": o, "relative_error": err });
    }
    Ok(Output::new(pass, json!({ "frequencies": freq, "actions": act, "orbit": orbit })))
}

fn quad_modes(a: &ModesArgs) -> Result<Output> {
    let stiffness: Vec<Vec<f64>> = a
        .stiffness
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad stiffness entry '{x}'"))))
                .collect()
        })
        .collect::<Result<_>>()?;
    let m = normal_modes(&a.masses, &stiffness)?;
    Ok(Output::new(true, to_json(&m)))
}

fn quad_lax(a: &LaxArgs) -> Result<Output> {
    let kind = match a.lattice {
        LatticeArg::Toda => LatticeKind::Toda { m: a.m, g: a.g, kappa: a.kappa },
        LatticeArg::Calogero => LatticeKind::Calogero { m: a.m, g: a.g, omega: a.omega },
        LatticeArg::Sutherland => LatticeKind::Sutherland { m: a.m, g: a.g },
    };
    let r = lax_eigenvalue_drift(&LatticeState::new(kind, a.p.clone(), a.q.clone())?, a.t, a.dt)?;
    Ok(Output::new(r.max_drift <= a.tol, json!({ "lattice": kind, "report": r })))
}

fn quad_melnikov(a: &MelnikovArgs) -> Result<Output> {
    let alpha = fixed::<2>(&a.alpha, "--alpha")?;
    let omega = fixed::<2>(&a.omega, "--omega")?;
    let num = melnikov_matrix(arnold_perturbation, [0.0, 0.0], alpha, omega, a.g)?;
    let exact = arnold_melnikov_analytic(alpha, omega, a.g);
    let gap = (num.det - exact.det).abs();
    Ok(Output::new(gap <= 1e-6, json!({ "numeric": num, "analytic": exact, "det_gap": gap })))
}

fn canonical_check(a: &CanonicalCheckArgs) -> Result<Output> {
    let (map, default): (PhaseMap, Vec<f64>) = match a.map {
        MapArg::Identity => (PhaseMap::identity(2), vec![0.1, 0.2, 0.3, 0.4]),
        MapArg::Polar => (PhaseMap::polar(), vec![0.3, -0.7, 1.2, 0.5]),
        MapArg::Scaling => (PhaseMap::scaling(1, a.c), vec![0.4, -1.1]),
        MapArg::Point => (
            map_from_generating_function(&point_transformation_generator(2, a.c), DomainBox::cube(2, -50.0, 50.0)),
            vec![0.3, -0.7, 1.2, 0.5],
        ),
        MapArg::Deprit => (crate::rigidbody::deprit_map(), vec![0.2, -0.4, 0.7, 1.1, 0.5, -2.0]),
    };
    let x = a.point.clone().unwrap_or(default);
    let r = map.report(&x)?;
    Ok(Output::new(r.pass, json!({ "report": r, "image": map.apply(&x)? })))
}

fn canonical_bracket(a: &BracketArgs) -> Result<Output> {
    let x = fixed::<2>(&a.point, "--point")?;
    let (p, q) = (ObservableFn::coordinate(0), ObservableFn::coordinate(1));
    let f = ObservableFn::new(|x| x[0] * x[0] * x[1]);
    let g = ObservableFn::new(|x| x[0] * x[1] * x[1]);
    let h = ObservableFn::new(|x| x[0] + x[1]);
    let pq = poisson_bracket(&p, &q, &x);
    let fg = poisson_bracket(&f, &g, &x);
    let jacobi = jacobi_residual(&f, &g, &h, &x);
    let fg_exact = 3.0 * x[0] * x[0] * x[1] * x[1];
    Ok(Output::new(
        pq == 1.0 && jacobi.abs() <= 1e-8 && (fg - fg_exact).abs() <= 1e-8 * (1.0 + fg_exact.abs()),
        json!({ "point": x, "p_q": pq, "f_g": fg, "f_g_exact": fg_exact, "jacobi_residual": jacobi }),
    ))
}

fn canonical_generate(a: &GenerateArgs) -> Result<Output> {
    match a.family {
        FamilyArg::Point => {
            let dof = a.point.len() / 2;
            if dof == 0 || a.point.len() % 2 != 0 {
                return Err(Error::InvalidInput("--point needs an even number of entries".into()));
            }
            let map = map_from_generating_function(&point_transformation_generator(dof, a.c), DomainBox::cube(dof, -50.0, 50.0));
            let r = map.report(&a.point)?;
            Ok(Output::new(r.pass, json!({ "report": r, "image": map.apply(&a.point)? })))
        }
        FamilyArg::EnergyTime => {
            let pot = Potential1D::quartic(1.0, 1.0);
            let x = fixed::<2>(&a.point[..a.point.len().min(2)], "--point (p, q)")?;
            let c = energy_time_check(&pot, a.q0, x[0], x[1])?;
            Ok(Output::new(c.dq_residual.abs() <= 1e-8 && c.de_residual.abs() <= 1e-6, to_json(&c)))
        }
    }
}

fn inertia(v: &[f64]) -> Result<InertiaTriple> {
    let i = fixed::<3>(v, "--inertia")?;
    InertiaTriple::new(i[0], i[1], i[2])
}

fn rb_euler(a: &EulerArgs) -> Result<Output> {
    let i = inertia(&a.inertia)?;
    let w = fixed::<3>(&a.w, "--w")?;
    let run = integrate_free_body(&i, &w, &[1.0, 0.0, 0.0, 0.0], a.t, a.dt, OdeOptions::tight())?;
    let pass = run.energy_drift <= a.tol && run.momentum_drift <= a.tol;
    let csv = run.to_csv();
    Ok(Output::new(
        pass,
        json!({
            "inertia": i,
            "w0": w,
            "t_final": a.t,
            "samples": run.samples.len(),
            "energy_drift": run.energy_drift,
            "momentum_drift": run.momentum_drift,
            "lab_momentum_drift": run.lab_momentum_drift,
        }),
    )
    .with_csv("rigidbody-euler.csv", csv))
}

fn rb_deprit(a: &DepritArgs, seed: u64) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut csv = String::from("index,p_theta,p_phi,p_psi,theta,phi,psi,residual\n");
    let mut worst = 0.0f64;
    for n in 0..a.samples {
        let x = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.3..2.8),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        ];
        let r = verify_deprit_canonicity(&x)?;
        worst = worst.max(r.residual);
        let coords: Vec<String> = x.iter().map(|v| format!("{v:.15e}")).collect();
        csv.push_str(&format!("{n},{},{:.6e}\n", coords.join(","), r.residual));
    }
    Ok(Output::new(worst <= a.tol, json!({ "samples": a.samples, "max_residual": worst, "tol": a.tol }))
        .with_csv("rigidbody-deprit-check.csv", csv))
}

fn rb_quadratures(a: &QuadraturesArgs) -> Result<Output> {
    let i = inertia(&a.inertia)?;
    let w = fixed::<3>(&a.w, "--w")?;
    let o = fixed::<3>(&a.orient, "--orient")?;
    let quad = body_periods(&i, i.kinetic_energy(&w), i.momentum_squared(&w).sqrt())?;
    let num = integrated_periods(&i, &w, &EulerAngles::new(o[0], o[1], o[2]))?;
    let err = ((quad.t_l - num.t_l) / quad.t_l).abs().max(((quad.t_g - num.t_g) / quad.t_g).abs());
    Ok(Output::new(err <= a.tol, json!({ "quadrature": quad, "integrated": num, "relative_error": err })))
}

fn rb_gyroscope(a: &GyroArgs) -> Result<Output> {
    let gyro = Gyroscope::new(a.i, a.i3, a.m, a.g, a.h)?;
    let d = DepritPoint::from_array(&fixed::<6>(&a.point, "--point")?);
    d.validate()?;
    let h0 = gyro.hamiltonian(&d)?;
    let run = gyro.integrate(&d, a.t, a.dt, OdeOptions::tight())?;
    let pass = run.energy_drift <= a.tol && run.m3_drift <= a.tol && run.l_drift <= a.tol;
    Ok(Output::new(pass, json!({ "initial_energy": h0, "run": run })))
}

fn flow_json(series: &TorusSeries<f64>, a: &TorusArgs) -> Result<(f64, Value)> {
    let rep = verify_torus_flow(series, a.eps, &a.psi0, a.t, a.dt)?;
    Ok((rep.max_deviation, to_json(&rep)))
}

fn ls_torus(a: &TorusArgs) -> Result<Output> {
    let (f, omega) = perturbation(&a.pert)?;
    let series = lindstedt_recursion::<f64>(&f, &omega, a.k)?;
    let mut rows = Vec::new();
    let (residual, ratio) = match a.precision {
        PrecisionArg::Double => {
            for k in 1..=a.k {
                let part = TorusSeries { omega: omega.clone(), f: f.clone(), orders: series.orders[..k].to_vec() };
                rows.push((a.eps, k, torus_residual(&part, a.eps, a.grid)?));
            }
            (torus_residual(&series, a.eps, a.grid)?, residual_doubling_ratio(&series, a.eps, a.grid)?)
        }
        PrecisionArg::DoubleDouble => {
            let dd = lindstedt_recursion::<DoubleDouble>(&f, &omega, a.k)?;
            let eps = DoubleDouble::from_f64(a.eps);
            for k in 1..=a.k {
                let part = TorusSeries { omega: omega.clone(), f: f.clone(), orders: dd.orders[..k].to_vec() };
                rows.push((a.eps, k, torus_residual(&part, eps, a.grid)?));
            }
            (torus_residual(&dd, eps, a.grid)?, residual_doubling_ratio(&dd, eps, a.grid)?)
        }
    };
    let mut pass = residual <= a.tol;
    let mut trees_gap = Value::Null;
    if let LindstedtMethodArg::Trees = a.method {
        let trees = lindstedt_trees(&f, &omega, a.k, a.budget.unwrap_or_else(default_budget))?;
        let gap = trees.iter().zip(&series.orders).map(|(t, r)| t.max_diff(r)).fold(0.0, f64::max);
        pass &= gap <= 1e-10;
        trees_gap = json!(gap);
    }
    let mut flow = Value::Null;
    if a.verify_flow {
        let (dev, rep) = flow_json(&series, a)?;
        pass &= dev <= a.tol;
        flow = rep;
    }
    let result = json!({
        "K": a.k,
        "eps": a.eps,
        "precision": format!("{:?}", a.precision),
        "residual": residual,
        "doubling_ratio": ratio,
        "max_mean": series.max_mean(),
        "reality_defect": series.reality_defect(a.grid),
        "trees_vs_recursion": trees_gap,
        "flow": flow,
        "series": series.to_json(),
    });
    Ok(Output::new(pass, result).with_csv("lindstedt-torus-residual.csv", residual_csv(&rows)))
}

fn ls_birkhoff(a: &BirkhoffArgs) -> Result<Output> {
    let f = crate::lindstedt::positive_perturbation(a.n, a.decay);
    let omega0 = [1.0, crate::base::GOLDEN];
    let s = birkhoff_series(&f, &omega0, a.k)?;
    let rep = birkhoff_conjugacy(&f, &omega0, a.eps, &[0.4, -0.2], &[0.3, 1.1], a.t, 0.1)?;
    Ok(Output::new(
        rep.max_error() <= a.tol,
        json!({
            "K": a.k,
            "convention_mismatch": s.convention_mismatch(),
            "geometric_ratio": s.geometric_ratio(a.eps),
            "resummation_gap": s.resummation_gap(a.eps).ok(),
            "conjugacy": rep,
        }),
    ))
}

fn ls_resonant(a: &ResonantArgs) -> Result<Output> {
    let f = FourierSeries::cosine(2, &[0, 1], 1.0)
        .add(&FourierSeries::cosine(2, &[1, 1], 1.0))
        .add(&FourierSeries::sine(2, &[1, 0], 0.5));
    let s = resonant_lindstedt(&f, &FrequencyVector::new(vec![a.omega]), &[a.beta0], a.k)?;
    let residual = s.residual(a.eps, a.grid);
    let orders: Vec<Value> = s.orders.iter().map(|o| to_json(&o.to_records())).collect();
    Ok(Output::new(
        residual <= a.tol,
        json!({ "K": a.k, "eps": a.eps, "residual": residual, "shifts": s.shifts, "orders": orders }),
    ))
}

fn ls_obstruction(a: &ObstructionArgs) -> Result<Output> {
    let f = match &a.f {
        Some(text) => parse_perturbation(text, a.lo.len())?,
        None => FourierSeries::cosine(2, &[1, -1], 1.0).add(&FourierSeries::cosine(2, &[1, 0], 1.0)),
    };
    let w = poincare_obstruction_scan(&f, |x: &[f64]| x.to_vec(), &a.lo, &a.hi, a.n_max, a.grid)?;
    let mut csv = String::from("nu,point\n");
    for wit in &w {
        for p in &wit.points {
            let nu: Vec<String> = wit.nu.iter().map(|x| x.to_string()).collect();
            let pt: Vec<String> = p.iter().map(|x| format!("{x:.12e}")).collect();
            csv.push_str(&format!("\"{}\",\"{}\"\n", nu.join(","), pt.join(",")));
        }
    }
    Ok(Output::new(true, json!({ "frequency_map": "identity", "witnesses": w })).with_csv("lindstedt-obstruction.csv", csv))
}

fn ls_resum(a: &ResumArgs) -> Result<Output> {
    let (f, omega) = (default_perturbation(), golden_frequency());
    let c = 5f64.sqrt();
    let kernel = ClusterKernel::build(&f, &omega, c, a.k, u64::MAX)?;
    let nu = HarmonicVector::new(&a.nu);
    let m = kernel.matrix(&nu)?;
    let first = m.first_order_norm();
    let probe = divisor_probe(&kernel, a.eps, a.n_max, a.count)?;
    let mut gap = 0.0f64;
    for mu in smallest_divisors(&omega, a.n_max, a.count) {
        gap = gap.max(resummation_gap(omega.dot(&mu), &kernel.matrix(&mu)?.value(a.eps), a.terms)?);
    }
    let pass = first <= 1e-14 && gap <= 1e-15 && probe.iter().all(|p| p.ratio.is_finite());
    let mut csv = String::from("nu1,nu2,divisor,ratio\n");
    for p in &probe {
        csv.push_str(&format!("{},{},{:.15e},{:.15e}\n", p.nu[0], p.nu[1], p.divisor, p.ratio));
    }
    Ok(Output::new(
        pass,
        json!({
            "K": a.k,
            "eps": a.eps,
            "matrix": m.to_json(),
            "first_order_norm": first,
            "hermiticity_defect": m.hermiticity_defect(),
            "resummation_gap": gap,
            "probe": probe,
        }),
    )
    .with_csv("lindstedt-resum-probe.csv", csv))
}

fn ls_genfun(a: &GenfunArgs) -> Result<Output> {
    let series = lindstedt_recursion::<f64>(&default_perturbation(), &golden_frequency(), a.k)?;
    let g = torus_generating_function(&series, a.eps, a.grid)?;
    let s = g.summary();
    Ok(Output::new(s.closure_residual <= crate::lindstedt::CLOSURE_TOL, json!({ "summary": s, "g": g.g.to_records() })))
}

fn filter(f: FilterArg) -> TreeFilter {
    match f {
        FilterArg::All => TreeFilter::All,
        FilterArg::Nonzero => TreeFilter::NonzeroCurrents,
        FilterArg::Restricted => TreeFilter::Restricted,
    }
}

fn trees_enumerate(a: &EnumerateArgs) -> Result<Output> {
    if a.dim == 0 || a.n_max == 0 {
        return Err(Error::InvalidInput("dimension and harmonic norm must be positive".into()));
    }
    let alphabet = HarmonicVector::ball(a.dim, a.n_max);
    let forest = Forest::build(&alphabet, a.order, filter(a.filter), a.budget.unwrap_or_else(default_budget))?;
    let counts: Vec<usize> = (1..=a.order).map(|k| forest.ids_of_order(k).len()).collect();
    let mut listed = Vec::new();
    for k in 1..=a.print.min(a.order) {
        for id in forest.ids_of_order(k) {
            let t = forest.view(id).to_labeled();
            listed.push(json!({ "order": k, "encoding": t.encoding(), "multiplicity": t.multiplicity().to_string() }));
        }
    }
    let mut csv = String::from("order,trees\n");
    for (k, c) in counts.iter().enumerate() {
        csv.push_str(&format!("{},{c}\n", k + 1));
    }
    Ok(Output::new(
        true,
        json!({ "alphabet_size": alphabet.len(), "filter": format!("{:?}", a.filter), "trees_per_order": counts, "trees": listed }),
    )
    .with_csv("trees-enumerate.csv", csv))
}

fn trees_census(a: &CensusArgs) -> Result<Output> {
    let r = siegel_scan(&golden_frequency(), a.order, a.n_max, a.budget.unwrap_or(crate::suite::CENSUS_BUDGET))?;
    Ok(Output::new(
        r.violations == 0,
        json!({
            "max_order": r.max_order,
            "max_harmonic": r.max_harmonic,
            "trees_per_order": r.trees_per_order,
            "violations": r.violations,
            "max_ratio": r.max_ratio,
            "max_scale": r.max_scale,
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let kv = parse_config("# comment\norder = 4\n\ncheck-trees=true\n").unwrap();
        assert_eq!(kv, vec![("order".into(), "4".into()), ("check-trees".into(), "true".into())]);
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn perturbation_text() {
        let f = parse_perturbation("1,1:1;1,0:1", 2).unwrap();
        assert!(f.max_diff(&default_perturbation()) < 1e-16);
        assert!(parse_perturbation("1:1", 2).is_err());
        let s = parse_perturbation("s1,0:0.5", 2).unwrap();
        assert!((s.eval_real(&[0.3, 0.0]).unwrap() - 0.5 * 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["hamiltonia", "suite", "medium"]), 2);
        assert_eq!(run(["hamiltonia", "kepler", "nosuch"]), 2);
        assert_eq!(run(["hamiltonia", "--help"]), 0);
    }
}
