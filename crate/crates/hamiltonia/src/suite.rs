//! Acceptance battery: fifteen numbered checks of the library at fixed
//! tolerances, shared by the `suite` subcommand and the acceptance tests.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::base::{golden_frequency, DoubleDouble, HarmonicVector, Real, GOLDEN};
use crate::canonical::{
    jacobi_residual, map_from_generating_function, point_transformation_generator, DomainBox, ObservableFn, PhaseMap,
};
use crate::error::{Error, Result};
use crate::kepler::series::exact_abs_sum;
use crate::kepler::{
    anomalies, crude_radius_bounds, fg_leading_coefficients, kepler_series_recursion, kepler_series_trees,
    lagrange_series, laplace_radius, plain_series_eval, r3bp_secular_hamiltonian, regularized_r3bp_hamiltonian,
    solve_kepler, zero_current_sum, KeplerMethod, R3bpForm, R3bpParams,
};
use crate::kepler::r3bp::{polar_to_pq, pq_hessian};
use crate::lindstedt::{
    birkhoff_closed_form, birkhoff_conjugacy, default_perturbation, divisor_probe, lindstedt_recursion,
    positive_perturbation, residual_doubling_ratio, resummation_gap, smallest_divisors, torus_generating_function,
    torus_residual, verify_torus_flow, ClusterKernel,
};
use crate::numerics::OdeOptions;
use crate::quadrature::{arnold_melnikov_analytic, arnold_perturbation, lax_eigenvalue_drift, melnikov_matrix, LatticeKind, LatticeState};
use crate::rigidbody::{
    body_periods, integrate_free_body, integrated_periods, psi_rate, rate_spread, verify_deprit_canonicity,
    EulerAngles, InertiaTriple, PsiBranch,
};
use crate::trees::siegel_scan;

/// Criteria expected to fail; they run at full strength and are reported as FAIL.
pub const KNOWN_INFEASIBLE: &[u32] = &[3];

/// Tree budget large enough for the order-6 census.
pub const CENSUS_BUDGET: u64 = 200_000_000;

/// Identifiers and short names of the criteria.
pub const CRITERIA: [(u32, &str); 15] = [
    (1, "kepler tree sum equals recursion and Lagrange series"),
    (2, "Laplace radius and crude radius bounds"),
    (3, "plain eccentricity series at order 15 versus Newton"),
    (4, "anomaly identities and f/g leading coefficients"),
    (5, "zero-current tree sums cancel"),
    (6, "coefficient bound 4^k"),
    (7, "Siegel census without violations"),
    (8, "Lindstedt torus residual, doubling ratio and flow"),
    (9, "Birkhoff conjugacy and resonant denominator"),
    (10, "cluster resummation and torus generating function"),
    (11, "canonicity tests"),
    (12, "rigid body invariants, symmetric top and periods"),
    (13, "Lax spectra conserved"),
    (14, "Melnikov determinant"),
    (15, "regularized three-body Hamiltonian"),
];

/// How much work each criterion does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteMode {
    /// Reduced sample counts and census order 5.
    Fast,
    /// Every criterion at its stated size.
    Full,
}

impl std::str::FromStr for SuiteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(SuiteMode::Fast),
            "full" => Ok(SuiteMode::Full),
            other => Err(Error::InvalidInput(format!("unknown suite '{other}' (expected fast or full)"))),
        }
    }
}

/// Parameters shared by all criteria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub mode: SuiteMode,
    pub seed: u64,
}

impl SuiteConfig {
    pub fn new(mode: SuiteMode, seed: u64) -> Self {
        SuiteConfig { mode, seed }
    }

    fn pick(&self, fast: usize, full: usize) -> usize {
        match self.mode {
            SuiteMode::Fast => fast,
            SuiteMode::Full => full,
        }
    }

    fn rng(&self, id: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(1000).wrapping_add(id as u64))
    }
}

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub known_infeasible: bool,
    pub measured: Value,
    pub error: Option<String>,
}

impl CriterionOutcome {
    /// `PASS [ 7] name` style line.
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let note = if self.known_infeasible { " (known infeasible)" } else { "" };
        format!("{tag} [{:>2}] {}{note}", self.id, self.name)
    }
}

/// All outcomes of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub mode: SuiteMode,
    pub seed: u64,
    pub outcomes: Vec<CriterionOutcome>,
    pub passed: usize,
    pub failed: usize,
    /// Failures outside [`KNOWN_INFEASIBLE`].
    pub unexpected_failures: Vec<u32>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Runs one criterion by number.
pub fn run_criterion(id: u32, cfg: &SuiteConfig) -> Result<CriterionOutcome> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1.to_string())
        .ok_or_else(|| Error::InvalidInput(format!("no criterion {id}")))?;
    let res = match id {
        1 => c01_kepler_exactness(),
        2 => c02_laplace(),
        3 => c03_plain_series(cfg),
        4 => c04_anomalies(cfg),
        5 => c05_zero_current(),
        6 => c06_coefficient_bound(),
        7 => c07_siegel(cfg),
        8 => c08_lindstedt(),
        9 => c09_birkhoff(),
        10 => c10_cluster(),
        11 => c11_canonicity(cfg),
        12 => c12_rigid_body(),
        13 => c13_lax(),
        14 => c14_melnikov(),
        _ => c15_r3bp(),
    };
    let known_infeasible = KNOWN_INFEASIBLE.contains(&id);
    Ok(match res {
        Ok((pass, measured)) => CriterionOutcome { id, name, pass, known_infeasible, measured, error: None },
        Err(e) => CriterionOutcome { id, name, pass: false, known_infeasible, measured: Value::Null, error: Some(e.to_string()) },
    })
}

/// Runs every criterion in order.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let outcomes: Vec<CriterionOutcome> =
        CRITERIA.iter().map(|(id, _)| run_criterion(*id, cfg).expect("listed criterion")).collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let unexpected_failures = outcomes.iter().filter(|o| !o.pass && !o.known_infeasible).map(|o| o.id).collect();
    SuiteReport { mode: cfg.mode, seed: cfg.seed, failed: outcomes.len() - passed, passed, outcomes, unexpected_failures }
}

type Check = Result<(bool, Value)>;

fn c01_kepler_exactness() -> Check {
    let rec = kepler_series_recursion(12)?;
    let mut tree_orders = Vec::new();
    for k in 1..=8 {
        let all = kepler_series_trees(k, false, u64::MAX)?;
        let nonzero = kepler_series_trees(k, true, u64::MAX)?;
        tree_orders.push(all == rec[k - 1] && nonzero == rec[k - 1]);
    }
    let lagrange: Vec<bool> = (1..=12).map(|k| lagrange_series(k) == rec[k - 1]).collect();
    let pass = tree_orders.iter().all(|&b| b) && lagrange.iter().all(|&b| b);
    Ok((pass, json!({ "trees_equal_recursion_k1_8": tree_orders, "lagrange_equal_recursion_k1_12": lagrange })))
}

fn c02_laplace() -> Check {
    let radius = laplace_radius();
    let (quarter, inverse_e) = crude_radius_bounds();
    let pass = (radius - 0.6627).abs() <= 5e-4 && quarter == 0.25 && (inverse_e - 0.3678).abs() <= 1e-4;
    Ok((pass, json!({ "radius": radius, "crude_quarter": quarter, "crude_inverse_e": inverse_e })))
}

fn c03_plain_series(cfg: &SuiteConfig) -> Check {
    let n = cfg.pick(200, 1000);
    let mut rng = cfg.rng(3);
    let (mut worst, mut at) = (0.0f64, (0.0, 0.0));
    let mut over = 0usize;
    for _ in 0..n {
        let e = rng.gen_range(0.0..=0.6);
        let lambda = rng.gen_range(0.0..2.0 * PI);
        let series = plain_series_eval(e, lambda, 15)?;
        let exact = solve_kepler(e, lambda, KeplerMethod::Newton)? - lambda;
        let err = (series - exact).abs();
        if err > 1e-8 {
            over += 1;
        }
        if err > worst {
            worst = err;
            at = (e, lambda);
        }
    }
    Ok((worst <= 1e-8, json!({ "samples": n, "max_error": worst, "worst_e": at.0, "worst_lambda": at.1, "samples_over_tol": over })))
}

fn c04_anomalies(cfg: &SuiteConfig) -> Check {
    let n = cfg.pick(200, 1000);
    let mut rng = cfg.rng(4);
    let mut worst = 0.0f64;
    for _ in 0..n {
        let e = rng.gen_range(0.0..0.9);
        let lambda = rng.gen_range(-PI..PI);
        worst = worst.max(anomalies(e, lambda)?.max_residual());
    }
    let fg = fg_leading_coefficients(3)?;
    let fg_ok = (fg.g_linear - 1.0).abs() <= 1e-3
        && (fg.f_linear - 2.0).abs() <= 1e-3
        && (fg.g_xy - 1.0).abs() <= 1e-2
        && (fg.f_xy - 2.5).abs() <= 1e-2;
    Ok((worst <= 1e-12 && fg_ok, json!({ "samples": n, "max_residual": worst, "fg": fg })))
}

fn c05_zero_current() -> Check {
    let mut sizes = Vec::new();
    for k in 2..=6 {
        sizes.push(zero_current_sum(k, u64::MAX)?.len());
    }
    Ok((sizes.iter().all(|&s| s == 0), json!({ "nonzero_coefficients_k2_6": sizes })))
}

fn c06_coefficient_bound() -> Check {
    let rec = kepler_series_recursion(12)?;
    let mut ratios = Vec::new();
    let mut pass = true;
    for (idx, h) in rec.iter().enumerate() {
        let k = idx + 1;
        let bound = BigRational::from_integer(num_bigint::BigInt::from(4u64.pow(k as u32)));
        let sum = exact_abs_sum(h).ok_or_else(|| Error::InvalidInput(format!("order {k} has non-rational moduli")))?;
        pass &= sum <= bound;
        ratios.push((sum / bound).to_f64().unwrap_or(f64::NAN));
    }
    Ok((pass, json!({ "abs_sum_over_4k": ratios })))
}

fn c07_siegel(cfg: &SuiteConfig) -> Check {
    let order = cfg.pick(5, 6);
    let r = siegel_scan(&golden_frequency(), order, 2, CENSUS_BUDGET)?;
    Ok((
        r.violations == 0,
        json!({
            "max_order": r.max_order,
            "trees_per_order": r.trees_per_order,
            "violations": r.violations,
            "max_ratio": r.max_ratio,
            "max_scale": r.max_scale,
        }),
    ))
}

fn c08_lindstedt() -> Check {
    let (f, omega) = (default_perturbation(), golden_frequency());
    let dd = lindstedt_recursion::<DoubleDouble>(&f, &omega, 8)?;
    let eps = DoubleDouble::from_f64(1e-3);
    let residual = torus_residual(&dd, eps, 8)?;
    let ratio = residual_doubling_ratio(&dd, eps, 8)?;
    let series = lindstedt_recursion::<f64>(&f, &omega, 8)?;
    let flow = verify_torus_flow(&series, 1e-3, &[0.3, -1.2], 10.0, 0.5)?;
    let pass = residual <= 1e-15 && (ratio / 512.0 - 1.0).abs() <= 0.25 && flow.max_deviation <= 1e-8;
    Ok((pass, json!({ "residual": residual, "doubling_ratio": ratio, "flow_max_deviation": flow.max_deviation })))
}

fn c09_birkhoff() -> Check {
    let f = positive_perturbation(3, 0.5);
    let omega0 = [1.0, GOLDEN];
    let rep = birkhoff_conjugacy(&f, &omega0, 0.05, &[0.4, -0.2], &[0.3, 1.1], 10.0, 0.1)?;
    let resonant = matches!(birkhoff_closed_form(&f, &omega0, 2.0 - GOLDEN), Err(Error::ResonantDenominator { .. }));
    Ok((rep.max_error() <= 1e-8 && resonant, json!({ "conjugacy": rep, "resonant_denominator_raised": resonant })))
}

fn c10_cluster() -> Check {
    let (f, omega) = (default_perturbation(), golden_frequency());
    let c = 5f64.sqrt();
    let kernel = ClusterKernel::build(&f, &omega, c, 4, u64::MAX)?;
    let first = kernel.matrix(&HarmonicVector::new(&[1, 0]))?.first_order_norm();
    let probe = divisor_probe(&kernel, 1e-3, 30, 20)?;
    let coarse = divisor_probe(&ClusterKernel::build(&f, &omega, c, 2, u64::MAX)?, 1e-3, 30, 20)?;
    let max_ratio = probe.iter().map(|p| p.ratio).fold(0.0, f64::max);
    let stable = probe.iter().zip(&coarse).all(|(p, q)| p.ratio.is_finite() && (p.ratio - q.ratio).abs() <= 1e-4 * p.ratio);
    let mut gap = 0.0f64;
    for nu in smallest_divisors(&omega, 30, 20) {
        let m = kernel.matrix(&nu)?.value(1e-3);
        gap = gap.max(resummation_gap(omega.dot(&nu), &m, 10)?);
    }
    let series = lindstedt_recursion::<f64>(&f, &omega, 8)?;
    let closure = torus_generating_function(&series, 1e-3, 16)?.closure_residual;
    let pass = first <= 1e-14 && stable && max_ratio < 1e3 && gap <= 1e-15 && closure <= 1e-8;
    Ok((
        pass,
        json!({
            "first_order_norm": first,
            "probe_max_ratio": max_ratio,
            "probe_stable": stable,
            "resummation_gap": gap,
            "closure_residual": closure,
        }),
    ))
}

fn c11_canonicity(cfg: &SuiteConfig) -> Check {
    let points = [[0.3, -0.7, 1.2, 0.5], [1.0, 2.0, -0.4, -0.1], [-0.5, 0.25, 0.8, -1.3]];
    let generated = map_from_generating_function(&point_transformation_generator(2, 0.1), DomainBox::cube(2, -50.0, 50.0));
    let mut maps = Vec::new();
    for m in [PhaseMap::identity(2), PhaseMap::polar(), generated] {
        let mut worst = 0.0f64;
        for x in &points {
            worst = worst.max(m.symplectic_residual(x)?);
        }
        maps.push((m.name.clone(), worst));
    }
    let scaling = PhaseMap::scaling(1, 2.0);
    let scaling_residual = scaling.symplectic_residual(&[0.4, -1.1])?;
    let scaling_rejected = !scaling.is_canonical(&[0.4, -1.1])?;
    let f = ObservableFn::new(|x| x[0] * x[0] * x[1]);
    let g = ObservableFn::new(|x| x[0] * x[1] * x[1]);
    let q = ObservableFn::new(|x| x[0] + x[1]);
    let jacobi = jacobi_residual(&f, &g, &q, &[1.0, 2.0]).abs();
    let n = cfg.pick(20, 100);
    let mut rng = cfg.rng(11);
    let mut deprit = 0.0f64;
    for _ in 0..n {
        let x = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.3..2.8),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        ];
        deprit = deprit.max(verify_deprit_canonicity(&x)?.residual);
    }
    let pass = maps.iter().all(|m| m.1 <= 1e-6) && scaling_rejected && jacobi <= 1e-8 && deprit <= 1e-6;
    let maps: Vec<Value> = maps.into_iter().map(|(n, r)| json!({ "map": n, "residual": r })).collect();
    Ok((
        pass,
        json!({
            "maps": maps,
            "scaling_residual": scaling_residual,
            "jacobi_residual": jacobi,
            "deprit_samples": n,
            "deprit_max_residual": deprit,
        }),
    ))
}

fn c12_rigid_body() -> Check {
    let i = InertiaTriple::new(1.0, 2.0, 3.0)?;
    let run = integrate_free_body(&i, &[0.3, 0.2, 0.8], &[1.0, 0.0, 0.0, 0.0], 100.0, 0.5, OdeOptions::tight())?;
    let drift = run.energy_drift.max(run.momentum_drift);

    let sym = InertiaTriple::new(1.5, 1.5, 2.5)?;
    let w0 = [0.4, -0.3, 0.9];
    let srun = integrate_free_body(&sym, &w0, &[1.0, 0.0, 0.0, 0.0], 100.0, 0.5, OdeOptions::tight())?;
    let (e, g) = (sym.kinetic_energy(&w0), sym.momentum_squared(&w0).sqrt());
    let mut psi_err = 0.0f64;
    for s in &srun.samples {
        let m = sym.momentum(&s.omega);
        let l = m[2];
        let branch = if l >= 0.0 { PsiBranch::Plus } else { PsiBranch::Minus };
        let rate = psi_rate(&sym, e, g, m[0].atan2(m[1]), branch)?;
        psi_err = psi_err.max((rate - l * (1.0 / sym.i3 - 1.0 / sym.i1)).abs());
    }
    let omegas: Vec<[f64; 3]> = srun.samples.iter().map(|s| s.omega).collect();
    let (psi_spread, phi_spread) = rate_spread(&sym, &omegas);

    let orient = EulerAngles::new(0.9, 0.4, -0.3);
    let mut period_err = 0.0f64;
    for w in [[0.3, 0.2, 0.8], [1.0, 0.2, 0.3], [0.2, 0.5, -0.9]] {
        let quad = body_periods(&i, i.kinetic_energy(&w), i.momentum_squared(&w).sqrt())?;
        let num = integrated_periods(&i, &w, &orient)?;
        period_err = period_err.max(((quad.t_l - num.t_l) / quad.t_l).abs()).max(((quad.t_g - num.t_g) / quad.t_g).abs());
    }
    let pass = drift <= 1e-10 && psi_err <= 1e-10 && psi_spread <= 1e-10 && phi_spread <= 1e-10 && period_err <= 1e-4;
    Ok((
        pass,
        json!({
            "energy_drift": run.energy_drift,
            "momentum_drift": run.momentum_drift,
            "symmetric_psi_rate_error": psi_err,
            "symmetric_rate_spread": [psi_spread, phi_spread],
            "period_relative_error": period_err,
        }),
    ))
}

fn c13_lax() -> Check {
    let cases = [
        (LatticeKind::Toda { m: 1.0, g: 1.0, kappa: 2.0 }, vec![1.0, -1.0], vec![0.0, 1.0]),
        (LatticeKind::Toda { m: 1.7, g: 0.6, kappa: 1.3 }, vec![0.5, -0.2, 0.1], vec![0.0, 0.8, 1.5]),
        (LatticeKind::Calogero { m: 1.0, g: 1.0, omega: 0.0 }, vec![0.3, 0.0, -0.4], vec![-1.0, 0.2, 1.5]),
    ];
    let mut rows = Vec::new();
    let mut pass = true;
    for (kind, p, q) in cases {
        let r = lax_eigenvalue_drift(&LatticeState::new(kind, p, q)?, 10.0, 0.1)?;
        pass &= r.max_drift <= 1e-7 && r.max_entry_variation >= 1e-2;
        rows.push(json!({ "kind": kind, "max_drift": r.max_drift, "max_entry_variation": r.max_entry_variation }));
    }
    Ok((pass, json!({ "cases": rows })))
}

fn c14_melnikov() -> Check {
    let mut worst = 0.0f64;
    let mut analytic_gap = 0.0f64;
    for alpha in [[0.3, 1.1], [1.0, -0.4], [2.5, 2.0], [-0.7, 0.9]] {
        let m = melnikov_matrix(arnold_perturbation, [0.0, 0.0], alpha, [0.0, 0.0], 1.0)?;
        let target = 16.0 * (alpha[0].cos() * alpha[1].sin()).abs();
        worst = worst.max((m.det.abs() - target).abs());
        analytic_gap = analytic_gap.max((m.det - arnold_melnikov_analytic(alpha, [0.0, 0.0], 1.0).det).abs());
    }
    Ok((worst <= 1e-6 && analytic_gap <= 1e-6, json!({ "max_det_error": worst, "max_analytic_gap": analytic_gap })))
}

fn c15_r3bp() -> Check {
    let p = R3bpParams::default();
    let at0 = pq_hessian(1.0, 0.3, 0.0, 0.0, 0.05, &p, R3bpForm::Composition, 1e-4)?;
    let near = pq_hessian(1.0, 0.3, 1e-5, -1e-5, 0.05, &p, R3bpForm::Composition, 1e-4)?;
    let mut jump = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            jump = jump.max((at0[a][b] - near[a][b]).abs());
        }
    }
    let mut gap = 0.0f64;
    for (l, g, lambda, gamma, eps) in [(1.2, 0.1, 0.7, 1.9, 0.01), (1.0, 0.3, -1.1, 0.4, 0.05), (2.0, 0.01, 2.9, -2.2, 0.1)] {
        let (pp, qq) = polar_to_pq(g, gamma);
        let a = regularized_r3bp_hamiltonian(l, lambda, pp, qq, eps, &p, R3bpForm::Composition)?;
        let b = r3bp_secular_hamiltonian(l, l - g, lambda + gamma, -gamma, eps, &p)?;
        gap = gap.max((a - b).abs());
    }
    Ok((jump <= 1e-6 && gap <= 1e-10, json!({ "hessian_jump": jump, "composition_gap": gap })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_parsing() {
        assert_eq!("fast".parse::<SuiteMode>().unwrap(), SuiteMode::Fast);
        assert!("medium".parse::<SuiteMode>().is_err());
    }

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(16, &SuiteConfig::new(SuiteMode::Fast, 1)).is_err());
    }

    #[test]
    fn cheap_criteria_pass() {
        let cfg = SuiteConfig::new(SuiteMode::Fast, 1);
        for id in [2, 5, 14, 15] {
            let o = run_criterion(id, &cfg).unwrap();
            assert!(o.pass, "{o:?}");
        }
    }
}
