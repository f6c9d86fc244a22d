//! Self-check suite: numeric CHSH values against the closed forms, the
//! trade-off curves against their parametric forms, channel laws of the relay
//! and the reference optima.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2, TAU};

use rand::Rng;
use rand_distr::StandardNormal;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chsh::{closed_form, evaluate_case, tradeoff_closed_form, Role, TSIRELSON};
use crate::error::Result;
use crate::frontier::{equal_point, violation_interval};
use crate::qmat::{ComplexMat, C64};
use crate::states::{fidelity_to_pure, prepare, StateSpec, TwoQubitState};
use crate::strategies::{build_operators, luders_relay, optimal_chi, Lambda, StrategyCase};
use crate::table::{Table, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation seen.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["check", "passed", "worst", "tolerance", "detail"]);
        for c in &self.checks {
            t.rows.push(vec![
                c.name.into(),
                c.passed.into(),
                c.worst.into(),
                c.tolerance.into(),
                Value::Text(c.detail.clone()),
            ]);
        }
        t
    }
}

/// Sample sizes of the randomized checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteSize {
    pub oracle_draws: usize,
    pub tradeoff_draws: usize,
    pub circle_draws: usize,
    pub channel_draws: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self { oracle_draws: 1000, tradeoff_draws: 200, circle_draws: 100, channel_draws: 2000 }
    }
}

/// Random full-rank density matrix `GG†/Tr(GG†)` with entries of `G`
/// uniform in the unit square.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> Result<TwoQubitState> {
    let entries: Vec<C64> = (0..16)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let g = ComplexMat::from_entries(4, &entries)?;
    let gg = g.matmul(&g.adjoint());
    let rho = gg.scale_real(1.0 / gg.trace().re).hermitian_part();
    TwoQubitState::new(rho)
}

/// Random pure state with a ket uniform on the unit sphere of `C⁴`.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> Result<TwoQubitState> {
    let ket: Vec<C64> = (0..4)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
            C64::new(a, b)
        })
        .collect();
    let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let ket: Vec<C64> = ket.iter().map(|z| z / norm).collect();
    TwoQubitState::new(ComplexMat::outer(&ket)?.hermitian_part())
}

pub fn random_case<R: Rng + ?Sized>(rng: &mut R) -> StrategyCase {
    let lambda = Lambda::ALL[rng.random_range(0..3)];
    StrategyCase::new(lambda, rng.random_range(0.0..TAU))
}

fn max_check(name: &'static str, tolerance: f64, worst: f64, detail: String) -> Check {
    Check { name, passed: worst <= tolerance, worst, tolerance, detail }
}

fn failed(name: &'static str, tolerance: f64, err: impl std::fmt::Display) -> Check {
    Check { name, passed: false, worst: f64::INFINITY, tolerance, detail: err.to_string() }
}

/// Numeric CHSH values of random deterministic strategies against the closed
/// forms. The identity-measurement case uses the optimal `χ`, where its
/// closed form holds.
pub fn check_closed_forms<R: Rng + ?Sized>(rng: &mut R, draws: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..draws {
        let phi = rng.random_range(0.0..=FRAC_PI_4);
        let mut case = random_case(rng);
        if case.lambda == Lambda::IdentityMeasurement {
            case = StrategyCase::identity_measurement(optimal_chi(phi)?.chi);
        }
        let state = prepare(&StateSpec::pure(phi)?)?;
        let got = evaluate_case(&state, &case)?;
        let setting = case.setting();
        let ab = closed_form(case.lambda, Role::AB, phi, setting);
        let ac = closed_form(case.lambda, Role::AC, phi, setting);
        worst = worst.max((got.s_ab - ab).abs()).max((got.s_ac - ac).abs());
    }
    Ok(worst)
}

/// Setting on the branch where the implicit trade-off curve of `lambda`
/// reproduces its parametric form.
pub fn branch_setting<R: Rng + ?Sized>(rng: &mut R, lambda: Lambda, phi: f64) -> Result<f64> {
    let s2 = (2.0 * phi).sin();
    Ok(match lambda {
        Lambda::BasisProjection => {
            let lo = FRAC_PI_2 - s2.atan();
            rng.random_range(lo..=lo + FRAC_PI_2)
        }
        Lambda::IdentityMeasurement => optimal_chi(phi)?.chi,
        Lambda::Mixed => rng.random_range((FRAC_PI_2 - 2.0 * phi).max(0.0)..=FRAC_PI_2),
    })
}

pub fn check_tradeoff<R: Rng + ?Sized>(rng: &mut R, draws: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for lambda in Lambda::ALL {
        for _ in 0..draws {
            let phi = rng.random_range(0.0..=FRAC_PI_4);
            let setting = branch_setting(rng, lambda, phi)?;
            let ab = closed_form(lambda, Role::AB, phi, setting);
            let ac = closed_form(lambda, Role::AC, phi, setting);
            let implicit = tradeoff_closed_form(lambda, phi, ab)?;
            worst = worst.max((implicit - ac).abs());
        }
    }
    Ok(worst)
}

pub fn check_circle(draws: usize) -> f64 {
    (0..draws)
        .map(|i| {
            let phi = FRAC_PI_4 * i as f64 / (draws.max(2) - 1) as f64;
            let ab = closed_form(Lambda::IdentityMeasurement, Role::AB, phi, 0.0);
            let ac = closed_form(Lambda::IdentityMeasurement, Role::AC, phi, 0.0);
            (ab * ab + ac * ac - 8.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Channel laws over random pure and mixed states and strategies: worst
/// trace error, most negative eigenvalue, worst identity-map deviation for
/// identity measurement and the largest `|S|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub trace_error: f64,
    pub min_eigenvalue: f64,
    pub identity_error: f64,
    pub max_abs_chsh: f64,
}

pub fn check_channel<R: Rng + ?Sized>(rng: &mut R, draws: usize) -> Result<ChannelStats> {
    let mut stats = ChannelStats {
        trace_error: 0.0,
        min_eigenvalue: f64::INFINITY,
        identity_error: 0.0,
        max_abs_chsh: 0.0,
    };
    for i in 0..draws {
        let state = if i % 2 == 0 { random_pure(rng)? } else { random_density(rng)? };
        let case = random_case(rng);
        let ops = build_operators(&case)?;
        let out = luders_relay(&state, &ops)?;
        stats.trace_error = stats.trace_error.max((out.rho().trace() - 1.0).norm());
        stats.min_eigenvalue = stats.min_eigenvalue.min(out.min_eigenvalue()?);
        if case.lambda == Lambda::IdentityMeasurement {
            stats.identity_error = stats.identity_error.max(out.rho().max_abs_diff(state.rho()));
        }
        let s = evaluate_case(&state, &case)?;
        stats.max_abs_chsh = stats.max_abs_chsh.max(s.s_ab.abs()).max(s.s_ac.abs());
    }
    Ok(stats)
}

fn reference_checks(checks: &mut Vec<Check>) {
    const ANGLE_TOL_DEG: f64 = 0.05;
    let s3 = 3f64.sqrt();

    match equal_point(FRAC_PI_4, (Lambda::BasisProjection, Lambda::IdentityMeasurement)) {
        Ok(r) => {
            let worst = (r.s_star - 2.0 * SQRT_2 * (s3 - 1.0))
                .abs()
                .max((r.p_star - (6.0 - 2.0 * s3) / 3.0).abs());
            let angles = (r.settings.phi_meas.to_degrees() - 75.0)
                .abs()
                .max((r.settings.chi.to_degrees() - 45.0).abs());
            let mut c = max_check(
                "equal_point_basis_identity",
                1e-6,
                worst,
                format!("s* = {:.10}, p* = {:.10}, angle error {angles:.2e} deg", r.s_star, r.p_star),
            );
            c.passed &= angles <= ANGLE_TOL_DEG;
            checks.push(c);

            let name = "violation_interval_basis_identity";
            match violation_interval(FRAC_PI_4, r.pair, &r.settings) {
                Ok(Some((lo, hi))) => {
                    let want_hi = (4.0 - 2.0 * SQRT_2) / (3.0 - s3);
                    let worst = (lo - 2.0 / 6f64.sqrt()).abs().max((hi - want_hi).abs());
                    checks.push(max_check(name, 1e-6, worst, format!("[{lo:.8}, {hi:.8}]")));
                }
                Ok(None) => checks.push(failed(name, 1e-6, "empty interval")),
                Err(e) => checks.push(failed(name, 1e-6, e)),
            }
        }
        Err(e) => checks.push(failed("equal_point_basis_identity", 1e-6, e)),
    }

    match equal_point(FRAC_PI_4, (Lambda::BasisProjection, Lambda::Mixed)) {
        Ok(r) => {
            let worst = (r.s_star - 2.0 * 10f64.sqrt() / 3.0)
                .abs()
                .max((r.p_star - 1.0 / 3.0).abs());
            let angles = (r.settings.phi_meas - 3f64.atan())
                .abs()
                .max((r.settings.theta - (1.0f64 / 3.0).atan()).abs())
                .to_degrees();
            let mut c = max_check(
                "equal_point_basis_mixed",
                1e-6,
                worst,
                format!("s* = {:.10}, p* = {:.10}, angle error {angles:.2e} deg", r.s_star, r.p_star),
            );
            c.passed &= angles <= ANGLE_TOL_DEG;
            checks.push(c);
        }
        Err(e) => checks.push(failed("equal_point_basis_mixed", 1e-6, e)),
    }

    let name = "fidelity_of_noisy_state";
    match StateSpec::new(FRAC_PI_4, 0.0196).and_then(|s| prepare(&s)) {
        Ok(state) => {
            let f = fidelity_to_pure(&state, FRAC_PI_4);
            checks.push(max_check(name, 1e-4, (f - 0.9853).abs(), format!("F = {f:.6}")));
        }
        Err(e) => checks.push(failed(name, 1e-4, e)),
    }
}

/// Runs every check with random draws from `seed`. Numerical failures inside
/// a check are reported as a failed check rather than aborting the suite.
pub fn run_suite(seed: u64, size: SuiteSize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let tol = 1e-10;
    checks.push(match check_closed_forms(&mut rng, size.oracle_draws) {
        Ok(w) => max_check("closed_form_vs_numeric", tol, w, format!("{} draws", size.oracle_draws)),
        Err(e) => failed("closed_form_vs_numeric", tol, e),
    });

    let tol = 1e-9;
    checks.push(match check_tradeoff(&mut rng, size.tradeoff_draws) {
        Ok(w) => max_check("tradeoff_curves", tol, w, format!("{} draws per strategy", size.tradeoff_draws)),
        Err(e) => failed("tradeoff_curves", tol, e),
    });

    let w = check_circle(size.circle_draws);
    checks.push(max_check("identity_measurement_circle", 1e-10, w, format!("{} state angles", size.circle_draws)));

    match check_channel(&mut rng, size.channel_draws) {
        Ok(s) => {
            let n = format!("{} random states", size.channel_draws);
            checks.push(max_check("relay_trace", 1e-10, s.trace_error, n.clone()));
            checks.push(max_check("relay_positivity", 1e-9, (-s.min_eigenvalue).max(0.0), n.clone()));
            checks.push(max_check("relay_identity_measurement", 1e-12, s.identity_error, n.clone()));
            checks.push(max_check(
                "tsirelson_bound",
                1e-9,
                (s.max_abs_chsh - TSIRELSON).max(0.0),
                format!("max |S| = {:.12}", s.max_abs_chsh),
            ));
        }
        Err(e) => checks.push(failed("relay_channel", 1e-10, e)),
    }

    reference_checks(&mut checks);
    Report { checks }
}
