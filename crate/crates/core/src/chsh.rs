//! CHSH values: numeric evaluation from operators and states, the closed
//! forms of the three deterministic strategies, shared-randomness mixing and
//! the implicit trade-off curves.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{kron, ComplexMat};
use crate::states::TwoQubitState;
use crate::strategies::{build_operators, luders_relay, Lambda, StrategyCase};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// Local-hidden-variable bound on the CHSH value.
pub const CLASSICAL_BOUND: f64 = 2.0;

const IMAG_TOL: f64 = 1e-10;
const PROB_TOL: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-9;

/// Which pair of parties a CHSH value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    AB,
    AC,
}

/// Alice–Bob and Alice–Charlie CHSH values of one strategy or mixture.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ChshPair {
    pub s_ab: f64,
    pub s_ac: f64,
}

impl ChshPair {
    pub fn new(s_ab: f64, s_ac: f64) -> Self {
        Self { s_ab, s_ac }
    }

    pub fn violates_both(&self) -> bool {
        self.s_ab > CLASSICAL_BOUND && self.s_ac > CLASSICAL_BOUND
    }

    pub fn min(&self) -> f64 {
        self.s_ab.min(self.s_ac)
    }

    /// `p·self + (1 − p)·other`
    pub fn lerp(&self, other: &ChshPair, p: f64) -> ChshPair {
        ChshPair {
            s_ab: p * self.s_ab + (1.0 - p) * other.s_ab,
            s_ac: p * self.s_ac + (1.0 - p) * other.s_ac,
        }
    }

    pub fn within_tsirelson(&self) -> bool {
        self.s_ab.abs() <= TSIRELSON + 1e-9 && self.s_ac.abs() <= TSIRELSON + 1e-9
    }
}

/// `Re Tr((a ⊗ b)·ρ)`
pub fn correlator(state: &TwoQubitState, a: &ComplexMat, b: &ComplexMat) -> Result<f64> {
    let ab = kron(a, b)?;
    let rho = state.rho();
    // Tr(XY) = Σ_ij X_ij Y_ji without forming the product.
    let mut tr = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            tr += ab.get(i, j) * rho.get(j, i);
        }
    }
    if tr.im.abs() > IMAG_TOL {
        return Err(Error::numerical(format!(
            "correlator has imaginary residue {:e}",
            tr.im
        )));
    }
    Ok(tr.re)
}

/// `E(0,0) + E(0,1) + E(1,0) − E(1,1)`
pub fn chsh_numeric(
    state: &TwoQubitState,
    first: &[ComplexMat; 2],
    second: &[ComplexMat; 2],
) -> Result<f64> {
    let mut s = 0.0;
    for (x, a) in first.iter().enumerate() {
        for (y, b) in second.iter().enumerate() {
            let e = correlator(state, a, b)?;
            s += if x == 1 && y == 1 { -e } else { e };
        }
    }
    Ok(s)
}

/// Both CHSH values of a deterministic strategy evaluated from its operators;
/// the Alice–Charlie value goes through the Lüders relay.
pub fn evaluate_case(state: &TwoQubitState, case: &StrategyCase) -> Result<ChshPair> {
    let ops = build_operators(case)?;
    let s_ab = chsh_numeric(state, &ops.alice, &ops.bob)?;
    let relayed = luders_relay(state, &ops)?;
    let s_ac = chsh_numeric(&relayed, &ops.alice, &ops.charlie)?;
    Ok(ChshPair { s_ab, s_ac })
}

/// The closed-form CHSH value of a deterministic strategy on the pure state
/// with angle `phi_state`.
///
/// `setting` is `φ` for basis projection and `θ` for the mixed strategy. The
/// identity-measurement value assumes Charlie uses [`optimal_chi`], so the
/// setting is ignored there; see [`parametric_pair`] for arbitrary `χ`.
///
/// [`optimal_chi`]: crate::strategies::optimal_chi
pub fn closed_form(lambda: Lambda, role: Role, phi_state: f64, setting: f64) -> f64 {
    let s2 = (2.0 * phi_state).sin();
    match (lambda, role) {
        (Lambda::BasisProjection, Role::AB) => 2.0 * setting.cos() * s2 + 2.0 * setting.sin(),
        (Lambda::BasisProjection, Role::AC) => 2.0 * setting.sin(),
        (Lambda::IdentityMeasurement, Role::AB) => 2.0 * (2.0 * phi_state).cos(),
        (Lambda::IdentityMeasurement, Role::AC) => 2.0 * (1.0 + s2 * s2).sqrt(),
        (Lambda::Mixed, Role::AB) => 2.0 * (setting + 2.0 * phi_state).sin(),
        (Lambda::Mixed, Role::AC) => setting.sin() + 2.0 * setting.cos() * s2,
    }
}

/// Closed-form `(S_AB, S_AC)` of a deterministic strategy for any setting,
/// including an arbitrary Charlie angle `χ` in the identity-measurement case
/// (`S_AC = 2 sin χ + 2 cos χ sin 2φ`).
pub fn parametric_pair(case: &StrategyCase, phi_state: f64) -> ChshPair {
    let setting = case.setting();
    match case.lambda {
        Lambda::IdentityMeasurement => {
            let s2 = (2.0 * phi_state).sin();
            ChshPair {
                s_ab: 2.0 * (2.0 * phi_state).cos(),
                s_ac: 2.0 * setting.sin() + 2.0 * setting.cos() * s2,
            }
        }
        lambda => ChshPair {
            s_ab: closed_form(lambda, Role::AB, phi_state, setting),
            s_ac: closed_form(lambda, Role::AC, phi_state, setting),
        },
    }
}

fn check_distribution(probs: impl Iterator<Item = f64>) -> Result<()> {
    let mut total = 0.0;
    let mut any = false;
    for p in probs {
        any = true;
        if !(0.0..=1.0 + PROB_TOL).contains(&p) {
            return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
        }
        total += p;
    }
    if !any {
        return Err(Error::invalid("empty probability distribution"));
    }
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::invalid(format!("probabilities sum to {total}, expected 1")));
    }
    Ok(())
}

/// Convex combination `Σ p·value`.
pub fn mix(values: &[(f64, f64)]) -> Result<f64> {
    check_distribution(values.iter().map(|&(_, p)| p))?;
    Ok(values.iter().map(|&(v, p)| p * v).sum())
}

/// A probability distribution over deterministic strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    components: Vec<(StrategyCase, f64)>,
}

impl MixedStrategy {
    pub fn new(components: Vec<(StrategyCase, f64)>) -> Result<Self> {
        if components.len() > 3 {
            return Err(Error::invalid("a mixture has at most three components"));
        }
        for (i, (a, _)) in components.iter().enumerate() {
            a.validate()?;
            if components[..i].iter().any(|(b, _)| b.lambda == a.lambda) {
                return Err(Error::invalid(format!("strategy {} appears twice", a.lambda)));
            }
        }
        check_distribution(components.iter().map(|&(_, p)| p))?;
        Ok(Self { components })
    }

    pub fn deterministic(case: StrategyCase) -> Result<Self> {
        Self::new(vec![(case, 1.0)])
    }

    /// `p` on `first`, `1 − p` on `second`.
    pub fn pair(first: StrategyCase, second: StrategyCase, p: f64) -> Result<Self> {
        Self::new(vec![(first, p), (second, 1.0 - p)])
    }

    pub fn components(&self) -> &[(StrategyCase, f64)] {
        &self.components
    }

    /// Mixed CHSH values, each component evaluated numerically.
    pub fn evaluate(&self, state: &TwoQubitState) -> Result<ChshPair> {
        let mut ab = Vec::with_capacity(self.components.len());
        let mut ac = Vec::with_capacity(self.components.len());
        for (case, p) in &self.components {
            let v = evaluate_case(state, case)?;
            ab.push((v.s_ab, *p));
            ac.push((v.s_ac, *p));
        }
        Ok(ChshPair { s_ab: mix(&ab)?, s_ac: mix(&ac)? })
    }
}

/// Closed interval of `S_AB` values the strategy reaches on the state.
pub fn achievable_ab_range(lambda: Lambda, phi_state: f64) -> (f64, f64) {
    let s2 = (2.0 * phi_state).sin();
    match lambda {
        Lambda::BasisProjection => (0.0, 2.0 * (1.0 + s2 * s2).sqrt()),
        Lambda::IdentityMeasurement => (0.0, TSIRELSON),
        Lambda::Mixed => (-2.0, 2.0),
    }
}

/// `S_AC` as a function of `S_AB` along each deterministic trade-off curve.
///
/// The mixed-strategy expression describes the branch where
/// `cos(θ + 2φ) ≤ 0`, which for `θ ∈ [0, π/2]` covers
/// `θ ≥ π/2 − 2φ`.
pub fn tradeoff_closed_form(lambda: Lambda, phi_state: f64, s_ab: f64) -> Result<f64> {
    let (lo, hi) = achievable_ab_range(lambda, phi_state);
    if !(s_ab >= lo - RANGE_SLACK && s_ab <= hi + RANGE_SLACK) {
        return Err(Error::invalid(format!(
            "S_AB = {s_ab} outside the achievable range [{lo}, {hi}] of strategy {lambda}"
        )));
    }
    let s2 = (2.0 * phi_state).sin();
    let c2 = (2.0 * phi_state).cos();
    let value = match lambda {
        Lambda::BasisProjection => {
            let root = (4.0 + 4.0 * s2 * s2 - s_ab * s_ab).max(0.0).sqrt();
            (s_ab + s2 * root) / (1.0 + s2 * s2)
        }
        Lambda::IdentityMeasurement => (8.0 - s_ab * s_ab).max(0.0).sqrt(),
        Lambda::Mixed => {
            let root = (1.0 - s_ab * s_ab / 4.0).max(0.0).sqrt();
            s2 * root * (1.0 - 2.0 * c2) + 0.5 * s_ab * (2.0 * s2 * s2 + c2)
        }
    };
    Ok(value)
}
