//! The three deterministic projective strategies and the sequential relay
//! that hands Bob's post-measurement qubit to Charlie.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{self, identity2, kron, sigma1, sigma3, xz_observable, ComplexMat};
use crate::states::TwoQubitState;

/// Which deterministic strategy the shared randomness selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lambda {
    /// Bob projects onto a basis for both inputs.
    BasisProjection = 1,
    /// Bob performs the trivial measurement for both inputs.
    IdentityMeasurement = 2,
    /// Trivial measurement for one input, basis projection for the other.
    Mixed = 3,
}

impl Lambda {
    pub const ALL: [Lambda; 3] = [Lambda::BasisProjection, Lambda::IdentityMeasurement, Lambda::Mixed];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Lambda::BasisProjection),
            2 => Ok(Lambda::IdentityMeasurement),
            3 => Ok(Lambda::Mixed),
            _ => Err(Error::invalid(format!("strategy index must be 1, 2 or 3, got {i}"))),
        }
    }
}

impl TryFrom<u8> for Lambda {
    type Error = Error;
    fn try_from(i: u8) -> Result<Self> {
        Lambda::from_index(i)
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Measurement angles in radians. Each strategy reads only its own member:
/// `phi_meas` for basis projection, `chi` for identity measurement, `theta`
/// for the mixed strategy.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Settings {
    pub phi_meas: f64,
    pub chi: f64,
    pub theta: f64,
}

impl Settings {
    pub fn get(&self, lambda: Lambda) -> f64 {
        match lambda {
            Lambda::BasisProjection => self.phi_meas,
            Lambda::IdentityMeasurement => self.chi,
            Lambda::Mixed => self.theta,
        }
    }

    pub fn set(&mut self, lambda: Lambda, angle: f64) {
        match lambda {
            Lambda::BasisProjection => self.phi_meas = angle,
            Lambda::IdentityMeasurement => self.chi = angle,
            Lambda::Mixed => self.theta = angle,
        }
    }

    pub fn with(mut self, lambda: Lambda, angle: f64) -> Self {
        self.set(lambda, angle);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyCase {
    pub lambda: Lambda,
    pub settings: Settings,
}

impl StrategyCase {
    pub fn new(lambda: Lambda, angle: f64) -> Self {
        Self { lambda, settings: Settings::default().with(lambda, angle) }
    }

    pub fn basis_projection(phi_meas: f64) -> Self {
        Self::new(Lambda::BasisProjection, phi_meas)
    }

    pub fn identity_measurement(chi: f64) -> Self {
        Self::new(Lambda::IdentityMeasurement, chi)
    }

    pub fn mixed(theta: f64) -> Self {
        Self::new(Lambda::Mixed, theta)
    }

    /// The angle this strategy actually reads.
    pub fn setting(&self) -> f64 {
        self.settings.get(self.lambda)
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.settings;
        if s.phi_meas.is_finite() && s.chi.is_finite() && s.theta.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid("strategy angles must be finite"))
        }
    }
}

/// Every operator one round of a deterministic strategy uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSet {
    pub alice: [ComplexMat; 2],
    pub bob: [ComplexMat; 2],
    pub bob_unitaries: [ComplexMat; 2],
    pub charlie: [ComplexMat; 2],
}

pub fn build_operators(case: &StrategyCase) -> Result<OperatorSet> {
    case.validate()?;
    let id = identity2();
    let (x, z) = (sigma1(), sigma3());
    let ops = match case.lambda {
        Lambda::BasisProjection => {
            let phi = case.settings.phi_meas;
            let (s, c) = phi.sin_cos();
            let b0 = xz_observable(phi);
            OperatorSet {
                alice: [x, z],
                bob: [b0, x.scale_real(c) - z.scale_real(s)],
                bob_unitaries: [id, qmat::rot_sigma2(phi - FRAC_PI_2)],
                charlie: [b0, -b0],
            }
        }
        Lambda::IdentityMeasurement => {
            let (s, c) = case.settings.chi.sin_cos();
            OperatorSet {
                alice: [z, x],
                bob: [id, id],
                bob_unitaries: [id, id],
                charlie: [x.scale_real(c) + z.scale_real(s), z.scale_real(s) - x.scale_real(c)],
            }
        }
        Lambda::Mixed => {
            let (s, c) = case.settings.theta.sin_cos();
            OperatorSet {
                alice: [x.scale_real(c) + z.scale_real(s), z.scale_real(s) - x.scale_real(c)],
                bob: [id, x],
                bob_unitaries: [id, id],
                charlie: [z, x],
            }
        }
    };
    Ok(ops)
}

/// Charlie's angle for the identity-measurement strategy, `arctan(csc 2φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalChi {
    pub chi: f64,
    /// Set for the product state, where the cosecant diverges and `χ = π/2`
    /// is returned as the limit.
    pub degenerate: bool,
}

pub fn optimal_chi(phi_state: f64) -> Result<OptimalChi> {
    if !(0.0..=FRAC_PI_4 + 1e-12).contains(&phi_state) {
        return Err(Error::invalid(format!(
            "state angle must lie in [0, 45] degrees, got {} degrees",
            phi_state.to_degrees()
        )));
    }
    let s = (2.0 * phi_state).sin();
    if s <= 0.0 {
        return Ok(OptimalChi { chi: FRAC_PI_2, degenerate: true });
    }
    Ok(OptimalChi { chi: (1.0 / s).atan(), degenerate: false })
}

/// Effect of outcome `b ∈ {+1, −1}` for a dichotomic observable: `(I + b·O)/2`.
pub fn effect(observable: &ComplexMat, b: i8) -> ComplexMat {
    (identity2() + observable.scale_real(f64::from(b))).scale_real(0.5)
}

/// State shared by Alice and Charlie after Bob measures and applies his
/// correction unitary, averaged uniformly over Bob's two inputs:
/// `Σ_{y,b} (I ⊗ U_y √B_{b|y}) ρ (I ⊗ U_y √B_{b|y})† / 2`.
pub fn luders_relay(state: &TwoQubitState, ops: &OperatorSet) -> Result<TwoQubitState> {
    let mut out = ComplexMat::zeros(4)?;
    for (bob, unitary) in ops.bob.iter().zip(ops.bob_unitaries.iter()) {
        for b in [1i8, -1] {
            let e = effect(bob, b);
            let root = qmat::sqrt_psd(&e).map_err(|err| match err {
                Error::NotPsd { min_eigenvalue } => Error::numerical(format!(
                    "measurement effect has negative eigenvalue {min_eigenvalue:e}"
                )),
                other => other,
            })?;
            let kraus = kron(&identity2(), &unitary.matmul(&root))?;
            out = out + state.rho().sandwich(&kraus);
        }
    }
    let rho = out.scale_real(0.5).hermitian_part();
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 {
        return Err(Error::numerical(format!("relay changed the trace to {}", tr.re)));
    }
    Ok(TwoQubitState::from_trusted(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{prepare, StateSpec};

    const TOL: f64 = 1e-12;

    fn assert_dichotomic(o: &ComplexMat) {
        assert!(o.is_hermitian(TOL));
        assert!((o * o).max_abs_diff(&identity2()) < TOL);
    }

    #[test]
    fn identity_strategy_bob_measures_identity() {
        for chi in [0.0, 0.3, 2.0] {
            let ops = build_operators(&StrategyCase::identity_measurement(chi)).unwrap();
            assert_eq!(ops.bob, [identity2(), identity2()]);
        }
    }

    #[test]
    fn basis_projection_at_right_angle() {
        let ops = build_operators(&StrategyCase::basis_projection(FRAC_PI_2)).unwrap();
        assert!(ops.bob[0].max_abs_diff(&sigma3()) < 1e-15);
        assert!(ops.bob[1].max_abs_diff(&-sigma3()) < 1e-15);
    }

    #[test]
    fn mixed_strategy_at_zero_theta() {
        let ops = build_operators(&StrategyCase::mixed(0.0)).unwrap();
        assert!(ops.alice[0].max_abs_diff(&sigma1()) < 1e-15);
        assert!(ops.alice[1].max_abs_diff(&-sigma1()) < 1e-15);
    }

    #[test]
    fn operators_are_dichotomic_and_unitaries_unitary() {
        for lambda in Lambda::ALL {
            for angle in [-1.0, 0.0, 0.4, 1.3, 3.0] {
                let ops = build_operators(&StrategyCase::new(lambda, angle)).unwrap();
                for o in ops.alice.iter().chain(&ops.bob).chain(&ops.charlie) {
                    assert_dichotomic(o);
                }
                for u in &ops.bob_unitaries {
                    assert!(u.is_unitary(TOL));
                }
            }
        }
    }

    #[test]
    fn rejects_invalid_input() {
        assert!(Lambda::from_index(0).is_err());
        assert!(Lambda::from_index(4).is_err());
        assert!(build_operators(&StrategyCase::mixed(f64::NAN)).is_err());
    }

    #[test]
    fn optimal_chi_values() {
        assert!((optimal_chi(FRAC_PI_4).unwrap().chi - FRAC_PI_4).abs() < 1e-15);
        let eighth = optimal_chi(std::f64::consts::FRAC_PI_8).unwrap();
        assert!((eighth.chi - 2f64.sqrt().atan()).abs() < 1e-15);
        assert!((eighth.chi - 0.9553).abs() < 1e-4);
        let zero = optimal_chi(0.0).unwrap();
        assert!(zero.degenerate);
        assert_eq!(zero.chi, FRAC_PI_2);
        let near = optimal_chi(1e-9).unwrap();
        assert!(!near.degenerate && (near.chi - FRAC_PI_2).abs() < 1e-8);
        assert!(optimal_chi(1.0).is_err());
    }

    #[test]
    fn identity_relay_is_identity_map() {
        let state = prepare(&StateSpec::new(0.5, 0.1).unwrap()).unwrap();
        let ops = build_operators(&StrategyCase::identity_measurement(0.3)).unwrap();
        let out = luders_relay(&state, &ops).unwrap();
        assert!(out.rho().max_abs_diff(state.rho()) < 1e-12);
    }

    #[test]
    fn relay_preserves_trace() {
        let state = prepare(&StateSpec::new(0.2, 0.05).unwrap()).unwrap();
        for lambda in Lambda::ALL {
            let ops = build_operators(&StrategyCase::new(lambda, 1.1)).unwrap();
            let out = luders_relay(&state, &ops).unwrap();
            assert!((out.rho().trace().re - 1.0).abs() < 1e-12);
            assert!(out.min_eigenvalue().unwrap() > -1e-12);
        }
    }

    #[test]
    fn projective_effects_are_their_own_roots() {
        for angle in [0.1, 0.9, 2.2] {
            let ops = build_operators(&StrategyCase::basis_projection(angle)).unwrap();
            for bob in &ops.bob {
                for b in [1, -1] {
                    let e = effect(bob, b);
                    assert!(qmat::sqrt_psd(&e).unwrap().max_abs_diff(&e) < 1e-12);
                }
            }
        }
    }
}
