//! The two-qubit family `cos φ|00⟩ + sin φ|11⟩` with optional white noise.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::qmat::{self, ComplexMat, C64, HERMITIAN_TOL, PSD_SLACK};

/// Slack allowed on the state-angle interval `[0, π/4]` so that values
/// converted from degrees (e.g. `45.0_f64.to_radians()`) are accepted.
const ANGLE_SLACK: f64 = 1e-12;

pub const TRACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSpec {
    /// State angle in radians, within `[0, π/4]`.
    pub phi_state: f64,
    /// White-noise weight in `[0, 1]`; zero is the ideal pure state.
    pub noise_v: f64,
}

impl StateSpec {
    pub fn new(phi_state: f64, noise_v: f64) -> Result<Self> {
        let spec = Self { phi_state, noise_v };
        spec.validate()?;
        Ok(spec)
    }

    pub fn pure(phi_state: f64) -> Result<Self> {
        Self::new(phi_state, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        check_phi_state(self.phi_state)?;
        if !(0.0..=1.0).contains(&self.noise_v) {
            return Err(Error::invalid(format!(
                "noise weight must lie in [0, 1], got {}",
                self.noise_v
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_phi_state(phi: f64) -> Result<()> {
    if !(-ANGLE_SLACK..=FRAC_PI_4 + ANGLE_SLACK).contains(&phi) {
        return Err(Error::invalid(format!(
            "state angle must lie in [0, 45] degrees, got {} degrees",
            phi.to_degrees()
        )));
    }
    Ok(())
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    rho: ComplexMat,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rho: ComplexMat) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::invalid("two-qubit state must be 4x4"));
        }
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::invalid(format!(
                "density matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let min = qmat::eig_hermitian(&rho)?.eigenvalues[0];
        if min < -PSD_SLACK {
            return Err(Error::NotPsd { min_eigenvalue: min });
        }
        Ok(Self { rho: rho.hermitian_part() })
    }

    pub(crate) fn from_trusted(rho: ComplexMat) -> Self {
        Self { rho }
    }

    pub fn rho(&self) -> &ComplexMat {
        &self.rho
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(qmat::eig_hermitian(&self.rho)?.eigenvalues[0])
    }
}

/// `cos φ|00⟩ + sin φ|11⟩` as a ket in the computational basis.
pub fn psi_ket(phi: f64) -> [C64; 4] {
    let (s, c) = phi.sin_cos();
    let zero = C64::new(0.0, 0.0);
    [C64::new(c, 0.0), zero, zero, C64::new(s, 0.0)]
}

/// `(1 − v)|ψ_φ⟩⟨ψ_φ| + v·I/4`
pub fn prepare(spec: &StateSpec) -> Result<TwoQubitState> {
    spec.validate()?;
    let pure = ComplexMat::outer(&psi_ket(spec.phi_state))?;
    let rho = pure.scale_real(1.0 - spec.noise_v) + qmat::identity4().scale_real(spec.noise_v / 4.0);
    Ok(TwoQubitState::from_trusted(rho))
}

/// `⟨ψ_target|ρ|ψ_target⟩`
pub fn fidelity_to_pure(state: &TwoQubitState, phi_target: f64) -> f64 {
    let psi = psi_ket(phi_target);
    let rho = state.rho();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            acc += psi[i].conj() * rho.get(i, j) * psi[j];
        }
    }
    acc.re.clamp(0.0, 1.0)
}

/// White-noise weight that yields fidelity `f` with the ideal state,
/// from `F = 1 − 3v/4`.
pub fn noise_for_fidelity(f: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&f) {
        return Err(Error::invalid(format!(
            "white noise reaches fidelities in [0.25, 1], got {f}"
        )));
    }
    Ok(4.0 * (1.0 - f) / 3.0)
}
