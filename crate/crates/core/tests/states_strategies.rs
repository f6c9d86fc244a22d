use std::f64::consts::{FRAC_PI_4, TAU};

use bell_recycle::qmat::{identity2, sigma1, sigma3, sqrt_psd, ComplexMat, C64};
use bell_recycle::states::{fidelity_to_pure, noise_for_fidelity, prepare, psi_ket, StateSpec, TwoQubitState};
use bell_recycle::strategies::{build_operators, effect, luders_relay, optimal_chi, Lambda, StrategyCase};
use bell_recycle::verify::{random_density, random_pure};
use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lambda() -> impl Strategy<Value = Lambda> {
    prop_oneof![
        Just(Lambda::BasisProjection),
        Just(Lambda::IdentityMeasurement),
        Just(Lambda::Mixed)
    ]
}

fn case() -> impl Strategy<Value = StrategyCase> {
    (lambda(), 0.0..TAU).prop_map(|(l, a)| StrategyCase::new(l, a))
}

fn state() -> impl Strategy<Value = TwoQubitState> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, pure)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if pure { random_pure(&mut rng) } else { random_density(&mut rng) }.unwrap()
    })
}

// The relay written as the projector sandwich Σ_y Σ_b (I⊗U_y P_b) ρ (I⊗U_y P_b)† / 2,
// valid when every effect is a projector.
fn relay_oracle(rho: &TwoQubitState, case: &StrategyCase) -> ComplexMat {
    let ops = build_operators(case).unwrap();
    let mut out = ComplexMat::zeros(4).unwrap();
    for y in 0..2 {
        for b in [1i8, -1] {
            let k = ops.bob_unitaries[y].matmul(&effect(&ops.bob[y], b));
            let big = bell_recycle::qmat::kron(&identity2(), &k).unwrap();
            out = out + big.matmul(rho.rho()).matmul(&big.adjoint()).scale_real(0.5);
        }
    }
    out
}

proptest! {
    #[test]
    fn prepared_states_are_valid(phi in 0.0..=FRAC_PI_4, v in 0.0..=1.0f64) {
        let s = prepare(&StateSpec::new(phi, v).unwrap()).unwrap();
        prop_assert!(s.rho().is_hermitian(1e-12));
        prop_assert!((s.rho().trace().re - 1.0).abs() < 1e-9);
        prop_assert!(s.min_eigenvalue().unwrap() >= -1e-9);
        prop_assert!((fidelity_to_pure(&s, phi) - (1.0 - 0.75 * v)).abs() < 1e-12);
    }

    #[test]
    fn fidelity_decreases_with_noise(phi in 0.0..=FRAC_PI_4, v1 in 0.0..=1.0f64, v2 in 0.0..=1.0f64) {
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        let f = |v| fidelity_to_pure(&prepare(&StateSpec::new(phi, v).unwrap()).unwrap(), phi);
        prop_assert!(f(lo) >= f(hi) - 1e-15);
    }

    #[test]
    fn operators_satisfy_their_invariants(c in case()) {
        let ops = build_operators(&c).unwrap();
        for o in ops.alice.iter().chain(&ops.bob).chain(&ops.charlie) {
            prop_assert!(o.is_hermitian(1e-12));
            let sq = o.matmul(o);
            prop_assert!(sq.max_abs_diff(&identity2()) < 1e-12);
        }
        for u in &ops.bob_unitaries {
            prop_assert!(u.is_unitary(1e-12));
        }
    }

    #[test]
    fn relay_is_trace_and_positivity_preserving(rho in state(), c in case()) {
        let out = luders_relay(&rho, &build_operators(&c).unwrap()).unwrap();
        prop_assert!((out.rho().trace() - 1.0).norm() < 1e-10);
        prop_assert!(out.min_eigenvalue().unwrap() >= -1e-9);
    }

    #[test]
    fn relay_matches_projector_sandwich(rho in state(), c in case()) {
        let out = luders_relay(&rho, &build_operators(&c).unwrap()).unwrap();
        prop_assert!(out.rho().max_abs_diff(&relay_oracle(&rho, &c)) < 1e-12);
    }

    #[test]
    fn identity_measurement_relay_is_identity(rho in state(), chi in 0.0..TAU) {
        let c = StrategyCase::identity_measurement(chi);
        let out = luders_relay(&rho, &build_operators(&c).unwrap()).unwrap();
        prop_assert!(out.rho().max_abs_diff(rho.rho()) < 1e-12);
    }

    #[test]
    fn projective_effects_are_their_own_roots(c in case(), y in 0usize..2, plus in any::<bool>()) {
        let ops = build_operators(&c).unwrap();
        let e = effect(&ops.bob[y], if plus { 1 } else { -1 });
        prop_assert!(sqrt_psd(&e).unwrap().max_abs_diff(&e) < 1e-12);
    }

    #[test]
    fn optimal_chi_is_arccot_of_sine(phi in 1e-6..=FRAC_PI_4) {
        let chi = optimal_chi(phi).unwrap().chi;
        prop_assert!((chi.tan() * (2.0 * phi).sin() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn psi_ket_is_normalised_with_real_amplitudes() {
    for deg in [0.0f64, 17.0, 34.08, 45.0] {
        let k = psi_ket(deg.to_radians());
        let norm: f64 = k.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        assert_eq!(k[1], C64::new(0.0, 0.0));
        assert_eq!(k[2], C64::new(0.0, 0.0));
    }
}

#[test]
fn fidelity_target_of_experiment() {
    let v = noise_for_fidelity(0.9853).unwrap();
    assert!((v - 0.0196).abs() < 1e-12);
}

#[test]
fn documented_operator_assignments() {
    let bp = build_operators(&StrategyCase::basis_projection(FRAC_PI_4)).unwrap();
    assert!(bp.alice[0].max_abs_diff(&sigma1()) < 1e-15);
    assert!(bp.alice[1].max_abs_diff(&sigma3()) < 1e-15);
    assert!(bp.charlie[1].max_abs_diff(&(-bp.charlie[0])) < 1e-15);
    let mixed = build_operators(&StrategyCase::mixed(0.4)).unwrap();
    assert!(mixed.bob[0].max_abs_diff(&identity2()) < 1e-15);
    assert!(mixed.bob[1].max_abs_diff(&sigma1()) < 1e-15);
    assert!(mixed.charlie[0].max_abs_diff(&sigma3()) < 1e-15);
}
