use bell_recycle::qmat::{
    eig_hermitian, identity2, kron, partial_trace_second, rot_sigma2, sigma1, sigma2, sigma3, sqrt_psd,
    xz_observable, ComplexMat, C64,
};
use proptest::prelude::*;

fn entry() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn mat2() -> impl Strategy<Value = ComplexMat> {
    prop::collection::vec(entry(), 4).prop_map(|e| ComplexMat::from_entries(2, &e).unwrap())
}

fn mat4() -> impl Strategy<Value = ComplexMat> {
    prop::collection::vec(entry(), 16).prop_map(|e| ComplexMat::from_entries(4, &e).unwrap())
}

fn herm4() -> impl Strategy<Value = ComplexMat> {
    mat4().prop_map(|m| (m + m.adjoint()).scale_real(0.5))
}

fn psd4() -> impl Strategy<Value = ComplexMat> {
    mat4().prop_map(|g| g.matmul(&g.adjoint()))
}

// Kronecker product written out element by element.
fn kron_oracle(a: &ComplexMat, b: &ComplexMat) -> [[C64; 4]; 4] {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i2 in 0..2 {
                for j2 in 0..2 {
                    out[2 * i1 + i2][2 * j1 + j2] = a.get(i1, j1) * b.get(i2, j2);
                }
            }
        }
    }
    out
}

proptest! {
    #[test]
    fn kron_matches_elementwise_definition(a in mat2(), b in mat2()) {
        let k = kron(&a, &b).unwrap();
        let want = kron_oracle(&a, &b);
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                prop_assert!((k.get(i, j) - w).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kron_mixed_product_rule(a in mat2(), b in mat2(), c in mat2(), d in mat2()) {
        let lhs = kron(&a, &b).unwrap().matmul(&kron(&c, &d).unwrap());
        let rhs = kron(&a.matmul(&c), &b.matmul(&d)).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product(a in mat2(), b in mat2()) {
        let pt = partial_trace_second(&kron(&a, &b).unwrap()).unwrap();
        prop_assert!(pt.max_abs_diff(&a.scale(b.trace())) < 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution_and_reverses_products(a in mat4(), b in mat4()) {
        prop_assert_eq!(a.adjoint().adjoint(), a);
        let lhs = a.matmul(&b).adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn eig_reconstructs_and_is_orthonormal(h in herm4()) {
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let scale = h.frobenius_norm().max(1.0);
        prop_assert!(e.reconstruct_with(|x| x).max_abs_diff(&h) < 1e-11 * scale);
        let v = e.eigenvectors;
        prop_assert!(v.adjoint().matmul(&v).max_abs_diff(&ComplexMat::identity(4).unwrap()) < 1e-11);
        let sum: f64 = e.eigenvalues.iter().sum();
        prop_assert!((sum - h.trace().re).abs() < 1e-11 * scale);
    }

    #[test]
    fn sqrt_psd_squares_back(m in psd4()) {
        let r = sqrt_psd(&m).unwrap();
        prop_assert!(r.is_hermitian(1e-10));
        let scale = m.frobenius_norm().max(1.0);
        prop_assert!(r.matmul(&r).max_abs_diff(&m) < 1e-10 * scale);
        prop_assert!(eig_hermitian(&r).unwrap().eigenvalues[0] > -1e-9);
    }

    #[test]
    fn xz_observables_are_dichotomic(alpha in -10.0..10.0f64) {
        let o = xz_observable(alpha);
        prop_assert!(o.is_hermitian(1e-15));
        prop_assert!(o.matmul(&o).max_abs_diff(&identity2()) < 1e-12);
        let e = eig_hermitian(&o).unwrap();
        prop_assert!((e.eigenvalues[0] + 1.0).abs() < 1e-10 && (e.eigenvalues[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sigma2_rotations_are_unitary_and_compose(a in -7.0..7.0f64, b in -7.0..7.0f64) {
        let u = rot_sigma2(a);
        prop_assert!(u.is_unitary(1e-12));
        prop_assert!(u.matmul(&rot_sigma2(b)).max_abs_diff(&rot_sigma2(a + b)) < 1e-12);
    }
}

#[test]
fn rotation_is_the_exponential_of_sigma2() {
    // e^{iaσ₂} = cos a·I + i sin a·σ₂
    for a in [0.0, 0.3, -1.2, 2.5] {
        let f: f64 = a;
        let want = identity2().scale_real(f.cos()) + sigma2().scale(C64::new(0.0, f.sin()));
        assert!(rot_sigma2(a).max_abs_diff(&want) < 1e-15);
    }
}

#[test]
fn pauli_algebra() {
    let i = C64::new(0.0, 1.0);
    assert!(sigma1().matmul(&sigma2()).max_abs_diff(&sigma3().scale(i)) < 1e-15);
    assert!(sigma2().matmul(&sigma3()).max_abs_diff(&sigma1().scale(i)) < 1e-15);
    assert!(sigma3().matmul(&sigma1()).max_abs_diff(&sigma2().scale(i)) < 1e-15);
}
