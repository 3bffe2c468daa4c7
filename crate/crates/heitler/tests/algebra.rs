//! Operator-algebra kernel: Kronecker products, vectorization, the matrix
//! exponential, kernel extraction, and the similarity/partial-trace helpers.

mod common;

use approx::assert_abs_diff_eq;
use common::{max_abs_diff, rand_matrix, SplitMix64};
use heitler::algebra::{
    boson_ops, dagger, expm, hermitize, is_hermitian, kernel_eigvec, kron, min_eigval_hermitian,
    null_space_vector, one_norm, partial_trace_sensor, scaled_similarity, sigma_ops, trace,
    unvec_col, vec_col, vectorize_superop,
};
use heitler::{C64, Error, FockTruncation};
use ndarray::{array, Array1, Array2};
use proptest::prelude::*;

fn eye(n: usize) -> Array2<C64> {
    Array2::eye(n)
}

#[test]
fn fock_truncation_bounds() {
    assert!(matches!(
        FockTruncation::new(0),
        Err(Error::InvalidParams(_))
    ));
    assert!(matches!(
        FockTruncation::new(1),
        Err(Error::InvalidParams(_))
    ));
    let t = FockTruncation::new(3).unwrap();
    assert_eq!(t.n_max(), 3);
    assert!(t.supports_order(2));
    assert!(!t.supports_order(3));
    assert!(FockTruncation::new(5).unwrap().supports_order(4));
}

#[test]
fn sigma_algebra() {
    let (s, sd) = sigma_ops::<C64>();
    // Pseudo-spin: sigma^2 = 0, sigma sigma' + sigma' sigma = 1.
    assert_eq!(max_abs_diff(&s.dot(&s), &Array2::zeros((2, 2))), 0.0);
    let anti = s.dot(&sd) + sd.dot(&s);
    assert_eq!(max_abs_diff(&anti, &eye(2)), 0.0);
    // Lowering operator annihilates the ground state: sigma = |g><e|.
    assert_eq!(s[(0, 1)], C64::new(1.0, 0.0));
    assert_eq!(s[(1, 0)], C64::new(0.0, 0.0));
    assert_eq!(max_abs_diff(&dagger(&s), &sd), 0.0);
}

#[test]
fn boson_matrix_elements() {
    let t = FockTruncation::new(4).unwrap();
    let (a, ad) = boson_ops::<C64>(t);
    for k in 1..4 {
        assert_abs_diff_eq!(a[(k - 1, k)].re, (k as f64).sqrt(), epsilon = 1e-15);
    }
    // Number operator diagonal 0..n_max-1.
    let n = ad.dot(&a);
    for k in 0..4 {
        assert_abs_diff_eq!(n[(k, k)].re, k as f64, epsilon = 1e-15);
    }
    // Truncated commutator: identity except the last diagonal entry.
    let comm = a.dot(&ad) - ad.dot(&a);
    for k in 0..3 {
        assert_abs_diff_eq!(comm[(k, k)].re, 1.0, epsilon = 1e-15);
    }
    assert_abs_diff_eq!(comm[(3, 3)].re, -3.0, epsilon = 1e-15);
}

#[test]
fn kron_matches_direct_construction() {
    let a = array![
        [C64::new(1.0, 0.0), C64::new(2.0, -1.0)],
        [C64::new(0.0, 3.0), C64::new(-1.0, 0.5)]
    ];
    let b = array![
        [C64::new(0.5, 0.0), C64::new(0.0, 1.0)],
        [C64::new(1.0, 1.0), C64::new(2.0, 0.0)]
    ];
    let k = kron(&a, &b);
    assert_eq!(k.dim(), (4, 4));
    for i in 0..4 {
        for j in 0..4 {
            let expect = a[(i / 2, j / 2)] * b[(i % 2, j % 2)];
            assert!((k[(i, j)] - expect).norm() < 1e-15);
        }
    }
}

#[test]
fn vectorization_roundtrip_and_sandwich_identity() {
    let mut rng = SplitMix64(7);
    for n in [2usize, 3, 4] {
        let x = rand_matrix(&mut rng, n);
        let v = vec_col(&x);
        let back = unvec_col(&v, n).unwrap();
        assert_eq!(max_abs_diff(&back, &x), 0.0);
        // Column stacking: vec index j*d + i holds X[i, j].
        assert_eq!(v[1], x[(1, 0)]);

        // vec(A X B) = (B^T (x) A) vec(X)
        let a = rand_matrix(&mut rng, n);
        let b = rand_matrix(&mut rng, n);
        let lhs = vec_col(&a.dot(&x).dot(&b));
        let rhs = kron(&b.t().to_owned(), &a).dot(&v);
        let dev = lhs
            .iter()
            .zip(rhs.iter())
            .map(|(p, q)| (p - q).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-12, "sandwich identity violated: {dev:e}");
    }
    assert!(unvec_col(&Array1::<C64>::zeros(5), 2).is_err());
}

#[test]
fn hermitian_helpers() {
    let mut rng = SplitMix64(42);
    let m = rand_matrix(&mut rng, 3);
    let h = hermitize(&m);
    assert!(is_hermitian(&h, 1e-14));
    assert!(!is_hermitian(&m, 1e-6));
    assert_eq!(max_abs_diff(&dagger(&dagger(&m)), &m), 0.0);
    // trace of the hermitized part is the real part of the trace
    assert_abs_diff_eq!(trace(&h).im, 0.0, epsilon = 1e-15);
    assert_abs_diff_eq!(trace(&h).re, trace(&m).re, epsilon = 1e-14);
}

#[test]
fn expm_known_values() {
    // expm(0) = I
    let z = Array2::<C64>::zeros((3, 3));
    assert!(max_abs_diff(&expm(&z).unwrap(), &eye(3)) < 1e-15);

    // diagonal
    let d = array![
        [C64::new(0.3, 1.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-2.0, -0.5)]
    ];
    let e = expm(&d).unwrap();
    assert!((e[(0, 0)] - d[(0, 0)].exp()).norm() < 1e-14);
    assert!((e[(1, 1)] - d[(1, 1)].exp()).norm() < 1e-14);
    assert!(e[(0, 1)].norm() < 1e-15);

    // nilpotent: exp([[0,1],[0,0]]) = [[1,1],[0,1]]
    let n = array![
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
    ];
    let en = expm(&n).unwrap();
    let expect = array![
        [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]
    ];
    assert!(max_abs_diff(&en, &expect) < 1e-15);
}

#[test]
fn expm_group_properties() {
    let mut rng = SplitMix64(11);
    let a = rand_matrix(&mut rng, 4);
    // inverse
    let e = expm(&a).unwrap();
    let em = expm(&a.mapv(|x| -x)).unwrap();
    assert!(max_abs_diff(&e.dot(&em), &eye(4)) < 1e-12);
    // scaling-squaring consistency across the theta threshold
    let big = a.mapv(|x| x * 40.0);
    let e_big = expm(&big).unwrap();
    let e_half = expm(&big.mapv(|x| x * 0.5)).unwrap();
    let dev = max_abs_diff(&e_big, &e_half.dot(&e_half));
    let scale = one_norm(&e_big);
    assert!(dev / scale < 1e-11, "squaring mismatch: rel {:e}", dev / scale);
}

#[test]
fn one_norm_is_max_column_sum() {
    let m = array![
        [C64::new(3.0, 4.0), C64::new(1.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, -2.0)]
    ];
    assert_abs_diff_eq!(one_norm(&m), 5.0, epsilon = 1e-15);
}

#[test]
fn kernel_extraction() {
    // Unique kernel direction.
    let l = array![
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(-1.0, 0.3), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-2.0, -1.0)]
    ];
    let v = kernel_eigvec(&l).unwrap();
    let norm0 = v[0].norm();
    assert!(norm0 > 0.99 && v[1].norm() < 1e-10 && v[2].norm() < 1e-10);

    // No kernel.
    let shifted = l.mapv(|x| x - C64::new(0.5, 0.0));
    assert!(matches!(
        kernel_eigvec(&shifted),
        Err(Error::NoSteadyState { .. })
    ));

    // Doubly degenerate kernel.
    let mut degen = l.clone();
    degen[(1, 1)] = C64::new(0.0, 0.0);
    assert!(matches!(
        kernel_eigvec(&degen),
        Err(Error::DegenerateSteadyState { count: 2, .. })
    ));
}

#[test]
fn null_space_of_pure_decay() {
    // Emitter decay without drive: steady state is the ground state.
    let (s, _) = sigma_ops::<C64>();
    let h = Array2::<C64>::zeros((2, 2));
    let l = vectorize_superop(&h, &[(1.0, s)]).unwrap();
    let v = null_space_vector(&l).unwrap();
    let rho = unvec_col(&v, 2).unwrap();
    assert!((rho[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(rho[(1, 1)].norm() < 1e-12);
    assert!(rho[(0, 1)].norm() < 1e-12);
}

#[test]
fn vectorized_superop_preserves_trace() {
    // The trace functional (row vector over diagonal vec indices) must
    // annihilate any Lindblad generator from the left.
    let mut rng = SplitMix64(5);
    for _ in 0..5 {
        let h = hermitize(&rand_matrix(&mut rng, 3));
        let j1 = rand_matrix(&mut rng, 3);
        let j2 = rand_matrix(&mut rng, 3);
        let l = vectorize_superop(&h, &[(0.7, j1), (1.3, j2)]).unwrap();
        let d = 3;
        let mut worst = 0.0f64;
        for q in 0..d * d {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..d {
                acc += l[(i * d + i, q)];
            }
            worst = worst.max(acc.norm());
        }
        assert!(
            worst < 1e-12 * one_norm(&l).max(1.0),
            "trace functional not annihilated: {worst:e}"
        );
    }
}

#[test]
fn vectorized_superop_rejects_mismatched_shapes() {
    let h = Array2::<C64>::zeros((3, 3));
    let j = Array2::<C64>::zeros((2, 2));
    assert!(matches!(
        vectorize_superop(&h, &[(1.0, j)]),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn similarity_rescaling_is_exact() {
    let mut rng = SplitMix64(19);
    let l = rand_matrix(&mut rng, 4);
    let w = Array1::from_vec(vec![1.0, 0.1, 1e-6, 3.0]);
    let scaled = scaled_similarity(&l, &w).unwrap();
    // L'_{pq} = L_{pq} w_q / w_p
    for p in 0..4 {
        for q in 0..4 {
            let expect = l[(p, q)] * C64::new(w[q] / w[p], 0.0);
            assert!((scaled[(p, q)] - expect).norm() < 1e-12 * (1.0 + expect.norm()));
        }
    }
    // zero / non-finite weights rejected
    let bad = Array1::from_vec(vec![1.0, 0.0, 1.0, 1.0]);
    assert!(scaled_similarity(&l, &bad).is_err());
    let wrong_len = Array1::from_vec(vec![1.0; 3]);
    assert!(scaled_similarity(&l, &wrong_len).is_err());
}

#[test]
fn partial_trace_recovers_factor() {
    // rho = rho_e (x) rho_s with n_max = 3 sensor levels.
    let rho_e = array![
        [C64::new(0.7, 0.0), C64::new(0.1, 0.2)],
        [C64::new(0.1, -0.2), C64::new(0.3, 0.0)]
    ];
    let mut rho_s = Array2::<C64>::zeros((3, 3));
    rho_s[(0, 0)] = C64::new(0.5, 0.0);
    rho_s[(1, 1)] = C64::new(0.3, 0.0);
    rho_s[(2, 2)] = C64::new(0.2, 0.0);
    rho_s[(0, 1)] = C64::new(0.05, 0.02);
    rho_s[(1, 0)] = C64::new(0.05, -0.02);
    let joint = kron(&rho_e, &rho_s);
    let red = partial_trace_sensor(&joint, 3).unwrap();
    assert!(max_abs_diff(&red, &rho_e) < 1e-14);
}

#[test]
fn min_eigenvalue_of_hermitian() {
    let m = array![
        [C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
        [C64::new(0.0, -1.0), C64::new(2.0, 0.0)]
    ];
    // eigenvalues 1 and 3
    assert_abs_diff_eq!(min_eigval_hermitian(&m).unwrap(), 1.0, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kron_associative(seed in 0u64..1u64 << 48) {
        let mut rng = SplitMix64(seed);
        let a = rand_matrix(&mut rng, 2);
        let b = rand_matrix(&mut rng, 2);
        let c = rand_matrix(&mut rng, 2);
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(max_abs_diff(&left, &right) < 1e-13);
    }

    #[test]
    fn kron_mixed_product(seed in 0u64..1u64 << 48) {
        // (A (x) B)(C (x) D) = AC (x) BD
        let mut rng = SplitMix64(seed ^ 0xABCD);
        let a = rand_matrix(&mut rng, 2);
        let b = rand_matrix(&mut rng, 3);
        let c = rand_matrix(&mut rng, 2);
        let d = rand_matrix(&mut rng, 3);
        let lhs = kron(&a, &b).dot(&kron(&c, &d));
        let rhs = kron(&a.dot(&c), &b.dot(&d));
        prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn expm_trace_determinant(seed in 0u64..1u64 << 48) {
        // det(expm(A)) = exp(tr A), checked via |det| = exp(Re tr A).
        let mut rng = SplitMix64(seed ^ 0x5EED);
        let a = rand_matrix(&mut rng, 3);
        let e = expm(&a).unwrap();
        use ndarray_linalg_free_det::det3;
        let det = det3(&e);
        let expect = trace(&a).re.exp();
        prop_assert!((det.norm() - expect).abs() < 1e-10 * expect.max(1.0));
    }
}

/// 3x3 determinant by cofactor expansion (test-local helper).
mod ndarray_linalg_free_det {
    use heitler::C64;
    use ndarray::Array2;

    pub fn det3(m: &Array2<C64>) -> C64 {
        m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)])
    }
}
