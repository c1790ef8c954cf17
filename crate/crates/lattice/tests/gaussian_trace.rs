use num_complex::Complex64;
use opens_core::DenseMatrix;
use opens_lattice::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random BdG generator `[[A, B], [−B̄, −Ā]]` in interleaved ordering.
fn random_bdg(m: usize, hermitian: bool, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = || Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    let mut a = DenseMatrix::from_fn(m, m, |_, _| c());
    let mut b = DenseMatrix::from_fn(m, m, |_, _| c());
    b = &b - b.transpose();
    if hermitian {
        a = (&a + a.adjoint()).scale(0.5);
    }
    let mut h = DenseMatrix::zeros(2 * m, 2 * m);
    let bd = if hermitian { b.adjoint() } else { DenseMatrix::from_fn(m, m, |_, _| c()) };
    let bd = &bd - bd.transpose();
    for i in 0..m {
        for j in 0..m {
            h[(2 * i, 2 * j)] = a[(i, j)];
            h[(2 * i + 1, 2 * j + 1)] = -a[(j, i)];
            h[(2 * i, 2 * j + 1)] = b[(i, j)];
            h[(2 * i + 1, 2 * j)] = bd[(i, j)];
        }
    }
    h
}

#[test]
fn zero_generator_gives_full_dimension() {
    for m in 1..5 {
        let t = gaussian_trace(&DenseMatrix::zeros(2 * m, 2 * m)).unwrap();
        assert!((t - Complex64::new((1u32 << m) as f64, 0.0)).norm() < 1e-13);
    }
}

#[test]
fn single_mode_is_two_cosh() {
    let w = 0.83;
    let h = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(w, 0.0), Complex64::new(-w, 0.0)]));
    let t = gaussian_trace(&h).unwrap();
    assert!((t.re - 2.0 * (w / 2.0).cosh()).abs() < 1e-14);
    assert!((t - ed_gaussian_trace(&h).unwrap()).norm() < 1e-14);
}

#[test]
fn random_hermitian_matches_fock_trace() {
    for seed in 0..5 {
        let h = random_bdg(3, true, seed);
        let a = gaussian_trace(&h).unwrap();
        let b = ed_gaussian_trace(&h).unwrap();
        assert!((a - b).norm() < 1e-10 * b.norm(), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn non_hermitian_and_unstructured_generators() {
    for seed in 10..14 {
        let h = random_bdg(3, false, seed).scale(3.0);
        let a = gaussian_trace(&h).unwrap();
        let b = ed_gaussian_trace(&h).unwrap();
        assert!((a - b).norm() < 1e-10 * b.norm(), "seed {seed}: {a} vs {b}");
    }
    // arbitrary matrix: only the particle-hole part and the trace enter
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let h = DenseMatrix::from_fn(6, 6, |_, _| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let a = gaussian_trace(&h).unwrap();
    let b = ed_gaussian_trace(&h).unwrap();
    assert!((a - b).norm() < 1e-10 * b.norm(), "{a} vs {b}");
}

#[test]
fn branch_follows_the_sign_change() {
    // exp(½ψ†Hψ) with H = diag(iθ, −iθ): trace 2cos(θ/2) changes sign past θ = π
    for theta in [0.5, 2.9, 3.4, 5.0] {
        let h = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(0.0, theta),
            Complex64::new(0.0, -theta),
        ]));
        let t = gaussian_trace(&h).unwrap();
        assert!((t.re - 2.0 * (theta / 2.0).cos()).abs() < 1e-14);
    }
}

#[test]
fn tracking_continues_log_phase() {
    let logs = track_log_dets(|s| Ok(vec![Complex64::new(0.0, 7.0 * s).exp().ln()])).unwrap();
    assert!((logs[0].im - 7.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flux_trace_is_bounded(l1 in 1usize..6, d in 0usize..4, l2 in 1usize..8, g in -3.1f64..3.1, ising in any::<bool>()) {
        let model = if ising { LatticeModel::critical_ising() } else { LatticeModel::tight_binding() };
        let st = LatticeState::infinite(&model, SubsystemLayout::new(l1, d, l2).unwrap()).unwrap();
        let f = st.flux_trace(g).unwrap();
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        let c = st.flux_trace(-g).unwrap();
        prop_assert!((f - c.conj()).norm() < 1e-10);
    }

    #[test]
    fn probabilities_are_a_distribution(l1 in 1usize..5, d in 0usize..3, l2 in 1usize..7, ising in any::<bool>()) {
        let model = if ising { LatticeModel::critical_ising() } else { LatticeModel::tight_binding() };
        let st = LatticeState::infinite(&model, SubsystemLayout::new(l1, d, l2).unwrap()).unwrap();
        let p = st.charge_probabilities().unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(p.iter().all(|&x| x > -1e-12));
    }
}
