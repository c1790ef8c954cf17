use std::f64::consts::PI;

use num_complex::Complex64;
use opens_lattice::*;

#[test]
fn tight_binding_hopping_and_filling() {
    let g = infinite_chain_correlations(&LatticeModel::tight_binding(), 6).unwrap();
    let m = g.matrix();
    // ⟨c†_j c_{j+1}⟩ = −Γ_pp(j+1, j)/2, ⟨n_j⟩ = (1 − Γ_pp(j, j))/2
    assert!((-m[(2 * 3, 2 * 2)].re / 2.0 - 1.0 / PI).abs() < 1e-15);
    assert!(((1.0 - m[(4, 4)].re) / 2.0 - 0.5).abs() < 1e-15);
    let ring = ring_correlations(&LatticeModel::tight_binding(), 512, 6).unwrap();
    let hop = -ring.matrix()[(6, 4)].re / 2.0;
    assert!((hop - 1.0 / PI).abs() < 1e-5, "ring hopping {hop}");
}

#[test]
fn presets_are_hermitian_bounded_and_particle_hole_symmetric() {
    for model in [LatticeModel::tight_binding(), LatticeModel::critical_ising()] {
        let g = infinite_chain_correlations(&model, 40).unwrap();
        let m = g.matrix();
        assert!((m - m.adjoint()).camax() < 1e-14);
        let s = g.spectrum();
        assert!(s[0] >= -1.0 - 1e-12 && *s.last().unwrap() <= 1.0 + 1e-12);
        assert!(g.particle_hole_defect() < 1e-14);
    }
}

#[test]
fn ising_kernels_match_ring_momentum_sum() {
    let model = LatticeModel::critical_ising();
    // nearest neighbours agree to 1e-6 at N = 1024
    let near = (infinite_chain_correlations(&model, 2).unwrap().matrix() - ring_correlations(&model, 1024, 2).unwrap().matrix()).camax();
    assert!(near < 1e-6, "nearest-neighbour deviation {near:.3e}");
    let inf = infinite_chain_correlations(&model, 24).unwrap();
    let ring = ring_correlations(&model, 1024, 24).unwrap();
    let err = (inf.matrix() - ring.matrix()).camax();
    assert!(err < 2e-5, "entrywise deviation {err:.3e}");
    let coarse = ring_correlations(&model, 256, 24).unwrap();
    let err_coarse = (inf.matrix() - coarse.matrix()).camax();
    // O(N⁻²) convergence
    assert!((err_coarse / err - 16.0).abs() < 1.0, "ratio {}", err_coarse / err);
}

#[test]
fn ising_kernels_match_open_chain_bulk() {
    let model = LatticeModel::critical_ising();
    let inf = infinite_chain_correlations(&model, 10).unwrap();
    let bulk_error = |n: usize| {
        let full = finite_chain_correlations(&model, n).unwrap();
        let sites: Vec<usize> = (n / 2 - 5..n / 2 + 5).collect();
        (full.restrict(&sites).unwrap().matrix() - inf.matrix()).camax()
    };
    let (e1, e2) = (bulk_error(200), bulk_error(400));
    // boundary corrections decay only as 1/N
    assert!(e2 < 2e-3 && (e1 / e2 - 2.0).abs() < 0.2, "bulk deviations {e1:.3e}, {e2:.3e}");
}

#[test]
fn non_preset_needs_finite_chain() {
    let model = LatticeModel::new(0.5, 0.3).unwrap();
    let layout = SubsystemLayout::new(2, 1, 2).unwrap();
    assert!(matches!(ground_state_correlations(&model, &layout), Err(opens_core::Error::Domain(_))));
    assert!(finite_chain_correlations(&model, 10).is_ok());
}

#[test]
fn zero_flux_reproduces_entanglement_spectrum() {
    for model in [LatticeModel::tight_binding(), LatticeModel::critical_ising()] {
        let layout = SubsystemLayout::new(6, 3, 5).unwrap();
        let g = ground_state_correlations(&model, &layout).unwrap();
        let flux = flux_correlation_matrix(&g, 0.0, &layout).unwrap();
        assert!((&flux.gamma_flux - g.matrix()).camax() < 1e-13);
        assert!(flux.log_prefactor.norm() < 1e-14);
        let ga = g.restrict(&(0..6).collect::<Vec<_>>()).unwrap();
        let st = LatticeState::new(&g, layout).unwrap();
        for n in [2usize, 3, 4] {
            let s_formula = renyi_entropy(&ga, n as f64);
            let s_products = st.log_trace_power(n).unwrap() / (1.0 - n as f64);
            assert!((s_formula - s_products).abs() < 1e-10, "{model:?} n={n}");
        }
    }
}

#[test]
fn entanglement_hamiltonian_inverts() {
    let layout = SubsystemLayout::new(5, 0, 0).unwrap();
    let g = ground_state_correlations(&LatticeModel::critical_ising(), &layout).unwrap();
    let h = entanglement_hamiltonian(&g);
    let e = opens_core::matfun::expm(&(-h));
    let id = opens_core::DenseMatrix::identity(10, 10);
    let target = (&id - g.matrix()) * (&id + g.matrix()).try_inverse().unwrap();
    assert!((&e - &target).camax() < 1e-9 * target.camax(), "{:.3e}", (e - target).camax());
}

#[test]
fn opposite_fluxes_give_conjugate_prefactors() {
    for model in [LatticeModel::tight_binding(), LatticeModel::critical_ising()] {
        let layout = SubsystemLayout::new(4, 2, 6).unwrap();
        let g = ground_state_correlations(&model, &layout).unwrap();
        for gm in [0.4, 1.3, 2.8] {
            let a = flux_correlation_matrix(&g, gm, &layout).unwrap().log_prefactor;
            let b = flux_correlation_matrix(&g, -gm, &layout).unwrap().log_prefactor;
            assert!((a - b.conj()).norm() < 1e-11, "{model:?} γ={gm}: {a} {b}");
        }
    }
}

#[test]
fn routes_agree_on_tight_binding() {
    let layout = SubsystemLayout::new(8, 4, 9).unwrap();
    let st = LatticeState::infinite(&LatticeModel::tight_binding(), layout).unwrap();
    assert_eq!(st.route(), Route::U1);
    let nambu = st.clone().with_route(Route::Nambu).unwrap();
    let re = st.clone().with_route(Route::NambuRealPart).unwrap();
    for gs in [vec![0.3, 0.7], vec![PI / 2.0, PI / 2.0], vec![1.0, -2.5, 2.9]] {
        let a = st.log_charged_moment(&gs).unwrap().exp();
        let b = nambu.log_charged_moment(&gs).unwrap().exp();
        assert!((a - b).norm() < 1e-10, "{gs:?}: {a} vs {b}");
        let c = re.log_charged_moment(&gs).unwrap();
        assert!((c.re - a.ln().re).abs() < 1e-10);
    }
    let ising = LatticeState::infinite(&LatticeModel::critical_ising(), layout).unwrap();
    assert!(ising.with_route(Route::U1).is_err());
}

#[test]
fn flux_layout_mismatch_is_rejected() {
    let layout = SubsystemLayout::new(2, 1, 2).unwrap();
    let g = infinite_chain_correlations(&LatticeModel::tight_binding(), 4).unwrap();
    assert!(flux_correlation_matrix(&g, 0.1, &layout).is_err());
}

#[test]
fn rescaling_examples() {
    let conv = RescalingConvention::Plain;
    assert_eq!(ising_gamma_rescaling(0.0, conv).unwrap(), 0.0);
    let r = ising_gamma_rescaling(0.2, conv).unwrap();
    assert!((r - 0.1f64.tan().atanh()).abs() < 1e-15 && (r - 0.10067).abs() < 1e-5);
    let p = ising_gamma_rescaling(0.2, RescalingConvention::OverPi).unwrap();
    assert!((p * PI - r).abs() < 1e-15);
    assert!(ising_gamma_rescaling(PI / 2.0, conv).is_err());
    assert!(ising_gamma_rescaling(2.0, conv).is_err());
    // square of the rescaled flux: (γ/2)²(1 + γ²/3 + O(γ⁴))
    for gm in [0.02, 0.05] {
        let r: f64 = ising_gamma_rescaling(gm, conv).unwrap();
        let quartic = (r * r / (gm * gm / 4.0) - 1.0) / (gm * gm);
        assert!((quartic - 1.0 / 3.0).abs() < 0.01 * (1.0 + gm * gm * 100.0));
    }
}

#[test]
fn open_chain_zero_mode_is_reported() {
    // odd tight-binding chain has an exact zero mode
    assert!(matches!(
        finite_chain_correlations(&LatticeModel::tight_binding(), 7),
        Err(opens_core::Error::Domain(_))
    ));
    let _ = Complex64::new(0.0, 0.0);
}
