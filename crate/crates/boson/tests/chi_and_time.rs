use std::f64::consts::PI;

use opens_boson::*;
use opens_core::quad::{integrate, QuadOptions};
use opens_core::Geometry;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn printed_approx(l: f64, a: f64, b: f64, eps: f64) -> f64 {
    let lam = ((b - a) / (2.0 * eps)).ln();
    1.0 / lam - (2.0 * a * b - l * (a + b)) * (a * (b - l) / (b * (a - l))).ln() / (2.0 * l * (b - a) * lam)
}

#[test]
fn approx_printed_matches_direct_formula() {
    let g = Geometry::new(100.0, 600.0, 1600.0, 0.5, 1).unwrap();
    let direct = printed_approx(100.0, 600.0, 1600.0, 0.5);
    assert!(rel(holevo_chi_approx_printed(&g).unwrap(), direct) < 1e-10);
    assert!(rel(holevo_chi_approx(&g).unwrap(), -0.5 * direct) < 1e-10);
}

#[test]
fn approx_vanishes_as_l_shrinks() {
    let (a, b, eps) = (600.0_f64, 1600.0_f64, 0.5_f64);
    let lam = ((b - a) / (2.0 * eps)).ln();
    let g = Geometry::new(1e-6 * a, a, b, eps, 1).unwrap();
    assert!(holevo_chi_approx(&g).unwrap() * lam < 1e-6);
    assert!(holevo_chi_approx_printed(&g).unwrap().abs() * lam < 1e-6);
}

#[test]
fn chi_matches_approximation_far_apart() {
    for ell2 in [1e3, 1e4, 1e5] {
        let g = Geometry::from_lengths(100.0, 500.0, ell2, 0.5, 1).unwrap();
        let chi = holevo_chi(&g, 8).unwrap();
        let approx = holevo_chi_approx(&g).unwrap();
        assert!(chi.value > 0.0);
        assert!(rel(chi.value, approx) < 0.05, "ℓ₂={ell2}: {} vs {approx}", chi.value);
    }
}

#[test]
fn chi_agreement_improves_with_distance() {
    let mut last = f64::INFINITY;
    for d in [10.0, 100.0, 1000.0] {
        let g = Geometry::from_lengths(10.0, d, 1000.0, 0.5, 1).unwrap();
        let e = rel(holevo_chi(&g, 8).unwrap().value, holevo_chi_approx(&g).unwrap());
        assert!(e < last);
        last = e;
    }
}

#[test]
fn chi_rises_then_decreases() {
    let ell2: Vec<f64> = (0..=16).map(|i| 10f64 * 10f64.powf(i as f64 / 4.0)).collect();
    let chi: Vec<f64> =
        ell2.iter().map(|&l2| holevo_chi(&Geometry::from_lengths(10.0, 10.0, l2, 0.5, 1).unwrap(), 8).unwrap().value).collect();
    let peak = chi.iter().enumerate().fold(0, |m, (i, v)| if *v > chi[m] { i } else { m });
    assert!(peak > 0 && peak < chi.len() - 1, "{chi:?}");
    assert!(chi[..=peak].windows(2).all(|w| w[1] > w[0]));
    assert!(chi[peak..].windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn chi_needs_enough_samples() {
    let g = Geometry::from_lengths(10.0, 10.0, 100.0, 0.5, 1).unwrap();
    assert!(holevo_chi(&g, 3).is_err());
}

#[test]
fn charge_distribution_is_normalized_gaussian() {
    let g = Geometry::from_lengths(10.0, 10.0, 100.0, 0.5, 1).unwrap();
    let p = BosonParams::new(0.8).unwrap();
    let dist = ChargeDistribution::new(&g, &p).unwrap();
    assert_eq!(dist.density(0.37), dist.density(-0.37));
    assert_eq!(charge_distribution(&g, &p, 0.37).unwrap(), dist.density(0.37));
    let s = dist.variance().sqrt();
    let opts = QuadOptions::new(1e-13, 1e-12);
    let norm = integrate(|q| dist.density(q), &[-40.0 * s, 0.0, 40.0 * s], &opts).unwrap().value;
    assert!((norm - 1.0).abs() < 1e-8);

    // independent Fourier inversion of the single-copy generating function
    let m11 = build_m_boson(&g).unwrap().entry(0, 0);
    let phi = |x: f64| (-0.8 * x * x * m11 / (8.0 * PI * PI)).exp();
    let cut = 40.0 / s;
    for q in [0.0, 0.5 * s, 2.0 * s] {
        let p_num = integrate(|x| phi(x) * (q * x).cos(), &[-cut, 0.0, cut], &opts).unwrap().value / (2.0 * PI);
        assert!(rel(p_num, dist.density(q)) < 1e-8);
    }
    let m2 = integrate(|q| q * q * dist.density(q), &[-40.0 * s, 0.0, 40.0 * s], &opts).unwrap().value;
    assert!(rel(m2, 0.8 * m11 / (4.0 * PI * PI)) < 1e-8);
    assert!(rel(charge_variance(&g, &p).unwrap(), m2) < 1e-8);
    assert!(rel(dist.second_moment_printed(), m11 / (2.0 * PI).sqrt()) < 1e-12);
}

fn time_geometry() -> Geometry {
    Geometry::new(10.0, 20.0, 120.0, 0.5, 1).unwrap()
}

#[test]
fn time_matrix_layout() {
    let g = time_geometry().with_n(3).unwrap();
    let m = build_m_time(&g, &TimeParams::new(50.0, 1e-3).unwrap()).unwrap();
    let big = m.block_matrix();
    assert_eq!(big.shape(), (6, 6));
    for j in 0..3 {
        for k in 0..3 {
            assert_eq!(big[(j, k + 3)].norm(), 0.0);
            assert!((big[(j, k)] - big[((j + 1) % 3, (k + 1) % 3)]).norm() < 1e-14);
            assert!((m.effective()[(j, k)] - big[(j, k)] - big[(j + 3, k + 3)]).norm() < 1e-14);
        }
    }
}

#[test]
fn time_zero_reproduces_equal_time() {
    let g = time_geometry();
    let tp = TimeParams::new(0.0, 1e-8).unwrap();
    for n in 2..=5 {
        let m = build_m_time(&g.with_n(n).unwrap(), &tp).unwrap();
        let eq = renyi_ratio_and_mie(&g, n).unwrap();
        assert!(rel(m.log_ratio().re, eq.log_ratio) < 1e-3);
        let em = build_m_boson(&g.with_n(n).unwrap()).unwrap();
        assert!(rel(m.effective()[(0, 1)].re, em.entry(0, 1)) < 1e-3);
    }
    assert!(rel(time_chi(&g, &tp, 8).unwrap().value, holevo_chi(&g, 8).unwrap().value) < 1e-3);
}

#[test]
fn single_copy_diagonal_is_time_independent() {
    let g = time_geometry();
    for t in [0.0, 15.0, 70.0, 1e4] {
        let m = build_m_time(&g, &TimeParams::new(t, 1e-3).unwrap()).unwrap();
        let d = m.single_copy_diagonal();
        assert!(rel(d.re, 4.0 * 100f64.ln()) < 1e-12 && d.im.abs() < 1e-12);
    }
}

#[test]
fn large_time_decay() {
    let g = time_geometry();
    let ts = [1e3, 1e4, 1e5];
    let chi: Vec<TimeChi> = ts.iter().map(|&t| time_chi(&g, &TimeParams::new(t, 1e-3).unwrap(), 8).unwrap()).collect();
    let slope = (chi[2].value / chi[0].value).ln() / (ts[2] / ts[0]).ln();
    assert!((slope + 4.0).abs() < 0.05, "slope {slope}");
    let asym = |t: f64| 100f64.powi(2) * 10f64.powi(2) / (24.0 * 100f64.ln() * t.powi(4));
    assert!(rel(chi[2].value, asym(1e5)) < 1e-3);
    assert!(chi.iter().all(|c| c.imag_residual.abs() < 1e-3 * c.value));
}
