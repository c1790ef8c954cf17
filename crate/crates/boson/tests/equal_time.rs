use std::f64::consts::PI;

use num_complex::Complex64;
use opens_boson::*;
use opens_core::{Geometry, SymmetricCirculant};

fn geom(l: f64, a: f64, b: f64, eps: f64, n: usize) -> Geometry {
    Geometry::new(l, a, b, eps, n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Entries evaluated straight from the printed expressions in complex arithmetic.
fn printed_entries(g: &Geometry) -> Vec<f64> {
    let (l, a, b, eps) = (g.l(), g.a(), g.b(), g.eps());
    let n = g.n();
    let nf = n as f64;
    let alpha = (a / (a - l)).powf(1.0 / nf);
    let beta = (b / (b - l)).powf(1.0 / nf);
    let areg = -2.0 * eps * l / (a * a * nf - a * l * nf) * alpha;
    let breg = -2.0 * eps * l / (b * b * nf - b * l * nf) * beta;
    let mut row = vec![-2.0 * (areg * breg / ((alpha - beta) * (alpha - beta))).abs().ln()];
    for j in 1..n {
        let th = 2.0 * PI * j as f64 / nf;
        let s2 = (PI * j as f64 / nf).sin().powi(2);
        row.push(-2.0 * (4.0 * alpha * beta * s2 / (alpha * alpha + beta * beta - 2.0 * alpha * beta * th.cos())).ln());
    }
    row
}

#[test]
fn branch_points_single_copy_are_real() {
    let g = geom(10.0, 30.0, 50.0, 0.1, 1);
    let p = branch_points(&g);
    assert!((p[0].0 - Complex64::new(1.5, 0.0)).norm() < 1e-15);
    assert!((p[0].1 - Complex64::new(1.25, 0.0)).norm() < 1e-15);
}

#[test]
fn branch_points_square_root() {
    let g = geom(5.0, 10.0, 50.0, 0.1, 2);
    let p = branch_points(&g);
    assert!((p[0].0 - Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-14);
    assert!((p[1].0 + Complex64::new(2f64.sqrt(), 0.0)).norm() < 1e-14);
}

#[test]
fn branch_points_match_direct_map() {
    let g = geom(10.0, 30.0, 50.0, 0.1, 4);
    for (k, (ak, bk)) in branch_points(&g).into_iter().enumerate() {
        let ph = Complex64::new(0.0, 2.0 * PI * k as f64 / 4.0).exp();
        let ea = Complex64::new(30.0 / 20.0, 0.0).powf(0.25) * ph;
        let eb = Complex64::new(50.0 / 40.0, 0.0).powf(0.25) * ph;
        assert!((ak - ea).norm() < 1e-14 && (bk - eb).norm() < 1e-14);
    }
}

#[test]
fn single_copy_entry() {
    let g = geom(100.0, 600.0, 1600.0, 0.5, 1);
    let m = build_m_boson(&g).unwrap();
    assert!(rel(m.entry(0, 0), printed_entries(&g)[0]) < 1e-12);
    assert!(rel(m.entry(0, 0), 4.0 * 1000f64.ln()) < 1e-13);
}

#[test]
fn entries_match_printed_formulas() {
    for n in [2, 3, 4, 7] {
        let g = geom(10.0, 30.0, 50.0, 0.01, n);
        let m = build_m_boson(&g).unwrap();
        for (j, e) in printed_entries(&g).into_iter().enumerate() {
            assert!(rel(m.entry(0, j), e) < 1e-10, "n={n} j={j}: {} vs {e}", m.entry(0, j));
        }
    }
}

#[test]
fn dense_expansion_is_circulant() {
    let g = geom(3.0, 7.0, 40.0, 0.05, 6);
    let m = build_m_boson(&g).unwrap();
    let d = m.circulant().to_dense();
    for j in 0..6 {
        for k in 0..6 {
            assert_eq!(d[(j, k)], d[((j + 1) % 6, (k + 1) % 6)]);
            assert_eq!(d[(j, k)], d[(k, j)]);
        }
    }
}

#[test]
fn coincident_limit_slope() {
    // slope of each entry in log L is 4/n
    for n in [2, 3, 4] {
        let lo = coincident_limit_row(1e6, 1.0, n).unwrap();
        let hi = coincident_limit_row(1e12, 1.0, n).unwrap();
        for j in 0..n {
            let slope = (hi[j] - lo[j]) / 1e6f64.ln();
            assert!((slope - 4.0 / n as f64).abs() < 1e-3 * 4.0 / n as f64, "n={n} j={j} slope={slope}");
        }
    }
    // at n = 2, L = 100, ε = 1 the L-dependent part is 2 log 100
    assert!((2.0 * 100f64.ln() - 9.2103).abs() < 1e-4);
}

#[test]
fn charged_moments_basics() {
    let p = BosonParams::new(1.3).unwrap();
    let g = geom(10.0, 30.0, 150.0, 0.1, 2);
    assert_eq!(charged_moments_ratio(&g, &p, &[0.0, 0.0]).unwrap(), 1.0);

    let g1 = g.with_n(1).unwrap();
    let m11 = build_m_boson(&g1).unwrap().entry(0, 0);
    let r = charged_moments_ratio(&g1, &p, &[0.7]).unwrap();
    assert!(rel(r, (-1.3 * 0.49 * m11 / (8.0 * PI * PI)).exp()) < 1e-14);

    let m = build_m_boson(&g).unwrap();
    let anti = charged_moments_ratio(&g, &p, &[0.4, -0.4]).unwrap().ln();
    let same = charged_moments_ratio(&g, &p, &[0.4, 0.4]).unwrap().ln();
    let (d, o) = (m.entry(0, 0), m.entry(0, 1));
    assert!(rel(anti / same, (d - o) / (d + o)) < 1e-12);
}

#[test]
fn cn_closed_form_value_and_l_independence() {
    let g = geom(10.0, 20.0, 220.0, 0.5, 2);
    let c = cn_closed_form(&g).unwrap();
    assert!((c - 0.09437).abs() < 5e-6, "{c}");
    let g2 = geom(3.0, 20.0, 220.0, 0.5, 2);
    assert_eq!(c.to_bits(), cn_closed_form(&g2).unwrap().to_bits());
    assert!(cn_closed_form(&geom(1.0, 2.0, 2.5, 0.5, 2)).is_err());
}

#[test]
fn cn_numeric_converges_in_exact_difference_mode() {
    let ell2 = 100.0;
    for n in [2, 3, 5] {
        let mut last = f64::INFINITY;
        for ratio in [1e-2, 1e-3, 1e-4] {
            let g = Geometry::from_lengths(10.0, 10.0, ell2, ratio * ell2, n).unwrap();
            let num = cn_numeric(&g, Regularization::ExactDifference).unwrap();
            let err = rel(num, cn_closed_form(&g).unwrap());
            assert!(err < last, "n={n}: error {err} did not shrink from {last}");
            last = err;
        }
        assert!(last < 1e-3);
        // leading-order regularization reproduces the closed form exactly
        let g = Geometry::from_lengths(10.0, 10.0, ell2, 1e-2, n).unwrap();
        assert!(rel(cn_numeric(&g, Regularization::LeadingOrder).unwrap(), cn_closed_form(&g).unwrap()) < 1e-12);
    }
}

#[test]
fn cn_numeric_nearly_l_independent() {
    let a = geom(10.0, 40.0, 140.0, 0.01, 3);
    let b = geom(25.0, 40.0, 140.0, 0.01, 3);
    let ca = cn_numeric(&a, Regularization::ExactDifference).unwrap();
    let cb = cn_numeric(&b, Regularization::ExactDifference).unwrap();
    assert!(rel(ca, cb) < 1e-3);
}

#[test]
fn renyi_trivial_diagonal() {
    let m = SymmetricCirculant::new(vec![3.0, 0.0, 0.0]).unwrap();
    let r = renyi_ratio_and_mie_from(&m, 3.0).unwrap();
    assert!((r.ratio - 1.0).abs() < 1e-15 && r.correction.abs() < 1e-15);
}

#[test]
fn renyi_matches_determinant_pipeline() {
    let g = Geometry::from_lengths(100.0, 500.0, 1000.0, 0.5, 2).unwrap();
    let m = build_m_boson(&g).unwrap();
    let m11 = build_m_boson(&g.with_n(1).unwrap()).unwrap().entry(0, 0);
    let direct = -0.5 * (m.circulant().determinant().unwrap() / (m11 * m11)).ln() * (-1.0);
    let r = renyi_ratio_and_mie(&g, 2).unwrap();
    assert!(r.correction < 0.0);
    assert!(rel(r.correction, direct) < 1e-6, "{} vs {direct}", r.correction);
    let generic = renyi_ratio_and_mie_from(m.circulant(), m11).unwrap();
    assert!(rel(r.correction, generic.correction) < 1e-6);
}

#[test]
fn renyi_correction_shrinks_with_distance() {
    let mut last = f64::INFINITY;
    for d in [10.0, 50.0, 200.0, 1000.0, 5000.0] {
        let g = Geometry::from_lengths(100.0, d, 1000.0, 0.5, 1).unwrap();
        let c = renyi_ratio_and_mie(&g, 3).unwrap().correction.abs();
        assert!(c < last);
        last = c;
    }
}

#[test]
fn renyi_entropy_base_value() {
    let g = geom(100.0, 200.0, 300.0, 1.0, 1);
    assert!(rel(renyi_entropy_base(&g, 2), 0.25 * 100f64.ln()) < 1e-15);
}

#[test]
fn saddle_prefactor_as_printed() {
    let p = BosonParams::new(2.0).unwrap();
    let g = geom(10.0, 20.0, 120.0, 0.5, 2);
    let m = build_m_boson(&g).unwrap();
    let cn = cn_closed_form(&g).unwrap();
    let expect = (-2.0 * PI * PI * 0.3 * 0.3 * cn / 2.0).exp() / m.circulant().determinant().unwrap().sqrt()
        * (8.0 * PI.powi(3) / 2.0);
    assert!(rel(charged_moment_saddle(&g, &p, 0.3).unwrap(), expect) < 1e-12);
}
