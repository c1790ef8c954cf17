use nalgebra::{Matrix3, Vector3};
use opens_core::quad::{integrate, integrate_2d, QuadOptions};
use opens_core::Geometry;
use opens_operator::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn square_integral(f: impl Fn(f64) -> f64, l: f64, eps: f64) -> f64 {
    let opts = QuadOptions::new(1e-11, 1e-11);
    let inner = |x: f64| {
        let mut p = vec![0.0];
        for s in [-10.0 * eps, -eps, 0.0, eps, 10.0 * eps] {
            let y = x + s;
            if y > 0.0 && y < l {
                p.push(y);
            }
        }
        p.push(l);
        p
    };
    integrate_2d(|x, y| if x == y { 0.0 } else { f(x - y) }, &[0.0, l], inner, &opts).unwrap().value
}

#[test]
fn replica_map_single_copy() {
    let g = Geometry::new(2.0, 3.0, 7.0, 0.1, 1).unwrap();
    let (w, dw) = replica_map(5.0, 0, &g).unwrap();
    assert!((w.re - 5.0 / 3.0).abs() < 1e-15 && w.im.abs() < 1e-15);
    assert!((dw.re + 2.0 / 9.0).abs() < 1e-15);
    assert!(replica_map(1.0, 0, &g).is_err());
}

#[test]
fn replica_map_branches_and_derivative() {
    let g = Geometry::new(2.0, 3.0, 7.0, 0.1, 5).unwrap();
    let r0 = replica_map(4.0, 0, &g).unwrap().0.norm();
    for k in 0..5 {
        let (w, dw) = replica_map(4.0, k, &g).unwrap();
        assert!((w.norm() - r0).abs() < 1e-14);
        let h = 1e-5;
        let fd = (replica_map(4.0 + h, k, &g).unwrap().0 - replica_map(4.0 - h, k, &g).unwrap().0) / (2.0 * h);
        assert!((fd - dw).norm() < 1e-8);
    }
    assert!(replica_map(-3.0, 1, &g).is_ok());
}

#[test]
fn flat_special_cases() {
    let f = flat_interval_integral(&OperatorSpec::scalar(0.5).unwrap(), 100.0, 0.1).unwrap();
    assert!((f.total - 1181.55).abs() < 0.01, "{}", f.total);
    let f = flat_interval_integral(&OperatorSpec::scalar(1.0).unwrap(), 100.0, 0.1).unwrap();
    assert!((f.total - 3125.78).abs() < 0.01, "{}", f.total);
    let f = flat_interval_integral(&OperatorSpec::scalar(0.25).unwrap(), 1.0, 1e-3).unwrap();
    assert!((f.universal - 8.0 / 3.0).abs() < 1e-14);
}

#[test]
fn quarter_universal_from_extrapolated_quadrature() {
    // I(ε) = U + c ε^{1/2} + O(ε^{3/2}); Richardson on ε and ε/4 removes the c term
    let h: f64 = 0.25;
    let i = |eps: f64| square_integral(|u| (u * u + eps * eps).powf(-h), 1.0, eps);
    let (e1, e2) = (1e-6, 0.25e-6);
    let (i1, i2) = (i(e1), i(e2));
    let r = (e2 / e1).sqrt();
    let extrapolated = (i2 - r * i1) / (1.0 - r);
    assert!(rel(extrapolated, 8.0 / 3.0) < 1e-4, "{extrapolated}");
}

#[test]
fn unit_weight_closed_form_matches_quadrature() {
    let spec = OperatorSpec::scalar(1.0).unwrap();
    for eps in [1e-3, 1e-4] {
        let num = square_integral(|u| 1.0 / (u * u + eps * eps), 10.0, eps);
        let closed = flat_interval_integral(&spec, 10.0, eps).unwrap().total;
        assert!(rel(closed, num) < 1e-4);
        assert!(rel(flat_interval_exact(&spec, 10.0, eps).unwrap(), num) < 1e-9);
    }
}

#[test]
fn half_weight_closed_form_is_a_hard_cutoff() {
    let spec = OperatorSpec::scalar(0.5).unwrap();
    let (l, eps) = (10.0, 1e-4);
    let closed = flat_interval_integral(&spec, l, eps).unwrap().total;
    let cut = 2.0 * integrate(|u| (l - u) / u, &[eps, l], &QuadOptions::new(1e-12, 1e-12)).unwrap().value;
    assert!(rel(closed, cut) < 1e-4);
    // point splitting at ε equals the closed form at ε/2
    let split = square_integral(|u| 1.0 / (u * u + eps * eps).sqrt(), l, eps);
    assert!(rel(flat_interval_exact(&spec, l, eps).unwrap(), split) < 1e-9);
    let shifted = flat_interval_integral(&spec, l, eps / 2.0).unwrap().total;
    assert!(rel(split, shifted) < 1e-4);
}

#[test]
fn vector_flat_integral_and_universal_term() {
    let h = 0.25;
    let spec = OperatorSpec::vector(h).unwrap();
    let l = 2.0;
    let i = |eps: f64| flat_interval_exact(&spec, l, eps).unwrap();
    // cross-check the 1D reduction against the double integral, with u = t² on each side
    let eps = 1e-2;
    let k = |u: f64| (eps * eps - u * u) / (u * u + eps * eps).powi(2) * u.abs().powf(-2.0 * h);
    let opts = QuadOptions::new(1e-10, 1e-10);
    let half = integrate_2d(
        |_x, t| 2.0 * t * k(t * t),
        &[0.0, l],
        |x| vec![0.0, (10.0 * eps).min(x).sqrt(), x.sqrt()],
        &opts,
    )
    .unwrap()
    .value;
    assert!(rel(i(eps), 2.0 * half) < 1e-6, "{} vs {}", i(eps), 2.0 * half);
    // I(ε) = A ε^{−1−2h} + B ε^{−2h} + U + O(ε²)
    let es: [f64; 3] = [1e-3, 2e-3, 4e-3];
    let m = Matrix3::from_fn(|r, c| [es[r].powf(-1.0 - 2.0 * h), es[r].powf(-2.0 * h), 1.0][c]);
    let rhs = Vector3::from_fn(|r, _| i(es[r]));
    let sol = m.lu().solve(&rhs).unwrap();
    let u = vector_universal_continued(h, l);
    assert!(rel(sol[2], u) < 1e-3, "{} vs {u}", sol[2]);
    assert!(rel(vector_universal_printed(h, l), u) > 0.5);
    let f = flat_interval_integral(&spec, l, 1e-3).unwrap();
    assert!(rel(f.divergent + f.universal, f.total) < 1e-15);
}

#[test]
fn vector_zero_weight_is_logarithmic() {
    let spec = OperatorSpec::vector(0.0).unwrap();
    let f = flat_interval_integral(&spec, 50.0, 0.2).unwrap();
    assert!(rel(f.total, ((2500.0f64 + 0.04) / 0.04).ln()) < 1e-14);
}

#[test]
fn spec_bounds() {
    assert!(OperatorSpec::scalar(1.5).is_err());
    assert!(OperatorSpec::scalar(0.0).is_err());
    assert!(OperatorSpec::vector(0.5).is_err());
    assert!(OperatorSpec::vector(-0.1).is_err());
    assert!(OperatorSpec::boson_charge(0.0).is_err());
    assert!(OperatorSpec::vector(0.0).is_ok());
}

#[test]
fn convergence_predicates() {
    let s = |h| OperatorSpec::scalar(h).unwrap();
    for k in 1..10 {
        assert!(interaction_convergence_check(&s(0.5), k).unwrap());
    }
    assert!(!interaction_convergence_check(&s(0.7), 4).unwrap());
    assert!(interaction_convergence_check(&OperatorSpec::vector(0.1).unwrap(), 4).unwrap());
    assert!(!interaction_convergence_check(&OperatorSpec::vector(0.2).unwrap(), 4).unwrap());
    assert!(interaction_convergence_check(&s(0.5), 0).is_err());
    assert!(is_relevant_vertex(&s(0.45), 4) && !is_relevant_vertex(&s(0.5), 4));
}
