use nalgebra::DMatrix;
use opens_core::{quadratic_form_cn_real, SymmetricCirculant};
use proptest::prelude::*;

fn palindromic_row() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=16).prop_flat_map(|n| {
        (proptest::collection::vec(-2.0..2.0f64, n / 2), 0.5..5.0f64).prop_map(move |(half, extra)| {
            let mut row = vec![0.0; n];
            for j in 1..n {
                let k = j.min(n - j) - 1;
                row[j] = half[k];
            }
            row[0] = row[1..].iter().map(|v: &f64| v.abs()).sum::<f64>() + extra;
            row
        })
    })
}

proptest! {
    #[test]
    fn determinant_matches_dense(row in palindromic_row()) {
        let c = SymmetricCirculant::new(row).unwrap();
        let dense = c.to_dense().determinant();
        let circ = c.determinant().unwrap();
        prop_assert!((circ - dense).abs() <= 1e-10 * dense.abs(), "{circ} vs {dense}");
    }

    #[test]
    fn inverse_row_sum_is_column_independent(row in palindromic_row()) {
        let c = SymmetricCirculant::new(row).unwrap();
        let inv = c.to_dense().try_inverse().unwrap();
        let expect = c.inverse_row_sum().unwrap();
        for l in 0..c.n() {
            let s: f64 = inv.column(l).iter().sum();
            prop_assert!((s - expect).abs() <= 1e-10 * expect.abs());
        }
    }

    #[test]
    fn cn_is_n_times_row_sum(row in palindromic_row()) {
        let c = SymmetricCirculant::new(row).unwrap();
        let cn = quadratic_form_cn_real(&c.to_dense()).unwrap();
        let expect = c.n() as f64 * c.inverse_row_sum().unwrap();
        prop_assert!((cn - expect).abs() <= 1e-10 * expect.abs());
    }
}

#[test]
fn spd_cn_matches_explicit_inverse() {
    let b = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, -0.3, 0.4, 1.5, 0.1, -0.2, 0.3, 0.9]);
    let m = &b * b.transpose() + DMatrix::identity(3, 3);
    let inv = m.clone().try_inverse().unwrap();
    let brute: f64 = inv.iter().sum();
    assert!((quadratic_form_cn_real(&m).unwrap() - brute).abs() < 1e-10 * brute);
}
