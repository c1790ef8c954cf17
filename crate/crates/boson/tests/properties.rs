use opens_boson::*;
use opens_core::Geometry;
use proptest::prelude::*;

fn geometry() -> impl Strategy<Value = Geometry> {
    (0.5f64..100.0, 0.5f64..500.0, 20.0f64..5000.0, 1e-4f64..1e-2, 1usize..=16)
        .prop_map(|(l, d, ell2, frac, n)| Geometry::from_lengths(l, d, ell2, frac * ell2, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn circulant_and_covariance_positive(g in geometry(), seed in proptest::collection::vec(-3.0f64..3.0, 16)) {
        let m = build_m_boson(&g).unwrap();
        let row = m.circulant().first_row();
        let n = g.n();
        for j in 1..n {
            prop_assert_eq!(row[j], row[n - j]);
        }
        let gam = &seed[..n];
        prop_assert!(m.quadratic_form(gam).unwrap() >= -1e-8);
        let p = BosonParams::new(1.0).unwrap();
        prop_assert!(charged_moments_ratio(&g, &p, gam).unwrap() <= 1.0);
    }

    #[test]
    fn mie_correction_non_positive(g in geometry(), n in 2usize..=8) {
        let r = renyi_ratio_and_mie(&g, n).unwrap();
        prop_assert!(r.correction <= 0.0);
        prop_assert!(r.ratio > 0.0 && r.ratio >= 1.0);
    }

    #[test]
    fn zero_flux_is_exactly_one(g in geometry()) {
        let p = BosonParams::new(2.5).unwrap();
        prop_assert_eq!(charged_moments_ratio(&g, &p, &vec![0.0; g.n()]).unwrap(), 1.0);
    }

    #[test]
    fn closed_cn_ignores_l(g in geometry(), l2 in 0.01f64..1.0) {
        let other = g.with_l(l2 * g.l()).unwrap();
        prop_assert_eq!(cn_closed_form(&g).unwrap().to_bits(), cn_closed_form(&other).unwrap().to_bits());
    }
}
