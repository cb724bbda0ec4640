use dsbs_core::binary::*;
use dsbs_core::mre::*;
use proptest::prelude::*;

fn rho_strategy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.1), Just(0.5), Just(0.9), 0.01f64..0.99]
}

#[test]
fn exact_anchors() {
    for rho in [0.1, 0.5, 0.9] {
        let params = DsbsParams::new(rho).unwrap();
        assert!(dd2_value(0.5, 0.5, &params).abs() < 1e-12);
        assert!((dd2_value(0.0, 0.0, &params) - (2.0 - (1.0 + rho).log2())).abs() < 1e-12);
        assert!((dd2_value(0.0, 1.0, &params) - (2.0 - (1.0 - rho).log2())).abs() < 1e-12);
        assert!((p_star(0.5, 0.5, &params).unwrap() - (1.0 + rho) / 4.0).abs() < 1e-12);
    }
}

#[test]
fn rejects_out_of_range() {
    assert!(DsbsParams::new(0.0).is_err());
    assert!(DsbsParams::new(1.0).is_err());
    assert!(DsbsParams::new(1e-7).is_err());
    let params = DsbsParams::new(0.5).unwrap();
    assert!(p_star(1.2, 0.3, &params).is_err());
    assert!(d2ab(0.3, 0.4, 0.5, &params).is_err());
    assert!(d2_inv(1.5).is_err());
    assert!(bdeconv(0.3, 0.5).is_err());
}

#[test]
fn region_sample_shape() {
    let params = DsbsParams::new(0.9).unwrap();
    let pts = region_sample(&params, 11);
    assert_eq!(pts.len(), 121);
    // (a, b) = (1/2, 1/2) sits at the centre with all three coordinates zero
    let c = pts[5 * 11 + 5];
    assert!(c.x.abs() < 1e-15 && c.y.abs() < 1e-15 && c.z.abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn d2_inverse_round_trip(a in 0.0f64..=0.5) {
        let back = d2_inv(d2(a)).unwrap();
        // d2 is flat near 1/2, so compare in the image
        prop_assert!((d2(back) - d2(a)).abs() < 1e-14);
        prop_assert!((h2(a) + d2(a) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn entropy_symmetry(a in 0.0f64..=1.0) {
        prop_assert!((h2(a) - h2(1.0 - a)).abs() < 1e-14);
        prop_assert!((d2(a) - d2(1.0 - a)).abs() < 1e-14);
    }

    #[test]
    fn convolution_inverts(x in 0.0f64..1.0, y in 0.0f64..0.49) {
        let z = bconv(x, y);
        prop_assert!((bdeconv(z, y).unwrap() - x).abs() < 1e-12);
    }

    #[test]
    fn p_star_feasible_and_optimal(a in 0.0f64..=1.0, b in 0.0f64..=1.0, rho in rho_strategy()) {
        let params = DsbsParams::new(rho).unwrap();
        let p = p_star(a, b, &params).unwrap();
        let (lo, hi) = feasible_interval(a, b);
        prop_assert!(p >= lo - 1e-12 && p <= hi + 1e-12);
        let best = d2ab(a, b, p, &params).unwrap();
        for k in 0..=20 {
            let q = lo + (hi - lo) * k as f64 / 20.0;
            prop_assert!(best <= d2ab(a, b, q, &params).unwrap() + 1e-12);
        }
    }

    #[test]
    fn dd2_symmetries(a in 0.0f64..=1.0, b in 0.0f64..=1.0, rho in rho_strategy()) {
        let params = DsbsParams::new(rho).unwrap();
        let v = dd2_value(a, b, &params);
        prop_assert!((v - dd2_value(b, a, &params)).abs() < 1e-12);
        prop_assert!((v - dd2_value(1.0 - a, 1.0 - b, &params)).abs() < 1e-12);
        prop_assert!(v >= d2(a).max(d2(b)) - 1e-12);
        let r = dd2(a, b, &params).unwrap();
        prop_assert!((r.coupling.marginal_x1() - a).abs() < 1e-12);
        prop_assert!((r.coupling.marginal_y1() - b).abs() < 1e-12);
        prop_assert!((r.value - kl_joint(&r.coupling, &params)).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_oracle(a in 0.0f64..=1.0, b in 0.0f64..=1.0, rho in rho_strategy()) {
        let params = DsbsParams::new(rho).unwrap();
        let o = dd2_oracle_argmin(a, b, &params, 1000);
        prop_assert!((p_star(a, b, &params).unwrap() - o.arg).abs() <= 1e-9);
        prop_assert!((dd2_value(a, b, &params) - o.value).abs() <= 1e-9);
    }

    #[test]
    fn coupling_kl_nonnegative(w in prop::array::uniform4(0.0f64..1.0), rho in rho_strategy()) {
        prop_assume!(w.iter().sum::<f64>() > 1e-6);
        let params = DsbsParams::new(rho).unwrap();
        let q = Coupling2x2::from_weights(w[0], w[1], w[2], w[3]).unwrap();
        let d = kl_joint(&q, &params);
        prop_assert!(d >= 0.0);
        // the DD2 value at the coupling's marginals is a lower bound
        prop_assert!(dd2_value(q.marginal_x1(), q.marginal_y1(), &params) <= d + 1e-12);
        prop_assert!((kl_joint(&q.transpose(), &params) - d).abs() < 1e-12);
    }
}
