use dsbs_core::hulls::*;
use proptest::prelude::*;

#[test]
fn convex_input_is_fixed() {
    let f = GridFn::sample_2d(21, |x, y| (x - 0.3).powi(2) + 2.0 * (y - 0.6).powi(2) + x * y).unwrap();
    let env = lower_convex_envelope(&f);
    assert!(env.max_abs_diff(&f) < 1e-12);
    let g = GridFn::sample_1d(51, |x| (3.0 * x).exp()).unwrap();
    assert_eq!(lower_convex_envelope(&g), g);
}

#[test]
fn plane_is_fixed() {
    let f = GridFn::sample_2d(17, |x, y| 0.5 - 2.0 * x + 3.0 * y).unwrap();
    assert!(lower_convex_envelope(&f).max_abs_diff(&f) < 1e-12);
    assert!(upper_concave_envelope(&f).max_abs_diff(&f) < 1e-12);
}

#[test]
fn bump_matches_biconjugate() {
    let n = 15;
    let f = GridFn::sample_2d(n, |x, y| {
        x * x + y * y - 0.3 * (-60.0 * ((x - 0.5).powi(2) + (y - 0.5).powi(2))).exp()
    })
    .unwrap();
    let env = lower_convex_envelope(&f);
    let bi = biconjugate_2d(&f, 4.0, 401);
    for (e, b) in env.values().iter().zip(&bi) {
        // the slope-lattice biconjugate is a lower bound within the slope spacing
        assert!(*b <= e + 1e-12);
        assert!(e - b < 0.04, "{e} vs {b}");
    }
    assert!(check_midpoint_convex(&env, 1e-12, PairMode::Full).passed);
    assert!(!check_midpoint_convex(&f, 1e-12, PairMode::Full).passed);
}

#[test]
fn one_d_matches_exact_biconjugate() {
    let f = GridFn::sample_1d(41, |x| (12.0 * x).sin() + x).unwrap();
    let env = lower_convex_envelope(&f);
    let bi = biconjugate_1d_exact(&f);
    for (e, b) in env.values().iter().zip(&bi) {
        assert!((e - b).abs() < 1e-12);
    }
}

#[test]
fn duality() {
    let f = GridFn::sample_2d(13, |x, y| (5.0 * x).cos() * (4.0 * y).sin()).unwrap();
    let up = upper_concave_envelope(&f);
    let low = lower_convex_envelope(&f.negate()).negate();
    assert_eq!(up, low);
}

#[test]
fn certificates_find_violations() {
    let f = GridFn::sample_1d(11, |x| -(x - 0.5).abs()).unwrap();
    let r = check_midpoint_convex(&f, 1e-12, PairMode::Full);
    assert!(!r.passed);
    assert_eq!(r.witness.len(), 3);
    assert!(check_midpoint_concave(&f, 1e-12, PairMode::Full).passed);
    let m = check_monotone(&f, 1e-12);
    assert!(!m.passed && (m.worst_violation - 0.1).abs() < 1e-12);
    let s = check_slope_bounds(&f, 0, 1.0, SlopeSense::AtMost, 1e-12);
    assert!(s.passed);
    let s = check_slope_bounds(&f, 0, 0.5, SlopeSense::AtMost, 1e-12);
    assert!(!s.passed);
}

#[test]
fn sampled_pairs_are_deterministic() {
    let f = GridFn::sample_2d(41, |x, y| (x * 7.0).sin() + y * y).unwrap();
    let mode = PairMode::Sampled { pairs: 5000, seed: 3 };
    let a = check_midpoint_convex(&f, 1e-12, mode);
    let b = check_midpoint_convex(&f, 1e-12, mode);
    assert_eq!(a, b);
    assert!(a.checked > 4000 && a.checked <= 5000);
}

fn grid_values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn envelope_is_a_convex_minorant(vals in grid_values(7)) {
        let f = GridFn::new_2d(7, vals).unwrap();
        let env = lower_convex_envelope(&f);
        for (e, v) in env.values().iter().zip(f.values()) {
            prop_assert!(*e <= v + 1e-12);
        }
        prop_assert!(check_midpoint_convex(&env, 1e-10, PairMode::Full).passed);
        // idempotent up to rounding
        prop_assert!(lower_convex_envelope(&env).max_abs_diff(&env) < 1e-12);
        // the discrete biconjugate never exceeds the envelope
        for (b, e) in biconjugate_2d(&f, 50.0, 61).iter().zip(env.values()) {
            prop_assert!(*b <= e + 1e-9);
        }
    }

    #[test]
    fn one_d_envelope_is_exact(vals in prop::collection::vec(-1.0f64..1.0, 3..30)) {
        let f = GridFn::new_1d(vals).unwrap();
        let env = lower_convex_envelope(&f);
        prop_assert!(lower_convex_envelope(&env).max_abs_diff(&env) < 1e-15);
        for (e, b) in env.values().iter().zip(biconjugate_1d_exact(&f)) {
            prop_assert!((e - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dominance(vals in grid_values(6), bump in prop::collection::vec(0.0f64..0.5, 36)) {
        let f = GridFn::new_2d(6, vals.clone()).unwrap();
        let g = GridFn::new_2d(6, vals.iter().zip(&bump).map(|(a, b)| a + b).collect()).unwrap();
        let (ef, eg) = (lower_convex_envelope(&f), lower_convex_envelope(&g));
        for (a, b) in ef.values().iter().zip(eg.values()) {
            prop_assert!(*a <= b + 1e-12);
        }
    }
}
