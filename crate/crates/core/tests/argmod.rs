mod common;

use proptest::prelude::*;
use zeta_ladders::argmod::*;
use zeta_ladders::{Error, ZeroStore};

fn store() -> &'static ZeroStore {
    common::shared_store(3000.0)
}

#[test]
fn s_matches_argument_tracking() {
    for t in [100.5, 255.25, 777.0, 1000.5, 2500.125] {
        let want = common::arg_s(t);
        let got = s(t, store()).unwrap();
        assert!((got - want).abs() < 1e-4, "t={t}: {got} vs {want}");
    }
}

#[test]
fn s_jumps_by_one_at_ordinates() {
    for &g in store().ordinates().iter().step_by(113) {
        let jump = s(g + 1e-7, store()).unwrap() - s(g - 1e-7, store()).unwrap();
        assert!((jump - 1.0).abs() < 1e-4, "g={g}");
        let mid = s(g, store()).unwrap();
        assert!((mid - s(g - 1e-7, store()).unwrap() - 0.5).abs() < 1e-4);
    }
}

#[test]
fn s1_routes_agree() {
    for t in [20.0, 150.0, 999.9, 2718.28] {
        let a = s1(t, store()).unwrap();
        let b = s1_direct(t, store()).unwrap();
        let c = s_integral(0.0, t, store()).unwrap();
        assert!((a - b).abs() < 1e-6, "t={t}");
        assert!((a - c).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn s1_matches_midpoint_sum_of_the_oracle() {
    // Two zeros lie in [100.5, 104.5]; integrate the independently tracked
    // argument piecewise between their tabulated ordinates.
    let (a, b) = (100.5, 104.5);
    let cuts = [a, 101.317_851_005_731_39, 103.725_538_040_478_34, b];
    let n = 200;
    let mid: f64 = cuts
        .windows(2)
        .map(|w| {
            let h = (w[1] - w[0]) / n as f64;
            (0..n).map(|i| common::arg_s(w[0] + (i as f64 + 0.5) * h)).sum::<f64>() * h
        })
        .sum();
    let lib = s1(b, store()).unwrap() - s1(a, store()).unwrap();
    assert!((lib - mid).abs() < 1e-3, "{lib} vs {mid}");
}

#[test]
fn watermark_is_enforced() {
    assert!(matches!(s(3000.5, store()), Err(Error::BeyondWatermark { .. })));
    assert!(matches!(s1(3001.0, store()), Err(Error::BeyondWatermark { .. })));
    assert!(find_mu_roots(0.0, 3500.0, store()).is_err());
    assert!(find_mu_roots(10.0, 5.0, store()).is_err());
}

#[test]
fn s1_stays_negative_at_desk_heights() {
    // Observed: S1 has no sign change on (0, 3000].
    let roots = find_mu_roots(0.0, 3000.0, store()).unwrap();
    assert!(roots.roots.is_empty());
    assert!(roots.resolution <= 0.25);
    for r in &roots.roots {
        assert!(s1(*r, store()).unwrap().abs() <= 1e-6);
    }
}

#[test]
fn reduction_to_the_base_point() {
    let roots = find_mu_roots(0.0, 3000.0, store()).unwrap();
    let red = reduce_integral(2222.2, &roots, store()).unwrap();
    assert_eq!((red.k_bar, red.mu_kbar), (0, 0.0));
    assert!((red.value - s1(2222.2, store()).unwrap()).abs() < 1e-6);
    let late = find_mu_roots(1000.0, 3000.0, store()).unwrap();
    assert!(matches!(
        reduce_integral(2222.2, &late, store()),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        reduce_integral(3100.0, &roots, store()),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn mean_argument_identities() {
    let (a, b) = (1000.0, 1100.0);
    let m = mean_arg(a, b, store()).unwrap();
    let direct = std::f64::consts::PI * s_integral(a, b, store()).unwrap() / (b - a);
    assert!((m - direct).abs() < 1e-8);
    assert!(mean_arg(5.0, 5.0, store()).is_err());
}

#[test]
fn littlewood_ratio_is_bounded() {
    let p = littlewood_profile(3000.0, store()).unwrap();
    assert!(p > 0.0 && p < 1.0, "{p}");
    assert!(littlewood_profile(50.0, store()).is_err());
}

#[test]
fn mu_scan_skips_the_trivial_root() {
    let r = mu_scan(0.0, 50.0, 0.5, store());
    assert!(r.roots.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn s1_is_continuous(t in 15.0f64..2990.0) {
        let a = s1(t, store()).unwrap();
        let b = s1(t + 1e-6, store()).unwrap();
        prop_assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn s_integral_is_additive(a in 15.0f64..1500.0, w in 1.0f64..1400.0, f in 0.1f64..0.9) {
        let b = a + w;
        let m = a + f * w;
        let whole = s_integral(a, b, store()).unwrap();
        let parts = s_integral(a, m, store()).unwrap() + s_integral(m, b, store()).unwrap();
        prop_assert!((whole - parts).abs() < 1e-7);
    }
}
