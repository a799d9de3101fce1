use bosegas::specfun::{
    bose_expansion, bose_g, bose_g_eval, bose_series, lambert_w, lambert_w_prime, zeta, BoseMethod,
    WBranch, INV_E,
};
use bosegas::ExtReal;
use proptest::prelude::*;

// Σ_{k≤K} k^{-s} plus the Euler–Maclaurin midpoint closure of the integral tail
fn zeta_oracle(s: f64) -> f64 {
    let k_max = 200_000u64;
    let mut sum = 0.0;
    for k in (1..=k_max).rev() {
        sum += (k as f64).powf(-s);
    }
    let kf = k_max as f64;
    sum + kf.powf(1.0 - s) / (s - 1.0) - 0.5 * kf.powf(-s)
}

fn newton_omega() -> f64 {
    let mut w = 0.5f64;
    for _ in 0..60 {
        w -= (w * w.exp() - 1.0) / (w.exp() * (1.0 + w));
    }
    w
}

#[test]
fn zeta_matches_direct_summation() {
    for &(s, expected) in &[(1.5, 2.6123753), (2.5, 1.3414873)] {
        let z = zeta(s).unwrap();
        let o = zeta_oracle(s);
        assert!((z - o).abs() < 1e-9 * o, "s = {s}: {z} vs {o}");
        assert!((z - expected).abs() < 1e-6);
    }
    let z2 = zeta(2.0).unwrap();
    assert!((z2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-15);
}

#[test]
fn zeta_large_s_and_domain() {
    let z = zeta(50.0).unwrap();
    assert!(z - 1.0 <= 2f64.powi(-50) * (1.0 + 1e-10));
    assert!(z > 1.0);
    assert!(zeta(1.0).is_err());
    assert!(zeta(0.5).is_err());
}

#[test]
fn bose_at_zero_is_zeta() {
    let g = bose_g(2.5, 0.0).unwrap().unwrap();
    assert!((g - zeta_oracle(2.5)).abs() < 1e-12);
    assert_eq!(bose_g(1.0, 0.0).unwrap(), ExtReal::PosInfinity);
    assert_eq!(bose_g(0.5, 0.0).unwrap(), ExtReal::PosInfinity);
    assert_eq!(bose_g(-2.0, 0.0).unwrap(), ExtReal::PosInfinity);
}

#[test]
fn bose_closed_forms() {
    // g(1, α) = -ln(1 - e^{-α})
    for &a in &[1e-6, 0.01, 0.3, 0.5, 1.0, 4.0] {
        let g = bose_g(1.0, a).unwrap().unwrap();
        let exact = -(-(-a).exp_m1()).ln();
        assert!((g - exact).abs() <= 1e-13 * exact.abs(), "alpha = {a}: {g} vs {exact}");
    }
    // g(0, α) = 1/(e^α - 1), g(-1, α) = e^α/(e^α - 1)^2
    for &a in &[0.05, 0.4, 2.0] {
        let g0 = bose_g(0.0, a).unwrap().unwrap();
        assert!((g0 - 1.0 / a.exp_m1()).abs() <= 1e-12 * g0);
        let gm1 = bose_g(-1.0, a).unwrap().unwrap();
        let e = a.exp();
        assert!((gm1 - e / (e - 1.0).powi(2)).abs() <= 1e-12 * gm1);
    }
    // g(2, α) at small α against the dilogarithm expansion via the series
    let g = bose_g(2.0, 0.1).unwrap().unwrap();
    let s = bose_series(2.0, 0.1).unwrap().value.unwrap();
    assert!((g - s).abs() < 1e-13 * s);
}

#[test]
fn bose_large_alpha() {
    for &n in &[-3.0, 0.5, 1.5, 2.5, 7.0] {
        let g = bose_g(n, 30.0).unwrap().unwrap();
        let e = (-30.0f64).exp();
        let two = e * (1.0 + 2f64.powf(-n) * e);
        assert!((g / two - 1.0).abs() < 1e-13, "n = {n}");
    }
}

#[test]
fn bose_rejects_negative_alpha() {
    assert!(bose_g(2.5, -0.1).is_err());
}

#[test]
fn bose_methods_are_reported() {
    assert_eq!(bose_g_eval(2.5, 0.1).unwrap().method, BoseMethod::Expansion);
    assert_eq!(bose_g_eval(2.5, 0.7).unwrap().method, BoseMethod::Series);
    let e = bose_g_eval(1.5, 2.0).unwrap();
    assert!(e.error_bound <= 1e-16 * e.value.unwrap());
}

#[test]
fn expansion_and_series_agree_on_the_overlap() {
    for &n in &[1.5, 2.5, 0.5, -0.5, 1.0, 2.0, 3.0, 0.0, -2.0] {
        for i in 0..=49 {
            let a = 0.01 + i as f64 * 0.01;
            let e = bose_expansion(n, a).unwrap().value.unwrap();
            let s = bose_series(n, a).unwrap().value.unwrap();
            assert!((e - s).abs() <= 1e-9 * s.abs(), "n = {n}, alpha = {a}: {e} vs {s}");
        }
    }
}

#[test]
fn lambert_reference_values() {
    assert_eq!(lambert_w(WBranch::Principal, 0.0).unwrap(), 0.0);
    let e = std::f64::consts::E;
    assert!((lambert_w(WBranch::Principal, e).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(lambert_w(WBranch::Lower, -INV_E).unwrap(), -1.0);
    assert_eq!(lambert_w(WBranch::Principal, -INV_E).unwrap(), -1.0);
    let omega = newton_omega();
    let w = lambert_w(WBranch::Principal, 1.0).unwrap();
    assert!((w - omega).abs() < 1e-15);
    assert!((w - 0.5671433).abs() < 1e-6);
}

#[test]
fn lambert_domain_errors() {
    assert!(lambert_w(WBranch::Principal, -0.4).is_err());
    assert!(lambert_w(WBranch::Lower, 0.0).is_err());
    assert!(lambert_w(WBranch::Lower, 1.0).is_err());
    assert!(lambert_w(WBranch::Principal, f64::NAN).is_err());
}

#[test]
fn lambert_derivative() {
    let e = std::f64::consts::E;
    assert!((lambert_w_prime(WBranch::Principal, e).unwrap() - 0.5 / e).abs() < 1e-15);
    let omega = newton_omega();
    let d1 = lambert_w_prime(WBranch::Principal, 1.0).unwrap();
    assert!((d1 - omega / (1.0 + omega)).abs() < 1e-15);
    assert!((d1 - 0.361896).abs() < 1e-6);
    let h = 1e-6;
    let fd = (lambert_w(WBranch::Principal, 0.5 + h).unwrap()
        - lambert_w(WBranch::Principal, 0.5 - h).unwrap())
        / (2.0 * h);
    assert!((lambert_w_prime(WBranch::Principal, 0.5).unwrap() - fd).abs() < 1e-7);
    assert!(lambert_w_prime(WBranch::Lower, -INV_E).is_err());
    assert!(lambert_w_prime(WBranch::Principal, -INV_E).is_err());
}

#[test]
fn lambert_extreme_arguments() {
    for &x in &[1e-300, 1e-10, 1e10, 1e100, 1e300] {
        let w = lambert_w(WBranch::Principal, x).unwrap();
        let rel = if x > 1.0 {
            ((w + w.ln()) - x.ln()).abs() / x.ln().abs()
        } else {
            (w * w.exp() - x).abs() / x
        };
        assert!(rel < 1e-14, "x = {x}");
    }
    for &x in &[-1e-300, -1e-100, -1e-10, -0.1] {
        let w = lambert_w(WBranch::Lower, x).unwrap();
        assert!(w < -1.0);
        let r = (w + (-w).ln()) - (-x).ln();
        assert!(r.abs() < 1e-13 * (-x).ln().abs(), "x = {x}");
    }
}

// dg/dα = -g(n - 1, α)
#[test]
fn bose_derivative_identity() {
    let h = 1e-5;
    for &n in &[1.5, 2.5, 3.0, 0.5] {
        for &a in &[0.05, 0.2, 0.45, 0.6, 1.0, 3.0] {
            let up = bose_g(n, a + h).unwrap().unwrap();
            let dn = bose_g(n, a - h).unwrap().unwrap();
            let fd = (up - dn) / (2.0 * h);
            let exact = -bose_g(n - 1.0, a).unwrap().unwrap();
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "n = {n}, a = {a}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn inverse_identity_principal(e in -15.0f64..15.0) {
        let x = 10f64.powf(e);
        let w = lambert_w(WBranch::Principal, x).unwrap();
        let scale = x.abs().max(1.0);
        prop_assert!((w * w.exp() - x).abs() <= 1e-12 * scale);
        prop_assert!(w >= -1.0);
    }

    #[test]
    fn inverse_identity_negative(t in 0.0f64..1.0) {
        let x = -INV_E * t;
        prop_assume!(x < 0.0);
        for b in [WBranch::Principal, WBranch::Lower] {
            let w = lambert_w(b, x).unwrap();
            prop_assert!((w * w.exp() - x).abs() <= 1e-12);
        }
        let w0 = lambert_w(WBranch::Principal, x).unwrap();
        let wm = lambert_w(WBranch::Lower, x).unwrap();
        prop_assert!(w0 >= -1.0 && wm <= -1.0);
        if t < 1.0 - 1e-9 {
            prop_assert!(w0 > -1.0 && wm < -1.0);
        }
    }

    #[test]
    fn bose_decreasing_in_alpha(n in -2.0f64..6.0, a in 0.001f64..5.0, da in 1e-3f64..1.0) {
        let g1 = bose_g(n, a).unwrap().unwrap();
        let g2 = bose_g(n, a + da).unwrap().unwrap();
        prop_assert!(g2 < g1);
    }

    #[test]
    fn zeta_decreasing(s in 1.01f64..40.0, ds in 1e-3f64..2.0) {
        prop_assert!(zeta(s + ds).unwrap() < zeta(s).unwrap());
    }
}
