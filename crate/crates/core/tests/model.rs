use bosegas::model::{
    cumulant_density, cumulant_seq, hamiltonian, hamiltonian_lsc, objective, rate_ideal, stationarity_gradient,
};
use bosegas::{CycleCounts, ExtReal, Model, ModelParams, TailPolicy, WeightSeq, BETA_NORM};
use proptest::prelude::*;

fn counts(v: &[f64]) -> CycleCounts {
    CycleCounts::from_values(v.to_vec()).unwrap()
}

#[test]
fn weights_at_beta_norm_are_powers() {
    let w = WeightSeq::new(3, BETA_NORM).unwrap();
    for k in 1..50 {
        let expect = (k as f64).powf(-2.5);
        assert!((w.q(k, 0.0) - expect).abs() <= 4e-15 * expect);
    }
    let w = WeightSeq::new(2, 1.0).unwrap();
    assert_eq!(w.critical_density(), ExtReal::PosInfinity);
    assert!(WeightSeq::new(3, 0.0).is_err());
    assert!(WeightSeq::new(0, 1.0).is_err());
}

#[test]
fn reduction_shifts_mu() {
    let p = ModelParams::pmf(3, 0.3, 1.0, 2.0).with_alpha(-0.4);
    let r = p.reduced();
    assert_eq!((r.mu, r.alpha), (p.mu + p.alpha, 0.0));
    let x = counts(&[0.2, 0.1, 0.05]);
    assert_eq!(hamiltonian(&p, &x), hamiltonian(&r, &x));
    assert_eq!(objective(&p, &x).unwrap(), objective(&r, &x).unwrap());
}

#[test]
fn validation() {
    assert!(ModelParams::ideal(3, 1.0, 0.1).validate().is_err());
    assert!(ModelParams::ideal(3, 1.0, 0.1).with_alpha(-0.2).validate().is_ok());
    assert!(ModelParams::cmf(3, 1.0, -1.0, -1.0).validate().is_err());
    assert!(ModelParams::hyl(3, 1.0, 1.0, 1.0, 1.0).validate().is_err());
    assert!(ModelParams::pmf(3, 1.0, 1.0, 1.0).with_alpha(0.5).validate().is_err());
    assert!(ModelParams::pmf(3, 1.0, 5.0, 1.0).validate().is_ok());
}

#[test]
fn zero_log_zero_convention() {
    let p = ModelParams::ideal(3, BETA_NORM, -0.2).with_cutoff(3);
    let w = p.weights();
    let x = counts(&[w.q(1, -0.2), 0.0, w.q(3, -0.2)]);
    let i = rate_ideal(&p, &x).unwrap().unwrap();
    assert!((i - w.q(2, -0.2)).abs() < 1e-15);
}

#[test]
fn negative_entries_have_infinite_rate() {
    let p = ModelParams::ideal(3, 1.0, -0.1).with_cutoff(2);
    let x = counts(&[-0.1, 0.2]);
    assert_eq!(rate_ideal(&p, &x).unwrap(), ExtReal::PosInfinity);
}

#[test]
fn ideal_tail_counts_match_bose_functions() {
    let w = WeightSeq::new(3, 0.7).unwrap();
    let eta = -0.3;
    let k_max = 40;
    let values: Vec<f64> = (1..=k_max).map(|k| w.q(k, eta)).collect();
    let x = CycleCounts::new(values, TailPolicy::ideal(w, eta)).unwrap();
    assert!((x.density().unwrap() - w.density(eta).unwrap().unwrap()).abs() < 1e-13);
    assert!((x.total().unwrap() - w.qbar(eta).unwrap()).abs() < 1e-13);
}

#[test]
fn pmf_plateau_is_exact() {
    let p = ModelParams::pmf(3, 0.5, 2.0, 0.7);
    let plateau = -p.mu * p.mu / (2.0 * p.a);
    for x in [[0.0, 0.0], [0.1, 0.2], [1.0, 0.4]] {
        let c = counts(&x);
        assert!(c.density().unwrap() < p.mu / p.a);
        assert_eq!(hamiltonian_lsc(&p, &c), ExtReal::Finite(plateau));
    }
}

#[test]
fn hyl_lsc_tends_to_pmf_linearly_in_b() {
    let x = counts(&[0.3, 0.2, 0.1, 0.05]);
    let (a, mu) = (1.0, 2.0);
    let pmf = hamiltonian_lsc(&ModelParams::pmf(3, 1.0, mu, a), &x).unwrap();
    let err = |b: f64| (hamiltonian_lsc(&ModelParams::hyl(3, 1.0, mu, a, b), &x).unwrap() - pmf).abs();
    let (e3, e6) = (err(1e-3), err(1e-6));
    assert!(e3 < 1e-2 && e6 < 1e-5);
    let ratio = e3 / e6;
    assert!((ratio / 1e3 - 1.0).abs() < 1e-2, "ratio {ratio}");
}

#[test]
fn legendre_transform_of_the_cumulant_is_the_rate() {
    // x supported on k = 1, 2 with the model cut at 2: the transform is
    // separable, so a grid sup over t reproduces I(x)
    let p = ModelParams::ideal(3, BETA_NORM, -0.1).with_cutoff(2);
    let x = [0.6, 0.05];
    let c = counts(&x);
    let i = rate_ideal(&p, &c).unwrap().unwrap();
    let n = 600;
    let grid: Vec<f64> = (0..=n).map(|j| -6.0 + 8.0 * j as f64 / n as f64).collect();
    let mut best = f64::NEG_INFINITY;
    for &t1 in &grid {
        for &t2 in &grid {
            let v = t1 * x[0] + t2 * x[1] - cumulant_seq(&p, &[t1, t2]).unwrap();
            best = best.max(v);
        }
    }
    assert!(best <= i + 1e-12);
    assert!(i - best < 1e-3, "grid sup {best} vs rate {i}");
}

#[test]
fn cumulant_density_is_infinite_past_the_edge() {
    let p = ModelParams::ideal(3, 1.0, 0.0).with_alpha(-0.5);
    assert_eq!(cumulant_density(&p, 0.6).unwrap(), ExtReal::PosInfinity);
    let edge = cumulant_density(&p, 0.5).unwrap().unwrap();
    let w = p.weights();
    assert!((edge - (w.qbar(0.0).unwrap() - w.qbar(-0.5).unwrap())).abs() < 1e-14);
    // still finite for d = 1
    let p1 = ModelParams::ideal(1, 1.0, 0.0).with_alpha(-0.5);
    assert!(cumulant_density(&p1, 0.5).unwrap().is_finite());
}

#[test]
fn gradient_vanishes_at_the_ideal_zero() {
    let p = ModelParams::ideal(3, 0.4, -0.3).with_cutoff(16);
    let w = p.weights();
    let x = counts(&(1..=16).map(|k| w.q(k, -0.3)).collect::<Vec<_>>());
    for g in stationarity_gradient(&p, &x).unwrap() {
        assert!(g.abs() < 1e-12);
    }
}

fn positive_counts(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..2.0, n)
}

proptest! {
    #[test]
    fn rate_ideal_positive_off_the_weights(
        h in prop::collection::vec(-0.5f64..0.5, 6),
        mu in -2.0f64..0.0,
    ) {
        prop_assume!(h.iter().any(|v| v.abs() > 1e-6));
        let p = ModelParams::ideal(3, BETA_NORM, mu).with_cutoff(6);
        let w = p.weights();
        let q: Vec<f64> = (1..=6).map(|k| w.q(k, mu)).collect();
        let at_q = rate_ideal(&p, &counts(&q)).unwrap().unwrap();
        prop_assert!(at_q.abs() < 1e-14);
        let x: Vec<f64> = q.iter().zip(&h).map(|(q, h)| (q + h * q).max(0.0)).collect();
        let i = rate_ideal(&p, &counts(&x)).unwrap().unwrap();
        prop_assert!(i > 0.0);
    }

    #[test]
    fn lsc_is_below_the_hamiltonian(
        x in positive_counts(5),
        mu in -2.0f64..4.0,
        a in 0.1f64..3.0,
        bf in 0.0f64..0.99,
        hyl in any::<bool>(),
    ) {
        let p = if hyl {
            ModelParams::hyl(3, 0.5, mu, a, bf * a)
        } else {
            ModelParams::pmf(3, 0.5, mu, a)
        };
        let c = counts(&x);
        let h = hamiltonian(&p, &c).unwrap();
        let l = hamiltonian_lsc(&p, &c).unwrap();
        prop_assert!(l <= h + 1e-12 * h.abs().max(1.0));
        if c.density().unwrap() * a >= mu {
            prop_assert_eq!(l, h);
        }
    }

    #[test]
    fn cumulant_density_convex(alpha in -3.0f64..-0.01, d in 1u32..5, s in 0.05f64..0.95) {
        let p = ModelParams::ideal(d, 0.8, 0.0).with_alpha(alpha);
        let t_max = -alpha * p.beta;
        let h = 0.02 * t_max;
        let t = -2.0 * t_max + s * 2.9 * t_max;
        prop_assume!(t + h <= t_max);
        let f = |t: f64| cumulant_density(&p, t).unwrap().unwrap();
        let second = f(t + h) - 2.0 * f(t) + f(t - h);
        prop_assert!(second >= -1e-9, "second difference {}", second);
    }

    #[test]
    fn objective_reduces_to_ideal_rate_without_interaction(x in positive_counts(4), mu in -1.0f64..0.0) {
        let c = counts(&x);
        let ideal = ModelParams::ideal(3, 0.6, mu).with_cutoff(4);
        let cmf = ModelParams { model: Model::Cmf, ..ideal };
        prop_assert_eq!(objective(&cmf, &c).unwrap(), rate_ideal(&ideal, &c).unwrap());
    }
}
