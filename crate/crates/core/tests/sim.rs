use bosegas::minimize::{zero, HylSolverConfig, Truncation};
use bosegas::sim::{
    bruteforce_measure, empirical_rate, sample_ideal, sample_tilted, transition_matrix, Ball, SimConfig,
};
use bosegas::specfun::{lambert_w, WBranch};
use bosegas::{ModelParams, BETA_NORM};
use proptest::prelude::*;

fn short(p: ModelParams, volume: f64, k_max: usize, n: usize, seed: u64) -> SimConfig {
    SimConfig {
        burn_in: 500,
        seed,
        ..SimConfig::new(p, volume, k_max, n)
    }
}

#[test]
fn config_validation() {
    let p = ModelParams::pmf(3, 1.0, 0.5, 1.0);
    assert!(SimConfig::new(p, 0.0, 4, 10).validate().is_err());
    assert!(SimConfig::new(p, 10.0, 0, 10).validate().is_err());
    assert!(SimConfig { chains: 20, ..SimConfig::new(p, 10.0, 4, 10) }.validate().is_err());
    assert!(sample_tilted(&SimConfig::new(ModelParams::ideal(3, 1.0, -1.0), 10.0, 4, 10)).is_err());
    assert!(sample_ideal(&SimConfig::new(ModelParams::pmf(3, 1.0, 0.5, 1.0), 10.0, 4, 10)).is_err());
}

#[test]
fn runs_do_not_depend_on_the_thread_count() {
    let cfg = short(ModelParams::hyl(3, 1.0, 0.5, 1.0, 0.3), 50.0, 6, 4000, 7);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| sample_tilted(&cfg).unwrap());
    let b = four.install(|| sample_tilted(&cfg).unwrap());
    assert_eq!(a, b);
    let ic = short(ModelParams::ideal(3, 1.0, -0.1), 50.0, 6, 4000, 7);
    assert_eq!(one.install(|| sample_ideal(&ic).unwrap()), four.install(|| sample_ideal(&ic).unwrap()));
}

#[test]
fn seeds_change_the_stream() {
    let p = ModelParams::cmf(3, BETA_NORM, -0.1, 1.0);
    let a = sample_tilted(&short(p, 100.0, 4, 2000, 1)).unwrap();
    let b = sample_tilted(&short(p, 100.0, 4, 2000, 2)).unwrap();
    assert_ne!(a.mean, b.mean);
    assert_eq!(a.seed, 1);
}

#[test]
fn detailed_balance_on_small_boxes() {
    for p in [
        ModelParams::cmf(3, BETA_NORM, -0.2, 1.5),
        ModelParams::pmf(3, BETA_NORM, 0.7, 1.0),
        ModelParams::hyl(3, BETA_NORM, 0.7, 1.0, 0.4),
    ] {
        let pi = bruteforce_measure(&p, 1.0, 2, 12).unwrap();
        let m = transition_matrix(&p, 1.0, 2, 12).unwrap();
        assert_eq!(m.states, pi.states);
        assert!(m.detailed_balance_error(&pi.prob) <= 1e-12, "{:?}", p.model);
        assert!(m.stay.iter().all(|&s| (-1e-15..=1.0).contains(&s)));
    }
}

#[test]
fn exact_ideal_law_is_a_poisson_product() {
    let p = ModelParams::ideal(3, BETA_NORM, -0.3);
    let t = bruteforce_measure(&p, 4.0, 2, 25).unwrap();
    let lam: Vec<f64> = (1..=2).map(|k| 4.0 * p.weights().q(k, -0.3)).collect();
    let pois = |l: f64, n: u32| (-l + n as f64 * l.ln() - (1..=n).map(|j| (j as f64).ln()).sum::<f64>()).exp();
    for (s, pr) in t.states.iter().zip(&t.prob) {
        let expect = pois(lam[0], s[0]) * pois(lam[1], s[1]);
        assert!((pr - expect).abs() <= 1e-12 * expect);
    }
    assert!(t.outside_mass.unwrap() < 1e-12);
    assert_eq!(t.index(&[3, 1]).map(|i| t.states[i].clone()), Some(vec![3, 1]));
    assert_eq!(t.index(&[26, 0]), None);
}

#[test]
fn exact_enumeration_limits() {
    let p = ModelParams::pmf(3, 1.0, 0.5, 1.0);
    assert!(bruteforce_measure(&p, 1.0, 4, 3).is_err());
    assert!(bruteforce_measure(&p, 1.0, 3, 200).is_err());
    let t = bruteforce_measure(&p, 2.0, 3, 10).unwrap();
    assert!((t.prob.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    assert!(t.boundary_mass < 1e-3);
}

#[test]
fn ideal_standard_errors_shrink_like_root_n() {
    let p = ModelParams::ideal(3, BETA_NORM, -0.2);
    let sizes = [1000usize, 4000, 16000, 64000, 256000];
    let pts: Vec<(f64, f64)> = sizes
        .iter()
        .map(|&n| {
            let e = sample_ideal(&SimConfig::new(p, 20.0, 3, n)).unwrap();
            ((n as f64).ln(), e.stderr[0].ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() <= 0.05, "slope {slope}");
}

#[test]
fn cmf_total_density_matches_the_lambert_formula() {
    // the chain simulates cycles up to k_max, so compare with the cut model
    let k_max = 8;
    let p = ModelParams::cmf(3, BETA_NORM, -0.05, 1.0).with_cutoff(k_max);
    let qbar = p.weights().qbar(p.mu).unwrap();
    let k = p.a * p.beta * qbar;
    let target = lambert_w(WBranch::Principal, k).unwrap() / (p.a * p.beta);
    let est = sample_tilted(&SimConfig { seed: 11, ..SimConfig::new(p, 1000.0, k_max, 40_000) }).unwrap();
    let (m, se) = est.total;
    assert!((m - target).abs() <= 3.0 * se, "{m} ± {se} vs {target}");
    assert!(est.acceptance_rate.unwrap() > 0.1);
    assert!(est.ess > 100.0);
}

#[test]
fn subcritical_pmf_chain_agrees_with_the_cut_zero() {
    let k_cut = 20;
    let p = ModelParams::pmf(3, BETA_NORM, 0.5, 1.0).with_cutoff(k_cut);
    let z = zero(&p, Truncation::default(), &HylSolverConfig::default()).unwrap();
    let est = sample_tilted(&SimConfig { seed: 3, ..SimConfig::new(p, 1000.0, k_cut, 20_000) }).unwrap();
    let zs = est.z_scores(z.xi.values());
    assert_eq!(zs.len(), k_cut);
    let worst = zs.iter().fold(0.0f64, |m, z| m.max(z.abs()));
    assert!(worst < 4.5, "{zs:?}");
    assert!(est.tail.expected_cycles == 0.0 || est.tail.expected_cycles.is_finite());
}

#[test]
fn n1_histogram_is_close_to_the_exact_marginal() {
    let p = ModelParams::hyl(3, BETA_NORM, 0.4, 1.0, 0.3);
    let (volume, cap) = (3.0, 30);
    let exact = bruteforce_measure(&p, volume, 2, cap).unwrap();
    assert!(exact.boundary_mass < 1e-10);
    let m = exact.marginal(1);
    let est = sample_tilted(&SimConfig {
        seed: 5,
        record_states: true,
        ..SimConfig::new(p, volume, 2, 200_000)
    })
    .unwrap();
    let total: u64 = est.hist_n1.iter().sum();
    let tv: f64 = 0.5
        * (0..m.len().max(est.hist_n1.len()))
            .map(|n| {
                let e = est.hist_n1.get(n).map_or(0.0, |&c| c as f64 / total as f64);
                (e - m.get(n).copied().unwrap_or(0.0)).abs()
            })
            .sum::<f64>();
    assert!(tv < 0.02, "TV {tv}");
    let states = est.states.unwrap();
    assert_eq!(states.iter().map(|s| s.1).sum::<u64>(), total);
}

#[test]
fn finite_volume_rates_approach_the_infimum() {
    // ideal gas cut at two lengths: the rate of a sup-norm ball is the sum of
    // one-dimensional minima, attained at q clamped into the ball
    let p = ModelParams::ideal(3, BETA_NORM, -0.1).with_cutoff(2);
    let q: Vec<f64> = (1..=2).map(|k| p.weights().q(k, -0.1)).collect();
    let ball = Ball { center: vec![q[0] + 0.5, q[1] + 0.3], radius: 0.15 };
    let inf: f64 = q
        .iter()
        .zip(&ball.center)
        .map(|(&q, &c)| {
            let x = q.clamp(c - ball.radius, c + ball.radius);
            x * (x / q).ln() - x + q
        })
        .sum();
    let rates = empirical_rate(&p, &[8.0, 16.0, 32.0, 64.0], &ball).unwrap();
    let errs: Vec<f64> = rates.iter().map(|r| (r.rate - inf).abs()).collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    // the error decays roughly like ln V / V
    assert!(errs[3] < 0.25 * errs[0], "{errs:?} vs {inf}");
    assert!(rates.iter().all(|r| r.probability > 0.0 && r.probability < 1.0));
    let empty = Ball { center: vec![q[0], q[1]], radius: -1.0 };
    assert!(empirical_rate(&p, &[4.0], &empty).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn identical_configs_give_identical_estimates(seed in any::<u64>(), mu in 0.0f64..1.0) {
        let cfg = short(ModelParams::pmf(3, BETA_NORM, mu, 1.0), 30.0, 4, 1000, seed);
        prop_assert_eq!(sample_tilted(&cfg).unwrap(), sample_tilted(&cfg).unwrap());
        let ic = short(ModelParams::ideal(3, BETA_NORM, -mu), 30.0, 4, 1000, seed);
        prop_assert_eq!(sample_ideal(&ic).unwrap(), sample_ideal(&ic).unwrap());
    }

    #[test]
    fn detailed_balance_random_parameters(mu in -1.0f64..1.5, a in 0.1f64..2.0, bf in 0.0f64..0.9, v in 0.5f64..3.0) {
        let p = ModelParams::hyl(3, 0.3, mu, a, bf * a);
        let pi = bruteforce_measure(&p, v, 2, 10).unwrap();
        let m = transition_matrix(&p, v, 2, 10).unwrap();
        prop_assert!(m.detailed_balance_error(&pi.prob) <= 1e-12);
    }
}
