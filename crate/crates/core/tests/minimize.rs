use bosegas::minimize::{
    beta_star, hyl_family_scan, hyl_solutions, pmf_consistency, zero, zero_cmf, zero_hyl, zero_ideal, zero_pmf,
    HylSolverConfig, HylSystem, SolutionDetail, Truncation,
};
use bosegas::model::{objective, stationarity_gradient};
use bosegas::specfun::{lambert_w, WBranch};
use bosegas::{CycleCounts, ModelParams, BETA_NORM};
use proptest::prelude::*;

const ZETA_3_2: f64 = 2.612375348685488;

fn trunc() -> Truncation {
    Truncation::new(512).unwrap()
}

fn max_gradient(p: &ModelParams, x: &CycleCounts) -> f64 {
    stationarity_gradient(p, x).unwrap().iter().fold(0.0, |m, g| m.max(g.abs()))
}

#[test]
fn truncation_rejects_zero() {
    assert!(Truncation::new(0).is_err());
}

#[test]
fn ideal_and_cmf_zeros_are_stationary() {
    let p = ModelParams::ideal(3, 0.3, -0.2);
    let z = zero_ideal(&p, trunc()).unwrap();
    assert!(max_gradient(&p, &z.xi) < 1e-12);
    assert!(z.objective.abs() < 1e-12);

    let p = ModelParams::cmf(3, 0.3, -0.2, 1.5);
    let z = zero_cmf(&p, trunc()).unwrap();
    assert!(max_gradient(&p, &z.xi) < 1e-8);
    let SolutionDetail::Cmf { k, gamma, .. } = z.detail else { panic!() };
    let w0 = lambert_w(WBranch::Principal, k).unwrap();
    assert!((z.xi.total().unwrap() - w0 / (p.a * p.beta)).abs() < 1e-12);
    assert!((gamma - w0 / (p.a * p.beta)).abs() < 1e-15);
    assert!(zero_cmf(&ModelParams::cmf(3, 0.3, 0.1, 1.0), trunc()).is_err());
}

#[test]
fn pmf_zero_fixed_point_and_self_consistency() {
    for (d, mu) in [(3, -1.0), (3, 1.0), (3, 2.6), (3, 5.0), (2, 3.0), (1, 0.5), (4, 1.0)] {
        let p = ModelParams::pmf(d, BETA_NORM, mu, 1.0);
        let z = zero_pmf(&p, trunc()).unwrap();
        let delta = z.delta_star.unwrap();
        assert!(z.residual <= 1e-10, "d = {d}, mu = {mu}: residual {}", z.residual);
        assert!((z.density() - delta).abs() <= 1e-8 * delta.max(1.0));
        assert!(max_gradient(&p, &z.xi) <= 1e-8);
        if let SolutionDetail::Pmf { supercritical: false, .. } = z.detail {
            let h = pmf_consistency(&p, delta).unwrap().unwrap();
            assert!((h - delta).abs() <= 1e-10 * delta.max(1.0));
        }
    }
}

#[test]
fn pmf_density_saturates_at_the_critical_density() {
    let a = 1.0;
    let mut last = -1.0;
    for i in 0..=80 {
        let mu = -2.0 + 0.1 * i as f64;
        let z = zero_pmf(&ModelParams::pmf(3, BETA_NORM, mu, a), trunc()).unwrap();
        let d = z.delta_star.unwrap();
        assert!(d >= last - 1e-14, "delta decreased at mu = {mu}");
        if mu >= a * ZETA_3_2 {
            assert!((d - ZETA_3_2).abs() < 1e-12, "mu = {mu}: {d}");
        }
        last = d;
    }
}

// dense grid over [0, 2 q̄]^3 followed by two zooms around the best cell
fn grid_minimum(p: &ModelParams, upper: f64) -> f64 {
    let n = 48;
    let f = |x: [f64; 3]| {
        objective(p, &CycleCounts::from_values(x.to_vec()).unwrap())
            .unwrap()
            .to_f64()
    };
    let (mut lo, mut hi) = ([0.0; 3], [upper; 3]);
    let mut best = (f64::INFINITY, [0.0; 3]);
    for _ in 0..3 {
        let step: Vec<f64> = (0..3).map(|i| (hi[i] - lo[i]) / n as f64).collect();
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let x = [
                        lo[0] + i as f64 * step[0],
                        lo[1] + j as f64 * step[1],
                        lo[2] + k as f64 * step[2],
                    ];
                    let v = f(x);
                    if v < best.0 {
                        best = (v, x);
                    }
                }
            }
        }
        for i in 0..3 {
            lo[i] = (best.1[i] - 2.0 * step[i]).max(0.0);
            hi[i] = best.1[i] + 2.0 * step[i];
        }
    }
    best.0
}

#[test]
fn three_cycle_problems_match_grid_minimisation() {
    let cfg = HylSolverConfig::default();
    let cases = [
        ModelParams::pmf(3, BETA_NORM, 0.5, 1.0).with_cutoff(3),
        ModelParams::pmf(3, BETA_NORM, 3.0, 1.0).with_cutoff(3),
        ModelParams::cmf(3, BETA_NORM, -0.1, 2.0).with_cutoff(3),
        ModelParams::hyl(3, 1.0, 1.0, 1.0, 0.5).with_cutoff(3),
        ModelParams::hyl(3, BETA_NORM, 0.2, 1.0, 0.3).with_cutoff(3),
    ];
    for p in cases {
        let z = zero(&p, trunc(), &cfg).unwrap();
        let qbar = p.weights().qbar(0.0).unwrap().max(p.mu.max(0.0) / p.a);
        let g = grid_minimum(&p, 2.0 * qbar);
        assert!(g >= z.objective - 1e-10, "{p:?}: grid {g} below zero {}", z.objective);
        assert!(g - z.objective < 1e-4, "{p:?}: grid {g} vs zero {}", z.objective);
    }
}

#[test]
fn hyl_solutions_are_stationary_fixed_points() {
    let bs = beta_star(3, 1.0).unwrap();
    let p = ModelParams::hyl(3, 1.5 * bs, 300.0, 2.0, 1.0);
    let sols = hyl_solutions(&p, &HylSolverConfig::default(), trunc()).unwrap();
    assert!(sols.len() >= 2);
    let q = ModelParams::hyl(3, 1.5, 10.0, 1.0, 0.5);
    let lower = hyl_solutions(&q, &HylSolverConfig::default(), trunc()).unwrap();
    assert!(lower.iter().any(|s| s.chi.contains(&-1)));
    let all = sols.iter().map(|s| (&p, s)).chain(lower.iter().map(|s| (&q, s)));
    for (p, s) in all {
        let delta = s.delta_star.unwrap();
        assert!(s.residual <= 1e-10 * delta.max(1.0), "residual {}", s.residual);
        assert!((s.density() - delta).abs() <= 1e-8 * delta.max(1.0));
        // far entries underflow, their logarithms do not
        assert!(s.xi.values().iter().all(|&x| x >= 0.0));
        assert!(s.xi.log_values().unwrap().iter().all(|l| l.is_finite()));
        assert!(max_gradient(p, &s.xi) <= 1e-8, "chi = {:?}", s.chi);
    }
}

#[test]
fn lower_branch_entries_exceed_the_principal_ones() {
    let p = ModelParams::hyl(3, 1.5, 10.0, 1.0, 0.5);
    let sys = HylSystem::new(&p).unwrap();
    let sols = hyl_solutions(&p, &HylSolverConfig::default(), trunc()).unwrap();
    let mut checked = 0;
    for s in sols.iter().filter(|s| s.chi.contains(&-1)) {
        let delta = s.delta_star.unwrap();
        let base = sys.solution_at(delta, &[], trunc()).unwrap();
        for (j, &c) in s.chi.iter().enumerate() {
            if c == -1 {
                assert!(s.xi.values()[j] > base.xi.values()[j]);
                checked += 1;
            }
        }
    }
    assert!(checked > 0, "no solution with a lower-branch entry");
}

#[test]
fn case_split_agrees_at_the_kink() {
    let p = ModelParams::hyl(3, 1.0, 2.0, 1.0, 0.4);
    let sys = HylSystem::new(&p).unwrap();
    let k = sys.kink();
    assert_eq!(sys.eta(k), 0.0);
    let eps = 1e-9;
    assert!(sys.eta(k * (1.0 + eps)).abs() < 1e-8);
    assert!(sys.eta(k * (1.0 - eps)).abs() < 1e-8);
    // both one-sided objectives approach the kink value; dρ/dη diverges at
    // η = 0 in d = 3, so the gap closes like sqrt(ε)
    let o = sys.objective_at(k, &[]).unwrap();
    let gap = |e: f64| {
        let l = sys.objective_at(k * (1.0 - e), &[]).unwrap();
        let r = sys.objective_at(k * (1.0 + e), &[]).unwrap();
        (l - o).abs().max((r - o).abs())
    };
    let (g6, g10) = (gap(1e-6), gap(1e-10));
    assert!(g10 < 1e-5);
    assert!(g10 < g6 / 30.0, "{g6} {g10}");
}

#[test]
fn fold_region_reports_non_uniqueness_or_several_families() {
    let bs = beta_star(3, 1.0).unwrap();
    let p = ModelParams::hyl(3, bs, 0.0, 2.0, 1.0);
    let sys = HylSystem::new(&p).unwrap();
    let mu_bar = sys.mu_bar().unwrap();
    let cfg = HylSolverConfig::default();
    let grid: Vec<f64> = (0..=40).map(|i| 0.3 * mu_bar + 0.8 * mu_bar * i as f64 / 40.0).collect();
    let scan = hyl_family_scan(&p, &grid, &cfg).unwrap();
    assert!(scan.max_count() >= 2);
    let (lo, hi) = (scan.mu_lower.unwrap(), scan.mu_upper.unwrap());
    assert!(lo < hi && hi <= mu_bar * (1.0 + 1e-9));
    let inside = (lo + hi) / 2.0;
    let sols = hyl_solutions(&p.with_mu(inside), &cfg, trunc()).unwrap();
    let families = sols.iter().filter(|s| s.chi.iter().all(|&c| c == 0)).count();
    assert!(families >= 2);
    assert!(sols.iter().all(|s| !s.unique));
}

#[test]
fn hyl_with_b_zero_is_pmf() {
    let p = ModelParams::hyl(3, BETA_NORM, 1.5, 1.0, 0.0);
    let h = zero_hyl(&p, &HylSolverConfig::default(), trunc()).unwrap();
    let q = zero_pmf(&ModelParams::pmf(3, BETA_NORM, 1.5, 1.0), trunc()).unwrap();
    assert_eq!(h.delta_star, q.delta_star);
}

#[test]
fn hyl_low_dimension_needs_a_cutoff() {
    let p = ModelParams::hyl(2, 1.0, 1.0, 1.0, 0.5);
    assert!(zero_hyl(&p, &HylSolverConfig::default(), trunc()).is_err());
    assert!(zero_hyl(&p.with_cutoff(20), &HylSolverConfig::default(), trunc()).is_ok());
}

#[test]
fn solver_config_validation() {
    let bad = HylSolverConfig { delta_grid: 4, ..Default::default() };
    assert!(bad.validate().is_err());
    let cfg = HylSolverConfig { chi_prefix: 3, chi_support_max: 2, ..Default::default() };
    // empty support, three singletons, three pairs
    assert_eq!(cfg.chi_sets().len(), 7);
    assert!(cfg.chi_sets()[0].is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pmf_residual_and_stationarity(mu in -3.0f64..6.0, a in 0.2f64..3.0, beta in 0.05f64..2.0, d in 1u32..6) {
        let p = ModelParams::pmf(d, beta, mu, a);
        let z = zero_pmf(&p, trunc()).unwrap();
        let delta = z.delta_star.unwrap();
        prop_assert!(z.residual <= 1e-10 * delta.max(1.0));
        prop_assert!((z.density() - delta).abs() <= 1e-8 * delta.max(1.0));
        prop_assert!(max_gradient(&p, &z.xi) <= 1e-8);
    }

    #[test]
    fn alpha_shift_leaves_zeros_unchanged(mu in -1.0f64..3.0, alpha in -2.0f64..0.0) {
        let p = ModelParams::pmf(3, 0.5, mu, 1.0);
        let shifted = p.with_mu(mu - alpha).with_alpha(alpha);
        let (x, y) = (zero_pmf(&p, trunc()).unwrap(), zero_pmf(&shifted, trunc()).unwrap());
        prop_assert!((x.delta_star.unwrap() - y.delta_star.unwrap()).abs() <= 1e-12 * x.delta_star.unwrap().max(1.0));
    }

    #[test]
    fn hyl_zero_minimises_over_its_candidates(mu in 0.0f64..3.0, bf in 0.1f64..0.9) {
        let p = ModelParams::hyl(3, 0.4, mu, 1.0, bf);
        let cfg = HylSolverConfig::default();
        let sols = hyl_solutions(&p, &cfg, trunc()).unwrap();
        let z = zero_hyl(&p, &cfg, trunc()).unwrap();
        for s in &sols {
            prop_assert!(z.objective <= s.objective + 1e-12 * s.objective.abs().max(1.0));
        }
    }
}
