//! Monte Carlo and exact checks of the cycle-count laws.
//!
//! At volume `V` the reference process has independent counts
//! `N_k ~ Poisson(V q_k)` for `k = 1..k_max`, and `λ_k = N_k / V`. The
//! interacting gases reweight it by `exp(-βV H(λ))`. [`sample_ideal`] draws
//! the reference counts directly, [`sample_tilted`] runs Metropolis–Hastings
//! chains on the count vectors, and [`bruteforce_measure`] enumerates small
//! state spaces exactly.
//!
//! Every run uses `ChaCha8` streams keyed by `(seed, chain index)`, so results
//! do not depend on the number of threads.

mod exact;

pub use exact::{bruteforce_measure, empirical_rate, transition_matrix, Ball, ExactTable, RatePoint, TransitionMatrix};

use crate::error::{domain, Result};
use crate::ext::ExtReal;
use crate::model::{reference_eta, tail_sum, Model, ModelParams, WeightSeq};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

// batches per chain for the batch-means standard error
const BATCHES: usize = 25;

/// Settings of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    /// `|Λ_N|`.
    pub volume: f64,
    /// Longest simulated cycle.
    pub k_max: usize,
    /// Recorded samples over all chains. For chains a sample is taken after
    /// every sweep of `k_max` proposals.
    pub n_samples: usize,
    /// Discarded sweeps at the start of each chain.
    pub burn_in: usize,
    pub seed: u64,
    /// Independent chains (or sample streams for [`sample_ideal`]).
    pub chains: usize,
    /// Keep a histogram of the visited count vectors.
    #[serde(default)]
    pub record_states: bool,
}

impl SimConfig {
    pub fn new(params: ModelParams, volume: f64, k_max: usize, n_samples: usize) -> Self {
        SimConfig {
            params,
            volume,
            k_max,
            n_samples,
            burn_in: 10_000,
            seed: 0,
            chains: 4,
            record_states: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.volume > 0.0) || !self.volume.is_finite() {
            return Err(domain(format!("volume must be positive, got {}", self.volume)));
        }
        if self.k_max == 0 || self.n_samples == 0 || self.chains == 0 {
            return Err(domain("k_max, n_samples and chains must be at least 1"));
        }
        if self.chains > self.n_samples {
            return Err(domain("more chains than samples"));
        }
        Ok(())
    }

    fn per_chain(&self, c: usize) -> usize {
        self.n_samples / self.chains + usize::from(c < self.n_samples % self.chains)
    }
}

/// Reference mass beyond `k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    /// `V Σ_{k > k_max} q_k`: expected number of longer cycles, and so a bound
    /// on the probability that any occurs.
    pub expected_cycles: f64,
    /// `Σ_{k > k_max} k q_k`, the expected density they would carry.
    pub density: f64,
}

/// Output of a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    /// Empirical mean of `λ_k`, `k = 1..k_max`.
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    /// Empirical variance of `λ_k`.
    pub variance: Vec<f64>,
    /// Mean and standard error of `Σ_k λ_k`.
    pub total: (f64, f64),
    /// Mean and standard error of `Σ_k k λ_k`.
    pub density: (f64, f64),
    /// Accepted fraction of proposals (chains only).
    pub acceptance_rate: Option<f64>,
    /// Smallest effective sample size over `k` and the two sums.
    pub ess: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub tail: TailBound,
    /// `hist_n1[n]` counts samples with `N_1 = n`.
    pub hist_n1: Vec<u64>,
    /// Visited count vectors and their frequencies, when recorded.
    pub states: Option<Vec<(Vec<u32>, u64)>>,
}

impl SimEstimate {
    /// `(mean_k - target_k) / stderr_k` for the first `target.len()` lengths.
    pub fn z_scores(&self, target: &[f64]) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.stderr)
            .zip(target)
            .map(|((m, s), t)| (m - t) / s)
            .collect()
    }
}

pub(crate) fn tail_bound(w: &WeightSeq, eta: f64, k_max: usize, volume: f64) -> TailBound {
    let direct = |p: f64, upto: usize| -> f64 {
        (k_max + 1..=upto)
            .map(|k| (w.ln_q(k, eta) + p * (k as f64).ln()).exp())
            .sum()
    };
    let (cycles, density) = match w.cutoff() {
        Some(c) => (direct(0.0, c), direct(1.0, c)),
        None => {
            let s = 1.0 + w.half_d();
            let alpha = -w.beta() * eta;
            let f = |v: ExtReal| v.to_f64() * w.prefactor();
            (f(tail_sum(s, alpha, k_max)), f(tail_sum(s - 1.0, alpha, k_max)))
        }
    };
    TailBound {
        expected_cycles: volume * cycles,
        density,
    }
}

// running statistics of one chain or stream
#[derive(Clone)]
struct Accum {
    k_max: usize,
    n: usize,
    batch_len: usize,
    // per observable (λ_1..λ_kmax, total, density): sum, sum of squares,
    // current batch sum, finished batch means
    sum: Vec<f64>,
    sq: Vec<f64>,
    batch: Vec<f64>,
    batch_means: Vec<Vec<f64>>,
    hist_n1: Vec<u64>,
    states: Option<std::collections::BTreeMap<Vec<u32>, u64>>,
}

impl Accum {
    fn new(k_max: usize, n: usize, record: bool) -> Self {
        let m = k_max + 2;
        Accum {
            k_max,
            n: 0,
            batch_len: (n / BATCHES).max(1),
            sum: vec![0.0; m],
            sq: vec![0.0; m],
            batch: vec![0.0; m],
            batch_means: vec![Vec::new(); m],
            hist_n1: Vec::new(),
            states: record.then(Default::default),
        }
    }

    fn push(&mut self, counts: &[u32], volume: f64) {
        let mut total = 0.0;
        let mut dens = 0.0;
        for (i, &c) in counts.iter().enumerate() {
            let l = c as f64 / volume;
            total += l;
            dens += (i + 1) as f64 * l;
            self.add(i, l);
        }
        self.add(self.k_max, total);
        self.add(self.k_max + 1, dens);
        self.n += 1;
        if self.n % self.batch_len == 0 {
            for j in 0..self.batch.len() {
                self.batch_means[j].push(self.batch[j] / self.batch_len as f64);
                self.batch[j] = 0.0;
            }
        }
        let n1 = counts[0] as usize;
        if self.hist_n1.len() <= n1 {
            self.hist_n1.resize(n1 + 1, 0);
        }
        self.hist_n1[n1] += 1;
        if let Some(s) = self.states.as_mut() {
            *s.entry(counts.to_vec()).or_insert(0) += 1;
        }
    }

    fn add(&mut self, j: usize, v: f64) {
        self.sum[j] += v;
        self.sq[j] += v * v;
        self.batch[j] += v;
    }
}

// combines per-chain accumulators in chain order
fn combine(chains: Vec<Accum>, iid: bool, accepted: Option<(u64, u64)>, cfg: &SimConfig, tail: TailBound) -> SimEstimate {
    let m = cfg.k_max + 2;
    let n: usize = chains.iter().map(|c| c.n).sum();
    let nf = n as f64;
    let mut mean = vec![0.0; m];
    let mut var = vec![0.0; m];
    let mut err = vec![0.0; m];
    for j in 0..m {
        let s: f64 = chains.iter().map(|c| c.sum[j]).sum();
        let sq: f64 = chains.iter().map(|c| c.sq[j]).sum();
        mean[j] = s / nf;
        var[j] = if n > 1 {
            ((sq - s * mean[j]) / (nf - 1.0)).max(0.0)
        } else {
            0.0
        };
        err[j] = if iid {
            (var[j] / nf).sqrt()
        } else {
            // variance of each chain mean from its batch means
            let mut v = 0.0;
            for c in &chains {
                let b = &c.batch_means[j];
                let cn = c.n as f64;
                if b.len() < 2 {
                    v += cn * var[j];
                    continue;
                }
                let bm = b.iter().sum::<f64>() / b.len() as f64;
                let bv = b.iter().map(|x| (x - bm) * (x - bm)).sum::<f64>() / (b.len() - 1) as f64;
                // Var(chain mean) ≈ bv / #batches; weight by (n_c / n)^2
                v += cn * cn * bv / b.len() as f64;
            }
            (v / (nf * nf)).sqrt()
        };
    }
    let ess = (0..m)
        .filter(|&j| err[j] > 0.0)
        .map(|j| var[j] / (err[j] * err[j]))
        .fold(f64::INFINITY, f64::min);
    let mut hist_n1: Vec<u64> = Vec::new();
    for c in &chains {
        if hist_n1.len() < c.hist_n1.len() {
            hist_n1.resize(c.hist_n1.len(), 0);
        }
        for (h, v) in hist_n1.iter_mut().zip(&c.hist_n1) {
            *h += v;
        }
    }
    let states = if cfg.record_states {
        let mut all = std::collections::BTreeMap::new();
        for c in &chains {
            for (s, v) in c.states.as_ref().unwrap() {
                *all.entry(s.clone()).or_insert(0) += v;
            }
        }
        Some(all.into_iter().collect())
    } else {
        None
    };
    let k = cfg.k_max;
    SimEstimate {
        mean: mean[..k].to_vec(),
        stderr: err[..k].to_vec(),
        variance: var[..k].to_vec(),
        total: (mean[k], err[k]),
        density: (mean[k + 1], err[k + 1]),
        acceptance_rate: accepted.map(|(a, p)| if p == 0 { 0.0 } else { a as f64 / p as f64 }),
        ess: if ess.is_finite() { ess } else { nf },
        n_samples: n,
        seed: cfg.seed,
        tail,
        hist_n1,
        states,
    }
}

fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Independent draws of the reference counts `N_k ~ Poisson(V q_k^{(μ+α)})`.
///
/// ```
/// use bosegas::sim::{sample_ideal, SimConfig};
/// use bosegas::ModelParams;
///
/// let p = ModelParams::ideal(3, bosegas::BETA_NORM, -0.5);
/// let est = sample_ideal(&SimConfig::new(p, 100.0, 4, 2000)).unwrap();
/// let q1 = p.weights().q(1, -0.5);
/// assert!((est.mean[0] - q1).abs() < 5.0 * est.stderr[0]);
/// ```
pub fn sample_ideal(cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let mu = cfg.params.mu_eff();
    if mu > 0.0 {
        return Err(domain(format!("ideal sampling needs mu + alpha <= 0, got {mu}")));
    }
    let w = cfg.params.weights();
    let lambdas: Vec<f64> = (1..=cfg.k_max).map(|k| cfg.volume * w.q(k, mu)).collect();
    let chains: Vec<Accum> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let n = cfg.per_chain(c);
            let mut rng = chain_rng(cfg.seed, c);
            let dists: Vec<Option<Poisson<f64>>> =
                lambdas.iter().map(|&l| if l > 0.0 { Poisson::new(l).ok() } else { None }).collect();
            let mut acc = Accum::new(cfg.k_max, n, cfg.record_states);
            let mut counts = vec![0u32; cfg.k_max];
            for _ in 0..n {
                for (x, d) in counts.iter_mut().zip(&dists) {
                    *x = d.as_ref().map_or(0, |d| d.sample(&mut rng) as u32);
                }
                acc.push(&counts, cfg.volume);
            }
            acc
        })
        .collect();
    Ok(combine(chains, true, None, cfg, tail_bound(&w, mu, cfg.k_max, cfg.volume)))
}

/// `β V H` of the tilted measure as a function of the count vector, with the
/// reference intensities it multiplies.
#[derive(Debug, Clone)]
pub(crate) struct Tilt {
    model: Model,
    beta: f64,
    mu: f64,
    a: f64,
    b: f64,
    volume: f64,
    pub(crate) ln_lambda: Vec<f64>,
}

impl Tilt {
    pub(crate) fn new(p: &ModelParams, volume: f64, k_max: usize) -> Self {
        let p = p.reduced();
        let w = p.weights();
        let eta = reference_eta(&p);
        Tilt {
            model: p.model,
            beta: p.beta,
            mu: p.mu,
            a: p.a,
            b: p.b,
            volume,
            ln_lambda: (1..=k_max).map(|k| volume.ln() + w.ln_q(k, eta)).collect(),
        }
    }

    /// `βV H` at counts with `S0 = Σ N_k`, `S1 = Σ k N_k`, `S2 = Σ k^2 N_k^2`.
    pub(crate) fn energy(&self, s0: f64, s1: f64, s2: f64) -> f64 {
        let v = self.volume;
        let bt = self.beta;
        match self.model {
            Model::Ideal => 0.0,
            Model::Cmf => bt * self.a * s0 * s0 / (2.0 * v),
            Model::Pmf => bt * (-self.mu * s1 + self.a * s1 * s1 / (2.0 * v)),
            Model::Hyl => bt * (-self.mu * s1 + self.a * s1 * s1 / (2.0 * v) - self.b * s2 / (2.0 * v)),
        }
    }

    // change of βV H when N_k goes to N_k + s (s = ±1)
    fn delta(&self, k: usize, nk: f64, s: f64, s0: f64, s1: f64) -> f64 {
        let v = self.volume;
        let kf = k as f64;
        let bt = self.beta;
        match self.model {
            Model::Ideal => 0.0,
            Model::Cmf => bt * self.a * (2.0 * s * s0 + 1.0) / (2.0 * v),
            Model::Pmf | Model::Hyl => {
                let mut e = bt * (-self.mu * s * kf + self.a * (2.0 * s * kf * s1 + kf * kf) / (2.0 * v));
                if self.model == Model::Hyl {
                    e -= bt * self.b * kf * kf * (2.0 * nk * s + 1.0) / (2.0 * v);
                }
                e
            }
        }
    }

    /// Proposals from `counts`: `(k, up, probability of proposing and
    /// accepting)` for every move with nonzero probability. `s0` and `s1`
    /// are the running sums of `counts`.
    pub(crate) fn moves(&self, counts: &[u32], s0: f64, s1: f64) -> Vec<(usize, bool, f64)> {
        let kn = counts.len() as f64;
        let mut out = Vec::with_capacity(2 * counts.len());
        for (i, &n) in counts.iter().enumerate() {
            if n == 0 {
                out.push((i, true, self.accept(i, n, true, s0, s1) / kn));
            } else {
                out.push((i, true, 0.5 * self.accept(i, n, true, s0, s1) / kn));
                out.push((i, false, 0.5 * self.accept(i, n, false, s0, s1) / kn));
            }
        }
        out
    }

    /// Metropolis–Hastings acceptance probability of `N_{i+1} → N_{i+1} ± 1`.
    pub(crate) fn accept(&self, i: usize, n: u32, up: bool, s0: f64, s1: f64) -> f64 {
        self.ln_ratio(i, n, up, s0, s1).exp().min(1.0)
    }

    fn ln_ratio(&self, i: usize, n: u32, up: bool, s0: f64, s1: f64) -> f64 {
        let nf = n as f64;
        let k = i + 1;
        if up {
            // Poisson ratio λ/(n+1); from 0 the reverse move has proposal 1/2
            let h = if n == 0 { -std::f64::consts::LN_2 } else { 0.0 };
            self.ln_lambda[i] - (nf + 1.0).ln() - self.delta(k, nf, 1.0, s0, s1) + h
        } else {
            let h = if n == 1 { std::f64::consts::LN_2 } else { 0.0 };
            nf.ln() - self.ln_lambda[i] - self.delta(k, nf, -1.0, s0, s1) + h
        }
    }
}

/// Metropolis–Hastings sampling of a tilted measure
/// `exp(-βV H(λ)) ν(dλ) / Z` on `k = 1..k_max`.
///
/// The reference `ν` has intensities `V q_k^{(μ+α)}` for CMF and
/// `V q_k^{(0)}` for PMF and HYL, whose Hamiltonians carry `μ + α`. Each step
/// picks `k` uniformly and proposes `N_k ± 1` (always `+1` from `0`).
/// Chains start from rounded reference means.
pub fn sample_tilted(cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    if cfg.params.model == Model::Ideal {
        return Err(domain("tilted sampling needs the CMF, PMF or HYL model"));
    }
    let p = cfg.params.reduced();
    let tilt = Tilt::new(&p, cfg.volume, cfg.k_max);
    let k_max = cfg.k_max;
    let results: Vec<(Accum, u64, u64)> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| {
            let n = cfg.per_chain(c);
            let mut rng = chain_rng(cfg.seed, c);
            let mut counts: Vec<u32> = tilt.ln_lambda.iter().map(|l| l.exp().round() as u32).collect();
            let mut s0: f64 = counts.iter().map(|&x| x as f64).sum();
            let mut s1: f64 = counts.iter().enumerate().map(|(i, &x)| (i + 1) as f64 * x as f64).sum();
            let mut acc = Accum::new(k_max, n, cfg.record_states);
            let (mut accepted, mut proposed) = (0u64, 0u64);
            for sweep in 0..cfg.burn_in + n {
                for _ in 0..k_max {
                    let i = rng.random_range(0..k_max);
                    let nk = counts[i];
                    let up = nk == 0 || rng.random::<bool>();
                    let lr = tilt.ln_ratio(i, nk, up, s0, s1);
                    let ok = lr >= 0.0 || rng.random::<f64>() < lr.exp();
                    if sweep >= cfg.burn_in {
                        proposed += 1;
                        accepted += u64::from(ok);
                    }
                    if ok {
                        let s = if up { 1.0 } else { -1.0 };
                        counts[i] = if up { nk + 1 } else { nk - 1 };
                        s0 += s;
                        s1 += s * (i + 1) as f64;
                    }
                }
                if sweep >= cfg.burn_in {
                    acc.push(&counts, cfg.volume);
                }
            }
            (acc, accepted, proposed)
        })
        .collect();
    let accepted = results.iter().map(|r| r.1).sum();
    let proposed = results.iter().map(|r| r.2).sum();
    let chains = results.into_iter().map(|r| r.0).collect();
    let w = p.weights();
    let tail = tail_bound(&w, reference_eta(&p), k_max, cfg.volume);
    Ok(combine(chains, false, Some((accepted, proposed)), cfg, tail))
}
