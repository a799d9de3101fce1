use super::Tilt;
use crate::error::{domain, Error, Result};
use crate::model::{Model, ModelParams};
use serde::Serialize;

const MAX_STATES: usize = 1_000_000;

/// Exact law of the count vector on the box `0 ≤ N_k ≤ n_cap`, `k ≤ k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactTable {
    pub volume: f64,
    pub k_max: usize,
    pub n_cap: u32,
    /// States in mixed-radix order, `N_1` varying fastest.
    pub states: Vec<Vec<u32>>,
    /// Ideal: the exact Poisson probabilities, summing to `1 - outside_mass`.
    /// Tilted: the law conditioned on the box.
    pub prob: Vec<f64>,
    /// Reference mass outside the box (ideal only).
    pub outside_mass: Option<f64>,
    /// Mass of the states with some `N_k = n_cap`.
    pub boundary_mass: f64,
}

impl ExactTable {
    pub fn index(&self, counts: &[u32]) -> Option<usize> {
        state_index(counts, self.n_cap)
    }

    /// Law of `N_k` (`k` starting at 1).
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let mut m = vec![0.0; self.n_cap as usize + 1];
        for (s, p) in self.states.iter().zip(&self.prob) {
            m[s[k - 1] as usize] += p;
        }
        m
    }

    /// The most likely state.
    pub fn mode(&self) -> &[u32] {
        let i = (0..self.prob.len())
            .max_by(|&x, &y| self.prob[x].partial_cmp(&self.prob[y]).unwrap())
            .unwrap();
        &self.states[i]
    }
}

fn state_index(counts: &[u32], n_cap: u32) -> Option<usize> {
    let r = n_cap as usize + 1;
    let mut idx = 0;
    for &c in counts.iter().rev() {
        if c > n_cap {
            return None;
        }
        idx = idx * r + c as usize;
    }
    Some(idx)
}

fn enumerate(k_max: usize, n_cap: u32) -> Result<Vec<Vec<u32>>> {
    if k_max == 0 || k_max > 3 {
        return Err(Error::Size(format!("exact enumeration needs 1 <= k_max <= 3, got {k_max}")));
    }
    let r = n_cap as usize + 1;
    let total = r
        .checked_pow(k_max as u32)
        .filter(|&t| t <= MAX_STATES)
        .ok_or_else(|| Error::Size(format!("(n_cap + 1)^k_max exceeds {MAX_STATES} states")))?;
    Ok((0..total)
        .map(|mut i| {
            (0..k_max)
                .map(|_| {
                    let c = (i % r) as u32;
                    i /= r;
                    c
                })
                .collect()
        })
        .collect())
}

fn sums(s: &[u32]) -> (f64, f64, f64) {
    s.iter().enumerate().fold((0.0, 0.0, 0.0), |(a, b, c), (i, &n)| {
        let (k, n) = ((i + 1) as f64, n as f64);
        (a + n, b + k * n, c + k * k * n * n)
    })
}

/// Exact probabilities of all count vectors with entries `≤ n_cap`.
///
/// The ideal model uses the Poisson law at `q^{(μ+α)}`; the other models
/// tilt their reference by `exp(-βV H)` and are normalised on the box.
///
/// ```
/// use bosegas::sim::bruteforce_measure;
/// use bosegas::ModelParams;
///
/// let p = ModelParams::ideal(3, bosegas::BETA_NORM, 0.0);
/// let t = bruteforce_measure(&p, 1.0, 2, 30).unwrap();
/// let total: f64 = t.prob.iter().sum();
/// assert!((total + t.outside_mass.unwrap() - 1.0).abs() < 1e-14);
/// ```
pub fn bruteforce_measure(p: &ModelParams, volume: f64, k_max: usize, n_cap: u32) -> Result<ExactTable> {
    p.validate()?;
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(domain(format!("volume must be positive, got {volume}")));
    }
    let states = enumerate(k_max, n_cap)?;
    let tilt = Tilt::new(p, volume, k_max);
    // ln n! for n ≤ n_cap
    let mut ln_fact = vec![0.0; n_cap as usize + 1];
    for n in 1..ln_fact.len() {
        ln_fact[n] = ln_fact[n - 1] + (n as f64).ln();
    }
    let lam: Vec<f64> = tilt.ln_lambda.iter().map(|l| l.exp()).collect();
    let ln_w: Vec<f64> = states
        .iter()
        .map(|s| {
            let mut lw = 0.0;
            for (i, &n) in s.iter().enumerate() {
                lw += if n == 0 {
                    -lam[i]
                } else {
                    n as f64 * tilt.ln_lambda[i] - lam[i] - ln_fact[n as usize]
                };
            }
            let (s0, s1, s2) = sums(s);
            lw - tilt.energy(s0, s1, s2)
        })
        .collect();
    let ideal = p.model == Model::Ideal;
    let prob: Vec<f64> = if ideal {
        ln_w.iter().map(|l| l.exp()).collect()
    } else {
        let m = ln_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = ln_w.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let outside_mass = ideal.then(|| {
        // 1 - Π_k P(N_k ≤ n_cap), summed from the upper tail of each factor
        let inside: f64 = lam
            .iter()
            .map(|&l| {
                let mut term = (-l).exp();
                let mut cdf = term;
                for n in 1..=n_cap {
                    term *= l / n as f64;
                    cdf += term;
                }
                cdf.min(1.0)
            })
            .product();
        (1.0 - inside).max(0.0)
    });
    let boundary_mass = states
        .iter()
        .zip(&prob)
        .filter(|(s, _)| s.contains(&n_cap))
        .map(|(_, p)| p)
        .sum();
    Ok(ExactTable {
        volume,
        k_max,
        n_cap,
        states,
        prob,
        outside_mass,
        boundary_mass,
    })
}

/// The Metropolis–Hastings kernel of [`super::sample_tilted`] restricted to
/// the box `N_k ≤ n_cap`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionMatrix {
    pub states: Vec<Vec<u32>>,
    /// Off-diagonal entries `(i, j, P_ij)` between states in the box.
    pub entries: Vec<(usize, usize, f64)>,
    /// `P_ii`: rejections plus nothing else (moves out of the box are not
    /// counted here, so rows on the boundary sum to less than one).
    pub stay: Vec<f64>,
}

impl TransitionMatrix {
    /// `max |π_i P_ij - π_j P_ji|` over the stored entries.
    pub fn detailed_balance_error(&self, pi: &[f64]) -> f64 {
        let mut map = std::collections::HashMap::new();
        for &(i, j, v) in &self.entries {
            map.insert((i, j), v);
        }
        self.entries
            .iter()
            .map(|&(i, j, v)| {
                let back = map.get(&(j, i)).copied().unwrap_or(0.0);
                (pi[i] * v - pi[j] * back).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Builds the transition matrix of the chain over the states of the box.
pub fn transition_matrix(p: &ModelParams, volume: f64, k_max: usize, n_cap: u32) -> Result<TransitionMatrix> {
    p.validate()?;
    if !(volume > 0.0) || !volume.is_finite() {
        return Err(domain(format!("volume must be positive, got {volume}")));
    }
    let states = enumerate(k_max, n_cap)?;
    let tilt = Tilt::new(p, volume, k_max);
    let mut entries = Vec::new();
    let mut stay = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        let (s0, s1, _) = sums(s);
        let mut out = 0.0;
        for (k, up, prob) in tilt.moves(s, s0, s1) {
            let mut t = s.clone();
            t[k] = if up { t[k] + 1 } else { t[k] - 1 };
            out += prob;
            if let Some(j) = state_index(&t, n_cap) {
                entries.push((i, j, prob));
            }
        }
        stay.push(1.0 - out);
    }
    Ok(TransitionMatrix { states, entries, stay })
}

/// A sup-norm ball `{λ : max_k |λ_k - center_k| ≤ radius}` in `k_max =
/// center.len()` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(&self.center).all(|(a, c)| (a - c).abs() <= self.radius)
    }
}

/// One finite-volume rate estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub volume: f64,
    /// `-ln P(ball) / V`.
    pub rate: f64,
    pub probability: f64,
    pub n_cap: u32,
}

/// `-ln P(λ ∈ ball) / V` from exact enumeration, for each volume.
///
/// The box size is chosen to contain the ball and the bulk of the reference
/// law. A ball with zero mass is an error.
pub fn empirical_rate(p: &ModelParams, volumes: &[f64], ball: &Ball) -> Result<Vec<RatePoint>> {
    p.validate()?;
    let k_max = ball.center.len();
    if !(ball.radius > 0.0) {
        return Err(domain("ball radius must be positive"));
    }
    let tilt = Tilt::new(p, 1.0, k_max);
    volumes
        .iter()
        .map(|&v| {
            let cap = ball
                .center
                .iter()
                .zip(&tilt.ln_lambda)
                .map(|(c, l)| {
                    let m = v * l.exp();
                    (v * (c + ball.radius)).ceil().max((m + 12.0 * m.sqrt() + 12.0).ceil())
                })
                .fold(1.0, f64::max) as u32;
            let t = bruteforce_measure(p, v, k_max, cap)?;
            let prob: f64 = t
                .states
                .iter()
                .zip(&t.prob)
                .filter(|(s, _)| {
                    let x: Vec<f64> = s.iter().map(|&n| n as f64 / v).collect();
                    ball.contains(&x)
                })
                .map(|(_, p)| p)
                .sum();
            if !(prob > 0.0) {
                return Err(domain(format!("ball has zero mass at volume {v}")));
            }
            Ok(RatePoint {
                volume: v,
                rate: -prob.ln() / v,
                probability: prob,
                n_cap: cap,
            })
        })
        .collect()
}
