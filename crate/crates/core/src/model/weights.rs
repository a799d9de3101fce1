use super::params::ModelParams;
use crate::error::{domain, Result};
use crate::ext::ExtReal;
use crate::specfun::bose_g;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The cycle weights `q_k^{(η)} = e^{βηk} / ((4πβ)^{d/2} k^{1+d/2})`.
///
/// With a cutoff the weights vanish for `k > cutoff` and every sum becomes a
/// finite one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSeq {
    d: u32,
    beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cutoff: Option<usize>,
}

impl WeightSeq {
    pub fn new(d: u32, beta: f64) -> Result<Self> {
        if d == 0 || !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!("weights need d >= 1 and beta > 0, got d = {d}, beta = {beta}")));
        }
        Ok(WeightSeq { d, beta, cutoff: None })
    }

    pub(crate) fn from_params(p: &ModelParams) -> Self {
        WeightSeq {
            d: p.d,
            beta: p.beta,
            cutoff: p.k_cut,
        }
    }

    pub fn with_cutoff(mut self, k: usize) -> Self {
        self.cutoff = Some(k);
        self
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cutoff(&self) -> Option<usize> {
        self.cutoff
    }

    /// `d/2`
    pub fn half_d(&self) -> f64 {
        0.5 * self.d as f64
    }

    /// `(4πβ)^{-d/2}`
    pub fn prefactor(&self) -> f64 {
        self.ln_prefactor().exp()
    }

    pub fn ln_prefactor(&self) -> f64 {
        -self.half_d() * (4.0 * PI * self.beta).ln()
    }

    /// `q_k^{(η)}`; no domain check, zero beyond the cutoff.
    pub fn q(&self, k: usize, eta: f64) -> f64 {
        self.ln_q(k, eta).exp()
    }

    /// `ln q_k^{(η)}`, which stays finite where `q_k` underflows.
    pub fn ln_q(&self, k: usize, eta: f64) -> f64 {
        if matches!(self.cutoff, Some(c) if k > c) {
            return f64::NEG_INFINITY;
        }
        let kf = k as f64;
        self.beta * eta * kf + self.ln_prefactor() - (1.0 + self.half_d()) * kf.ln()
    }

    /// `Σ_k k^p q_k^{(η)}`.
    ///
    /// Without a cutoff this is `(4πβ)^{-d/2} g(1 + d/2 - p, -βη)`, which is
    /// infinite when `η = 0` and `p ≥ d/2`.
    pub fn moment(&self, p: f64, eta: f64) -> Result<ExtReal> {
        if eta > 0.0 || eta.is_nan() {
            return Err(domain(format!("weights need eta <= 0, got {eta}")));
        }
        if let Some(c) = self.cutoff {
            let s: f64 = (1..=c)
                .rev()
                .map(|k| (self.ln_q(k, eta) + p * (k as f64).ln()).exp())
                .sum();
            return Ok(ExtReal::Finite(s));
        }
        let g = bose_g(1.0 + self.half_d() - p, -self.beta * eta)?;
        Ok(match g {
            ExtReal::Finite(v) => ExtReal::Finite(v * self.prefactor()),
            other => other,
        })
    }

    /// `q̄^{(η)} = Σ_k q_k^{(η)}`, always finite.
    pub fn qbar(&self, eta: f64) -> Result<f64> {
        Ok(self.moment(0.0, eta)?.to_f64())
    }

    /// Particle density `Σ_k k q_k^{(η)}` of the ideal gas.
    pub fn density(&self, eta: f64) -> Result<ExtReal> {
        self.moment(1.0, eta)
    }

    /// `ρ_c = ζ(d/2) / (4πβ)^{d/2}`, infinite for `d ≤ 2` (without cutoff).
    pub fn critical_density(&self) -> ExtReal {
        self.moment(1.0, 0.0).expect("eta = 0 is admissible")
    }
}

/// `q_k^{(η)}` with domain checks.
///
/// ```
/// use bosegas::model::{cycle_weight, WeightSeq};
///
/// let w = WeightSeq::new(3, bosegas::BETA_NORM).unwrap();
/// assert!((cycle_weight(&w, 4, 0.0).unwrap() - 1.0 / 32.0).abs() < 1e-16);
/// ```
pub fn cycle_weight(w: &WeightSeq, k: usize, eta: f64) -> Result<f64> {
    if k == 0 {
        return Err(domain("cycle lengths start at 1"));
    }
    if eta > 0.0 || eta.is_nan() {
        return Err(domain(format!("weights need eta <= 0, got {eta}")));
    }
    Ok(w.q(k, eta))
}

/// `q̄^{(η)}`.
pub fn qbar(w: &WeightSeq, eta: f64) -> Result<f64> {
    w.qbar(eta)
}
