//! Zeros of the rate functions.
//!
//! The ideal and CMF zeros are closed forms, the PMF zero solves a monotone
//! one-dimensional equation, and HYL zeros are found by scanning
//! `δ = g^χ(δ)` over branch vectors `χ` and picking the smallest objective.
//!
//! Every zero is returned as a [`CycleCounts`] with `k_max` explicit entries
//! (see [`Truncation`]) and an analytic tail, so its density, cycle number
//! and rate are exact sums.

mod hyl;
mod pmf;
mod roots;

pub use hyl::{
    beta_star, hyl_family_scan, hyl_solutions, zero_hyl, FamilyPoint, FamilyScan, HylSolverConfig, HylSystem,
};
pub use pmf::{pmf_consistency, zero_pmf};
pub(crate) use hyl::select_min;
pub(crate) use roots::bisect_increasing as roots_bisect;

use crate::error::{domain, Result};
use crate::model::{objective, CycleCounts, Model, ModelParams, TailPolicy};
use crate::specfun::{lambert_w, WBranch};
use serde::Serialize;

/// How many entries of a zero are stored explicitly.
///
/// Models with a cutoff (`ModelParams::k_cut`) ignore this and store all
/// `k_cut` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub k_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { k_max: 4096 }
    }
}

impl Truncation {
    pub fn new(k_max: usize) -> Result<Self> {
        if k_max == 0 {
            return Err(domain("k_max must be at least 1"));
        }
        Ok(Truncation { k_max })
    }

    pub(crate) fn explicit_len(&self, p: &ModelParams) -> usize {
        p.k_cut.unwrap_or(self.k_max)
    }
}

/// Model-specific data attached to a zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolutionDetail {
    Ideal,
    /// `k = aβq̄^{(μ)}`, `factor = W_0(k)/k`, `gamma = W_0(k)/(aβ) = Σ ξ_k`.
    Cmf { k: f64, factor: f64, gamma: f64 },
    /// `eta = min(μ - aδ*, 0)`, the chemical potential of `ξ`.
    Pmf { eta: f64, supercritical: bool },
    /// `eta = (μ - aδ*)·f` with `f = 1` above the kink `δ = μ/a` and
    /// `-b/(a-b)` below it.
    Hyl { eta: f64, above_kink: bool },
}

/// A zero `ξ` of a rate function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerSolution {
    pub xi: CycleCounts,
    /// Self-consistent density (PMF, HYL).
    pub delta_star: Option<f64>,
    /// Branch vector: `chi[j - 1]` is `0` or `-1`; entries past the end are `0`.
    pub chi: Vec<i8>,
    /// `I(ξ) + βH_lsc(ξ)` with the model's reference rate.
    pub objective: f64,
    pub unique: bool,
    /// Residual of the defining equation (`|δ* - g(δ*)|` for PMF and HYL).
    pub residual: f64,
    pub detail: SolutionDetail,
}

impl MinimizerSolution {
    /// Density of `ξ` including its tail.
    pub fn density(&self) -> f64 {
        self.xi.density().to_f64()
    }
}

/// Unique zero of the ideal rate function: `ξ_k = q_k^{(μ+α)}`.
///
/// ```
/// use bosegas::minimize::{zero_ideal, Truncation};
/// use bosegas::ModelParams;
///
/// let p = ModelParams::ideal(3, bosegas::BETA_NORM, 0.0);
/// let z = zero_ideal(&p, Truncation::default()).unwrap();
/// assert!((z.xi.get(4) - 1.0 / 32.0).abs() < 1e-16);
/// assert!(z.objective.abs() < 1e-12);
/// ```
pub fn zero_ideal(p: &ModelParams, trunc: Truncation) -> Result<MinimizerSolution> {
    let p = p.reduced();
    p.validate()?;
    if p.mu > 0.0 {
        return Err(domain("ideal zero needs mu + alpha <= 0"));
    }
    let xi = scaled_ideal(&p, trunc, p.mu, 1.0)?;
    let ideal = ModelParams { model: Model::Ideal, ..p };
    let obj = objective(&ideal, &xi)?.to_f64();
    Ok(MinimizerSolution {
        xi,
        delta_star: None,
        chi: Vec::new(),
        objective: obj,
        unique: true,
        residual: 0.0,
        detail: SolutionDetail::Ideal,
    })
}

/// Unique zero of the CMF rate function: `ξ_k = (W_0(K)/K) q_k^{(μ+α)}` with
/// `K = aβq̄^{(μ+α)}`.
pub fn zero_cmf(p: &ModelParams, trunc: Truncation) -> Result<MinimizerSolution> {
    let p = p.reduced();
    p.validate()?;
    if p.mu > 0.0 {
        return Err(domain("CMF zero needs mu + alpha <= 0"));
    }
    let qbar = p.weights().qbar(p.mu)?;
    let k = p.a * p.beta * qbar;
    let wk = lambert_w(WBranch::Principal, k)?;
    let factor = if k == 0.0 { 1.0 } else { wk / k };
    let gamma = if p.a == 0.0 { qbar } else { wk / (p.a * p.beta) };
    let xi = scaled_ideal(&p, trunc, p.mu, factor)?;
    let obj = objective(&ModelParams { model: Model::Cmf, ..p }, &xi)?.to_f64();
    let residual = (gamma - (-p.a * p.beta * gamma).exp() * qbar).abs();
    Ok(MinimizerSolution {
        xi,
        delta_star: None,
        chi: Vec::new(),
        objective: obj,
        unique: true,
        residual,
        detail: SolutionDetail::Cmf { k, factor, gamma },
    })
}

/// Zero of any model. HYL uses `cfg`; the other models ignore it.
pub fn zero(p: &ModelParams, trunc: Truncation, cfg: &HylSolverConfig) -> Result<MinimizerSolution> {
    match p.model {
        Model::Ideal => zero_ideal(p, trunc),
        Model::Cmf => zero_cmf(p, trunc),
        Model::Pmf => zero_pmf(p, trunc),
        Model::Hyl => zero_hyl(p, cfg, trunc),
    }
}

// scale · q^{(eta)} with an ideal tail (or nothing past the cutoff)
pub(crate) fn scaled_ideal(
    p: &ModelParams,
    trunc: Truncation,
    eta: f64,
    scale: f64,
) -> Result<CycleCounts> {
    let w = p.weights();
    let n = trunc.explicit_len(p);
    let ln_s = scale.ln();
    let logs: Vec<f64> = (1..=n).map(|k| w.ln_q(k, eta) + ln_s).collect();
    let values = logs.iter().map(|l| l.exp()).collect();
    let tail = match p.k_cut {
        Some(_) => TailPolicy::Zero,
        None => TailPolicy::Ideal { weights: w, eta, scale },
    };
    CycleCounts::new(values, tail)?.with_log_values(logs)
}
