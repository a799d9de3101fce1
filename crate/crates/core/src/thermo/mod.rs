//! Pressures, their derivatives, critical densities, free energies,
//! condensate densities, density rate functions and phase-diagram sweeps.
//!
//! All functions take a [`ThermoConfig`] that carries the truncation and the
//! HYL solver settings used to compute zeros.

mod free;
mod sweep;

pub use free::{density_rate, free_energy, DensityModel, FreeEnergyPoint};
pub use sweep::{sweep, ThermoPoint};

use crate::error::{domain, Result};
use crate::ext::ExtReal;
use crate::minimize::{self, HylSolverConfig, MinimizerSolution, SolutionDetail, Truncation};
use crate::model::{Model, ModelParams, WeightSeq};
use crate::specfun::{lambert_w, WBranch};
use serde::{Deserialize, Serialize};

/// Settings shared by the thermodynamic functions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ThermoConfig {
    pub trunc: Truncation,
    pub hyl: HylSolverConfig,
    /// Report the periodic-boundary convention for the ideal condensate at
    /// `μ = 0` (`+∞`) instead of the empty-boundary one (`0`).
    pub periodic: bool,
}

/// A thermodynamic output that may be infinite or undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Quantity {
    Finite(f64),
    Infinity,
    Undefined,
}

impl Quantity {
    pub fn finite(self) -> Option<f64> {
        match self {
            Quantity::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn unwrap(self) -> f64 {
        self.finite().expect("quantity is not finite")
    }
}

impl From<ExtReal> for Quantity {
    fn from(x: ExtReal) -> Self {
        match x {
            ExtReal::Finite(v) => Quantity::Finite(v),
            ExtReal::PosInfinity => Quantity::Infinity,
            ExtReal::NegInfinity => Quantity::Undefined,
        }
    }
}

/// Phase of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    NonSmooth,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
            Regime::NonSmooth => "non_smooth",
        }
    }
}

fn ideal_pressure(p: &ModelParams, mu: f64) -> Result<f64> {
    if mu > 0.0 {
        return Err(domain(format!("ideal pressure is +inf for mu + alpha = {mu} > 0")));
    }
    Ok(p.weights().qbar(mu)? / p.beta)
}

/// Pressure of the model at `μ + α`.
///
/// Ideal: `q̄^{(μ)}/β`. CMF: `W(1 + W/2)/(aβ^2)` with `W = W_0(aβq̄^{(μ)})`.
/// PMF: `(a/2)δ*^2 + q̄^{(μ-aδ*)}/β`, or `μ^2/(2a) + p(β, 0)` on the plateau.
/// HYL: `p(β, 0) - (1/β) inf(I + βH_lsc)`.
///
/// ```
/// use bosegas::{thermo, ModelParams};
///
/// let cfg = thermo::ThermoConfig::default();
/// let p = ModelParams::pmf(3, bosegas::BETA_NORM, 10.0, 1.0);
/// let ideal0 = thermo::pressure(&ModelParams::ideal(3, bosegas::BETA_NORM, 0.0), &cfg).unwrap();
/// let pmf = thermo::pressure(&p, &cfg).unwrap();
/// assert!((pmf - (50.0 + ideal0)).abs() < 1e-12);
/// ```
pub fn pressure(p: &ModelParams, cfg: &ThermoConfig) -> Result<f64> {
    let p = p.reduced();
    p.validate()?;
    let mu = p.mu;
    match p.model {
        Model::Ideal => ideal_pressure(&p, mu),
        Model::Cmf => {
            if mu > 0.0 {
                return Err(domain(format!("CMF pressure is +inf for mu + alpha = {mu} > 0")));
            }
            if p.a == 0.0 {
                return ideal_pressure(&p, mu);
            }
            let k = p.a * p.beta * p.weights().qbar(mu)?;
            let w = lambert_w(WBranch::Principal, k)?;
            Ok(w * (1.0 + 0.5 * w) / (p.a * p.beta * p.beta))
        }
        Model::Pmf => {
            if p.a == 0.0 {
                return ideal_pressure(&p, mu);
            }
            let z = minimize::zero_pmf(&p, cfg.trunc)?;
            pmf_pressure(&p, &z)
        }
        Model::Hyl => {
            let z = minimize::zero_hyl(&p, &cfg.hyl, cfg.trunc)?;
            hyl_pressure(&p, &z)
        }
    }
}

pub(crate) fn pmf_pressure(p: &ModelParams, z: &MinimizerSolution) -> Result<f64> {
    let w = p.weights();
    let delta = z.delta_star.expect("PMF zeros carry delta");
    match z.detail {
        SolutionDetail::Pmf { supercritical: true, .. } => {
            Ok(p.mu * p.mu / (2.0 * p.a) + w.qbar(0.0)? / p.beta)
        }
        _ => {
            let eta = (p.mu - p.a * delta).min(0.0);
            Ok(0.5 * p.a * delta * delta + w.qbar(eta)? / p.beta)
        }
    }
}

pub(crate) fn hyl_pressure(p: &ModelParams, z: &MinimizerSolution) -> Result<f64> {
    Ok((p.weights().qbar(0.0)? - z.objective) / p.beta)
}

/// `dp/dμ` in closed form: the density of the zero, `(μ+α)/a` on the PMF
/// plateau, and `D + (μ+α - aD)_+/(a-b)` for HYL.
///
/// A HYL point where two solutions tie is checked with one-sided
/// differences; if they disagree the result is [`Quantity::Undefined`].
pub fn dpressure_dmu(p: &ModelParams, cfg: &ThermoConfig) -> Result<Quantity> {
    let p = p.reduced();
    p.validate()?;
    let w = p.weights();
    match p.model {
        Model::Ideal => {
            if p.mu > 0.0 {
                return Err(domain("ideal gas needs mu + alpha <= 0"));
            }
            Ok(w.density(p.mu)?.into())
        }
        Model::Cmf => {
            if p.mu > 0.0 {
                return Err(domain("CMF gas needs mu + alpha <= 0"));
            }
            let z = minimize::zero_cmf(&p, cfg.trunc)?;
            Ok(z.xi.density().into())
        }
        Model::Pmf => {
            if p.a == 0.0 {
                if p.mu > 0.0 {
                    return Err(domain("PMF with a = 0 needs mu + alpha <= 0"));
                }
                return Ok(w.density(p.mu)?.into());
            }
            let z = minimize::zero_pmf(&p, cfg.trunc)?;
            Ok(Quantity::Finite(pmf_slope(&p, &z)))
        }
        Model::Hyl => {
            let z = minimize::zero_hyl(&p, &cfg.hyl, cfg.trunc)?;
            if z.unique {
                return Ok(Quantity::Finite(hyl_slope(&p, &z)));
            }
            let (smooth, slope) = one_sided_check(&p, cfg)?;
            Ok(if smooth {
                Quantity::Finite(slope)
            } else {
                Quantity::Undefined
            })
        }
    }
}

pub(crate) fn pmf_slope(p: &ModelParams, z: &MinimizerSolution) -> f64 {
    match z.detail {
        SolutionDetail::Pmf { supercritical: true, .. } => p.mu / p.a,
        _ => z.delta_star.expect("PMF zeros carry delta"),
    }
}

pub(crate) fn hyl_slope(p: &ModelParams, z: &MinimizerSolution) -> f64 {
    let d = z.delta_star.unwrap_or_else(|| z.density());
    d + (p.mu - p.a * d).max(0.0) / (p.a - p.b)
}

/// One-sided difference quotients of the pressure at `h ∈ {1e-4, 1e-5, 1e-6}`
/// (relative). Returns whether the left/right gap shrinks with `h`, and the
/// central estimate at the smallest `h`.
pub(crate) fn one_sided_check(p: &ModelParams, cfg: &ThermoConfig) -> Result<(bool, f64)> {
    let scale = p.mu.abs().max(1.0);
    let p0 = pressure(p, cfg)?;
    let mut gaps = Vec::new();
    let mut last = 0.0;
    for h in [1e-4, 1e-5, 1e-6] {
        let h = h * scale;
        let right = (pressure(&p.with_mu(p.mu + h), cfg)? - p0) / h;
        let left = (p0 - pressure(&p.with_mu(p.mu - h), cfg)?) / h;
        gaps.push((right - left).abs());
        last = 0.5 * (left + right);
    }
    let noise = 1e-6 * last.abs().max(1.0);
    let shrinking = gaps[2] <= noise || gaps[2] < 0.2 * gaps[0];
    Ok((shrinking, last))
}

/// Critical density: `ρ_c = ζ(d/2)/(4πβ)^{d/2}` (`+∞` for `d ≤ 2`); for CMF
/// the reduced value `(W_0(K_0)/K_0) ρ_c` with `K_0 = aβq̄^{(0)}`. PMF and HYL
/// report the ideal value.
pub fn critical_density(p: &ModelParams) -> Result<ExtReal> {
    WeightSeq::new(p.d, p.beta)?;
    let w = p.weights();
    let rho = w.critical_density();
    match p.model {
        Model::Cmf if p.a > 0.0 => {
            let k0 = p.a * p.beta * w.qbar(0.0)?;
            let factor = lambert_w(WBranch::Principal, k0)? / k0;
            Ok(match rho {
                ExtReal::Finite(r) => ExtReal::Finite(factor * r),
                other => other,
            })
        }
        _ => Ok(rho),
    }
}

/// Condensate density.
///
/// Ideal: `0` for `μ < 0`; at `μ = 0`, `+∞` for `d ≤ 2` and for `d ≥ 3`
/// either `0` or (with `periodic`) `+∞`. CMF: `0` for `μ < 0`, undefined at
/// `μ = 0`. PMF: `((μ+α)/a - ρ_c)_+`. HYL: `(a/(a-b))((μ+α)/a - D(ξ))_+`,
/// undefined where the minimiser is not unique.
pub fn condensate(p: &ModelParams, cfg: &ThermoConfig) -> Result<Quantity> {
    let p = p.reduced();
    p.validate()?;
    let mu = p.mu;
    match p.model {
        Model::Ideal => {
            if mu < 0.0 {
                return Ok(Quantity::Finite(0.0));
            }
            Ok(match p.weights().critical_density() {
                ExtReal::Finite(_) if !cfg.periodic => Quantity::Finite(0.0),
                _ => Quantity::Infinity,
            })
        }
        Model::Cmf => Ok(if mu < 0.0 {
            Quantity::Finite(0.0)
        } else {
            Quantity::Undefined
        }),
        Model::Pmf => {
            if p.a == 0.0 {
                return Ok(Quantity::Finite(0.0));
            }
            Ok(match p.weights().critical_density() {
                ExtReal::Finite(rc) => Quantity::Finite((mu / p.a - rc).max(0.0)),
                _ => Quantity::Finite(0.0),
            })
        }
        Model::Hyl => {
            let z = minimize::zero_hyl(&p, &cfg.hyl, cfg.trunc)?;
            if !z.unique {
                return Ok(Quantity::Undefined);
            }
            Ok(Quantity::Finite(hyl_condensate(&p, &z)))
        }
    }
}

pub(crate) fn hyl_condensate(p: &ModelParams, z: &MinimizerSolution) -> f64 {
    let d = z.delta_star.unwrap_or_else(|| z.density());
    p.a / (p.a - p.b) * (p.mu / p.a - d).max(0.0)
}
