use super::weights::WeightSeq;
use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// `β = 1/(4π)`, which makes `(4πβ)^{d/2} = 1` and the weights `k^{-1-d/2}`.
pub const BETA_NORM: f64 = 1.0 / (4.0 * std::f64::consts::PI);

/// Which interacting gas is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ideal,
    /// cycle mean field, `H = (a/2)(Σ x_k)^2`
    Cmf,
    /// particle mean field, `H = -μD + (a/2)D^2`
    Pmf,
    /// Huang–Yang–Luttinger, PMF minus `(b/2) Σ k^2 x_k^2`
    Hyl,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Ideal => "ideal",
            Model::Cmf => "cmf",
            Model::Pmf => "pmf",
            Model::Hyl => "hyl",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(Model::Ideal),
            "cmf" => Ok(Model::Cmf),
            "pmf" => Ok(Model::Pmf),
            "hyl" => Ok(Model::Hyl),
            other => Err(domain(format!("unknown model `{other}`"))),
        }
    }
}

/// Parameters of one grand-canonical model.
///
/// `alpha` is the chemical potential of the reference Poisson process and
/// `mu` the one in the Hamiltonian. Every formula only sees the sum
/// `mu + alpha` ([`ModelParams::mu_eff`]); [`ModelParams::reduced`] makes that
/// explicit.
///
/// `k_cut` turns the model into its finite-dimensional version in which
/// `q_k = 0` for `k > k_cut`. Monte Carlo runs compare against that version.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: u32,
    pub beta: f64,
    pub mu: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub model: Model,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_cut: Option<usize>,
}

impl ModelParams {
    pub fn new(model: Model, d: u32, beta: f64, mu: f64) -> Self {
        ModelParams {
            d,
            beta,
            mu,
            alpha: 0.0,
            a: 0.0,
            b: 0.0,
            model,
            k_cut: None,
        }
    }

    pub fn ideal(d: u32, beta: f64, mu: f64) -> Self {
        Self::new(Model::Ideal, d, beta, mu)
    }

    pub fn cmf(d: u32, beta: f64, mu: f64, a: f64) -> Self {
        Self { a, ..Self::new(Model::Cmf, d, beta, mu) }
    }

    pub fn pmf(d: u32, beta: f64, mu: f64, a: f64) -> Self {
        Self { a, ..Self::new(Model::Pmf, d, beta, mu) }
    }

    pub fn hyl(d: u32, beta: f64, mu: f64, a: f64, b: f64) -> Self {
        Self { a, b, ..Self::new(Model::Hyl, d, beta, mu) }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_cutoff(mut self, k_cut: usize) -> Self {
        self.k_cut = Some(k_cut);
        self
    }

    /// Effective chemical potential `μ + α`.
    pub fn mu_eff(&self) -> f64 {
        self.mu + self.alpha
    }

    /// The same model with `(μ, α)` replaced by `(μ + α, 0)`.
    pub fn reduced(&self) -> Self {
        ModelParams {
            mu: self.mu_eff(),
            alpha: 0.0,
            ..*self
        }
    }

    pub fn weights(&self) -> WeightSeq {
        WeightSeq::from_params(self)
    }

    /// Checks the invariants of the parameter set.
    ///
    /// Ideal and CMF gases need `μ + α ≤ 0`; HYL needs `a > b ≥ 0`.
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(domain("dimension must be positive"));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(domain(format!("beta must be positive, got {}", self.beta)));
        }
        if !self.mu.is_finite() || !self.alpha.is_finite() {
            return Err(domain("chemical potentials must be finite"));
        }
        if self.alpha > 0.0 {
            return Err(domain(format!("alpha must be <= 0, got {}", self.alpha)));
        }
        if !(self.a >= 0.0) || !(self.b >= 0.0) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(domain("couplings a, b must be finite and >= 0"));
        }
        if self.k_cut == Some(0) {
            return Err(domain("k_cut must be at least 1"));
        }
        match self.model {
            Model::Ideal | Model::Cmf => {
                if self.mu_eff() > 0.0 {
                    return Err(domain(format!(
                        "{} gas needs mu + alpha <= 0, got {}",
                        self.model,
                        self.mu_eff()
                    )));
                }
            }
            Model::Pmf => {}
            Model::Hyl => {
                if !(self.a > self.b) {
                    return Err(domain(format!(
                        "HYL needs a > b, got a = {}, b = {}",
                        self.a, self.b
                    )));
                }
            }
        }
        Ok(())
    }
}

/// What [`ModelParams::reduced`] did, for echoing in outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reduction {
    pub mu: f64,
    pub alpha: f64,
    pub mu_eff: f64,
}

impl From<&ModelParams> for Reduction {
    fn from(p: &ModelParams) -> Self {
        Reduction {
            mu: p.mu,
            alpha: p.alpha,
            mu_eff: p.mu_eff(),
        }
    }
}
