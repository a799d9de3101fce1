use super::counts::CycleCounts;
use super::params::{Model, ModelParams};
use crate::error::{domain, Result};
use crate::ext::ExtReal;

/// Chemical potential of the reference weights in each model's rate function.
///
/// Ideal and CMF gases keep `μ + α` in the weights; for PMF and HYL it is
/// moved into the Hamiltonian and the weights are taken at `0`.
pub fn reference_eta(p: &ModelParams) -> f64 {
    match p.model {
        Model::Ideal | Model::Cmf => p.mu_eff(),
        Model::Pmf | Model::Hyl => 0.0,
    }
}

/// Raw Hamiltonian at the effective chemical potential `μ + α`.
///
/// Ideal: `0`. CMF: `(a/2)(Σ x)^2`. PMF: `-μD + (a/2)D^2`.
/// HYL: PMF minus `(b/2) Σ k^2 x_k^2`.
pub fn hamiltonian(p: &ModelParams, x: &CycleCounts) -> ExtReal {
    let mu = p.mu_eff();
    match p.model {
        Model::Ideal => ExtReal::Finite(0.0),
        Model::Cmf => match x.total() {
            ExtReal::Finite(s) => ExtReal::Finite(0.5 * p.a * s * s),
            other => other,
        },
        Model::Pmf | Model::Hyl => {
            let d = match x.density() {
                ExtReal::Finite(d) => d,
                _ => return infinite_density_energy(p.a, mu),
            };
            let mut h = -mu * d + 0.5 * p.a * d * d;
            if p.model == Model::Hyl && p.b != 0.0 {
                h -= 0.5 * p.b * x.square_moment(2.0).to_f64();
            }
            ExtReal::Finite(h)
        }
    }
}

// -μD + (a/2)D^2 as D → ∞ (the HYL counter-term never wins since a > b)
fn infinite_density_energy(a: f64, mu: f64) -> ExtReal {
    if a > 0.0 || mu < 0.0 {
        ExtReal::PosInfinity
    } else if mu > 0.0 {
        ExtReal::NegInfinity
    } else {
        ExtReal::Finite(0.0)
    }
}

/// Lower-semicontinuous regularisation of the Hamiltonian.
///
/// PMF: `H - (μ - aD)_+^2 / (2a)`, which equals the plateau `-μ^2/(2a)` for
/// `D < μ/a`. HYL: `H - (μ - aD)_+^2 / (2(a - b))`. Ideal and CMF Hamiltonians
/// are already continuous and are returned unchanged.
///
/// ```
/// use bosegas::model::hamiltonian_lsc;
/// use bosegas::{CycleCounts, ModelParams};
///
/// let p = ModelParams::pmf(3, 1.0, 1.0, 1.0);
/// let h = hamiltonian_lsc(&p, &CycleCounts::zeros(8)).unwrap();
/// assert_eq!(h, -0.5);
/// ```
pub fn hamiltonian_lsc(p: &ModelParams, x: &CycleCounts) -> ExtReal {
    let mu = p.mu_eff();
    match p.model {
        Model::Ideal | Model::Cmf => hamiltonian(p, x),
        Model::Pmf => {
            let d = match x.density() {
                ExtReal::Finite(d) => d,
                _ => return hamiltonian(p, x),
            };
            if p.a == 0.0 {
                return if mu <= 0.0 {
                    hamiltonian(p, x)
                } else {
                    ExtReal::NegInfinity
                };
            }
            if p.a * d >= mu {
                hamiltonian(p, x)
            } else {
                ExtReal::Finite(-mu * mu / (2.0 * p.a))
            }
        }
        Model::Hyl => {
            let d = match x.density() {
                ExtReal::Finite(d) => d,
                _ => return hamiltonian(p, x),
            };
            let h = hamiltonian(p, x).to_f64();
            let gap = (mu - p.a * d).max(0.0);
            ExtReal::Finite(h - gap * gap / (2.0 * (p.a - p.b)))
        }
    }
}

/// Ideal rate function `I_η(x) = Σ x_k (ln(x_k / q_k^{(η)}) - 1) + q̄^{(η)}`
/// at `η = μ + α`.
///
/// ```
/// use bosegas::model::rate_ideal;
/// use bosegas::{CycleCounts, ModelParams, TailPolicy};
///
/// let p = ModelParams::ideal(3, bosegas::BETA_NORM, -0.5);
/// let w = p.weights();
/// let qbar = w.qbar(-0.5).unwrap();
/// assert!((rate_ideal(&p, &CycleCounts::zeros(4)).unwrap().unwrap() - qbar).abs() < 1e-14);
/// ```
pub fn rate_ideal(p: &ModelParams, x: &CycleCounts) -> Result<ExtReal> {
    if p.mu_eff() > 0.0 {
        return Err(domain("ideal rate function needs mu + alpha <= 0"));
    }
    reference_rate(p, p.mu_eff(), x)
}

/// `I_η(x)` for an arbitrary reference chemical potential `η ≤ 0`.
pub fn reference_rate(p: &ModelParams, eta: f64, x: &CycleCounts) -> Result<ExtReal> {
    let w = p.weights();
    let qbar = w.qbar(eta)?;
    let xl = x.xlog_ratio(&w, eta);
    Ok(match xl {
        ExtReal::Finite(v) => ExtReal::Finite(v - x.total().to_f64() + qbar),
        other => other,
    })
}

/// The functional minimised by each model's zero: `I_ref(x) + β H_lsc(x)`.
///
/// The reference chemical potential is [`reference_eta`].
pub fn objective(p: &ModelParams, x: &CycleCounts) -> Result<ExtReal> {
    let i = reference_rate(p, reference_eta(p), x)?;
    let h = hamiltonian_lsc(p, x);
    Ok(match (i, h) {
        (ExtReal::PosInfinity, _) | (_, ExtReal::PosInfinity) => ExtReal::PosInfinity,
        (ExtReal::Finite(i), ExtReal::Finite(h)) => ExtReal::Finite(i + p.beta * h),
        (_, ExtReal::NegInfinity) | (ExtReal::NegInfinity, _) => ExtReal::NegInfinity,
    })
}

/// Model rate function `objective(x) - normalizer`.
///
/// `normalizer` is the infimum of [`objective`], i.e. the objective of the
/// zero returned by [`crate::minimize`].
pub fn rate_model(p: &ModelParams, x: &CycleCounts, normalizer: f64) -> Result<ExtReal> {
    Ok(match objective(p, x)? {
        ExtReal::Finite(v) => ExtReal::Finite(v - normalizer),
        other => other,
    })
}

/// Coordinate derivatives of [`objective`] at the explicit entries of `x`.
///
/// Entry `k - 1` is `ln(x_k / q_k) + β ∂H_lsc/∂x_k`; it vanishes at a
/// stationary point.
pub fn stationarity_gradient(p: &ModelParams, x: &CycleCounts) -> Result<Vec<f64>> {
    let w = p.weights();
    let eta = reference_eta(p);
    let mu = p.mu_eff();
    let beta = p.beta;
    let total = x.total().to_f64();
    let dens = x.density();
    let d = dens.to_f64();
    let mut out = Vec::with_capacity(x.k_max());
    for k in 1..=x.k_max() {
        let kf = k as f64;
        let log_ratio = x.ln_get(k) - w.ln_q(k, eta);
        let dh = match p.model {
            Model::Ideal => 0.0,
            Model::Cmf => p.a * total,
            Model::Pmf => kf * (p.a * d - mu).max(0.0),
            Model::Hyl => {
                let f = if p.a * d >= mu { 1.0 } else { -p.b / (p.a - p.b) };
                -p.b * kf * kf * x.values()[k - 1] - kf * (mu - p.a * d) * f
            }
        };
        out.push(log_ratio + beta * dh);
    }
    Ok(out)
}

/// Free-particle cumulant generating function `Σ_k q_k^{(μ+α)} (e^{t_k} - 1)`,
/// with `t_k = 0` beyond the slice.
pub fn cumulant_seq(p: &ModelParams, t: &[f64]) -> Result<f64> {
    let eta = p.mu_eff();
    if eta > 0.0 {
        return Err(domain("cumulant needs mu + alpha <= 0"));
    }
    let w = p.weights();
    Ok(t
        .iter()
        .enumerate()
        .rev()
        .map(|(i, &tk)| w.q(i + 1, eta) * tk.exp_m1())
        .sum())
}

/// Cumulant generating function of the particle density under the reference
/// process at chemical potential `α`:
/// `Λ(t) = Σ_k q_k^{(α)} (e^{tk} - 1) = q̄^{(α + t/β)} - q̄^{(α)}`.
///
/// `+∞` for `t > -αβ`. At `t = -αβ` the value is `q̄^{(0)} - q̄^{(α)}`, which
/// is finite in every dimension.
pub fn cumulant_density(p: &ModelParams, t: f64) -> Result<ExtReal> {
    if p.alpha > 0.0 {
        return Err(domain("cumulant needs alpha <= 0"));
    }
    if t > -p.alpha * p.beta {
        return Ok(ExtReal::PosInfinity);
    }
    let w = p.weights();
    let eta = (p.alpha + t / p.beta).min(0.0);
    Ok(ExtReal::Finite(w.qbar(eta)? - w.qbar(p.alpha)?))
}

/// `D(x) = Σ k x_k`.
pub fn density(x: &CycleCounts) -> ExtReal {
    x.density()
}
