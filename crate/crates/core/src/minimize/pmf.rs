use super::roots::bisect_increasing;
use super::{scaled_ideal, MinimizerSolution, SolutionDetail, Truncation};
use crate::error::{domain, Error, Result};
use crate::ext::ExtReal;
use crate::model::{objective, Model, ModelParams};

/// Right-hand side of the PMF consistency equation,
/// `h(δ) = Σ_k k q_k^{(0)} exp(βk (μ + α - aδ)_-)`.
///
/// Constant (`= ρ_c`) for `δ ≤ (μ+α)/a` and strictly decreasing beyond.
pub fn pmf_consistency(p: &ModelParams, delta: f64) -> Result<ExtReal> {
    let eta = (p.mu_eff() - p.a * delta).min(0.0);
    p.weights().density(eta)
}

/// Unique zero of the PMF rate function.
///
/// `ξ_k = q_k^{(0)} exp(βk(μ + α - aδ*)_-)` where `δ*` solves `δ = h(δ)`
/// ([`pmf_consistency`]). When `ρ_c` is finite and `μ + α ≥ aρ_c` the
/// solution sits on the plateau: `δ* = ρ_c` and `ξ = q^{(0)}`.
///
/// The reported residual is `|δ* - h(δ*)|`, or `|aδ* + η - μ - α|/a` with
/// `η` the chemical potential of `ξ` when that is smaller (near `η = 0` for
/// `d ≤ 2`, `h` varies faster than `δ` can be resolved).
///
/// ```
/// use bosegas::minimize::{zero_pmf, Truncation};
/// use bosegas::ModelParams;
///
/// // far above aρ_c the zero is the critical ideal gas
/// let p = ModelParams::pmf(3, bosegas::BETA_NORM, 10.0, 1.0);
/// let z = zero_pmf(&p, Truncation::default()).unwrap();
/// assert!((z.delta_star.unwrap() - 2.612375348685488).abs() < 1e-12);
/// ```
pub fn zero_pmf(p: &ModelParams, trunc: Truncation) -> Result<MinimizerSolution> {
    let p = p.reduced();
    p.validate()?;
    let mu = p.mu;
    let w = p.weights();
    let h = |delta: f64| -> f64 {
        let eta = (mu - p.a * delta).min(0.0);
        w.density(eta).map(|v| v.to_f64()).unwrap_or(f64::NAN)
    };

    let (delta, eta, supercritical, residual) = if p.a == 0.0 {
        if mu > 0.0 {
            return Err(domain("PMF with a = 0 has no zero for mu + alpha > 0"));
        }
        let rho = h(0.0);
        if !rho.is_finite() {
            return Err(domain("PMF with a = 0 at mu + alpha = 0 has infinite density"));
        }
        (rho, mu, false, 0.0)
    } else {
        match w.critical_density() {
            ExtReal::Finite(rho_c) if mu >= p.a * rho_c => (rho_c, 0.0, true, 0.0),
            _ => {
                // solve η + aρ(η) = μ for η ≤ 0, then δ* = ρ(η); this keeps η
                // accurate when it is far smaller than δ*
                let rho = |eta: f64| w.density(eta).map(|v| v.to_f64()).unwrap_or(f64::NAN);
                let f = |eta: f64| eta + p.a * rho(eta) - mu;
                let m = mu.min(0.0);
                let mut lo = if rho(m).is_finite() { m - p.a * rho(m) } else { m - 1.0 };
                let mut tries = 0;
                while !(f(lo) <= 0.0) {
                    lo = 2.0 * lo - 1.0;
                    tries += 1;
                    if tries > 2100 || !lo.is_finite() {
                        return Err(Error::NonConvergence(format!(
                            "PMF consistency: no bracket (mu = {mu}, a = {})",
                            p.a
                        )));
                    }
                }
                let (eta, _) = bisect_increasing(f, lo, 0.0);
                let delta = rho(eta);
                if !delta.is_finite() {
                    return Err(Error::NonConvergence(format!("PMF consistency at mu = {mu}: density overflow")));
                }
                let residual = (delta - h(delta)).abs().min((p.a * delta + eta - mu).abs() / p.a);
                (delta, eta, false, residual)
            }
        }
    };

    let xi = scaled_ideal(&p, trunc, eta, 1.0)?;
    let obj = objective(&ModelParams { model: Model::Pmf, ..p }, &xi)?.to_f64();
    Ok(MinimizerSolution {
        xi,
        delta_star: Some(delta),
        chi: Vec::new(),
        objective: obj,
        unique: true,
        residual,
        detail: SolutionDetail::Pmf { eta, supercritical },
    })
}
