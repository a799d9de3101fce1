use super::ThermoConfig;
use crate::error::{domain, Error, Result};
use crate::ext::ExtReal;
use crate::minimize::roots_bisect;
use crate::model::{Model, ModelParams};
use crate::specfun::{lambert_w, WBranch};
use serde::Serialize;

/// One value of the free energy `f(β, ρ) = sup_{α ≤ 0} {αρ - p(β, α)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeEnergyPoint {
    pub rho: f64,
    pub f: f64,
    /// The `α` attaining the supremum; `None` at `ρ = 0` where it is `-∞`.
    pub maximizing_alpha: Option<f64>,
    /// `true` when the supremum sits at `α = 0` (`ρ ≥ ρ_c`).
    pub saturated: bool,
}

// pressure and its slope as functions of the chemical potential, for the
// two gases whose free energy is a plain Legendre transform
struct Legendre<'a> {
    p: &'a ModelParams,
}

impl Legendre<'_> {
    fn cmf_w(&self, alpha: f64) -> Result<Option<f64>> {
        if self.p.model == Model::Cmf && self.p.a > 0.0 {
            let k = self.p.a * self.p.beta * self.p.weights().qbar(alpha)?;
            return Ok(Some(lambert_w(WBranch::Principal, k)?));
        }
        Ok(None)
    }

    fn pressure(&self, alpha: f64) -> Result<f64> {
        let p = self.p;
        Ok(match self.cmf_w(alpha)? {
            Some(w) => w * (1.0 + 0.5 * w) / (p.a * p.beta * p.beta),
            None => p.weights().qbar(alpha)? / p.beta,
        })
    }

    fn slope(&self, alpha: f64) -> Result<ExtReal> {
        let p = self.p;
        let rho = p.weights().density(alpha)?;
        Ok(match (self.cmf_w(alpha)?, rho) {
            (Some(w), ExtReal::Finite(r)) => {
                let k = p.a * p.beta * p.weights().qbar(alpha)?;
                ExtReal::Finite(w / k * r)
            }
            (_, r) => r,
        })
    }
}

/// Free energy as the Legendre transform of the pressure.
///
/// Ideal and CMF: solve `dp/dα = ρ` for `α ≤ 0` by bisection, or take the
/// plateau value `-p(β, 0)` for `ρ ≥ ρ_c`. PMF: the ideal free energy plus
/// `(a/2)ρ^2`. HYL is not supported.
///
/// ```
/// use bosegas::{thermo, ModelParams};
///
/// let cfg = thermo::ThermoConfig::default();
/// let p = ModelParams::ideal(3, bosegas::BETA_NORM, 0.0);
/// let rho_c = thermo::critical_density(&p).unwrap().unwrap();
/// let p0 = thermo::pressure(&p, &cfg).unwrap();
/// let f = thermo::free_energy(&p, 1.5 * rho_c, &cfg).unwrap();
/// assert!(f.saturated && (f.f + p0).abs() < 1e-12);
/// ```
pub fn free_energy(p: &ModelParams, rho: f64, _cfg: &ThermoConfig) -> Result<FreeEnergyPoint> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(domain(format!("free energy needs a finite rho >= 0, got {rho}")));
    }
    let base = ModelParams { mu: 0.0, alpha: 0.0, ..*p };
    base.validate()?;
    match p.model {
        Model::Ideal | Model::Cmf => legendre(&base, rho),
        Model::Pmf => {
            let ideal = ModelParams { model: Model::Ideal, ..base };
            let mut pt = legendre(&ideal, rho)?;
            pt.f += 0.5 * p.a * rho * rho;
            Ok(pt)
        }
        Model::Hyl => Err(Error::Unsupported("free energy of the HYL gas".into())),
    }
}

fn legendre(p: &ModelParams, rho: f64) -> Result<FreeEnergyPoint> {
    let l = Legendre { p };
    if rho == 0.0 {
        return Ok(FreeEnergyPoint {
            rho,
            f: 0.0,
            maximizing_alpha: None,
            saturated: false,
        });
    }
    let at_zero = l.slope(0.0)?;
    if let ExtReal::Finite(rc) = at_zero {
        if rho >= rc {
            return Ok(FreeEnergyPoint {
                rho,
                f: -l.pressure(0.0)?,
                maximizing_alpha: Some(0.0),
                saturated: true,
            });
        }
    }
    let mut lo = -1e3 / p.beta;
    let mut steps = 0;
    while l.slope(lo)?.to_f64() > rho {
        lo *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::NonConvergence(format!("no chemical potential with density {rho}")));
        }
    }
    let (alpha, _) = roots_bisect(|a| l.slope(a).map(|v| v.to_f64() - rho).unwrap_or(f64::NAN), lo, 0.0);
    Ok(FreeEnergyPoint {
        rho,
        f: alpha * rho - l.pressure(alpha)?,
        maximizing_alpha: Some(alpha),
        saturated: false,
    })
}

/// Which density rate function [`density_rate`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityModel {
    /// `J_α(x) = β(p(β, α) + f(β, x) - αx)` on `[0, ρ_c]`.
    IdealDensity,
    /// `J(x) = β(-μx + (a/2)x^2) + J_α(x) - N` with `N` its infimum.
    PmfDensity,
}

/// Rate function of the particle density under the reference process at
/// `α = params.alpha < 0`, optionally tilted by the PMF energy with
/// `μ = params.mu` and `a = params.a`.
///
/// `+∞` for `x < 0` and, when `ρ_c` is finite, for `x > ρ_c`.
pub fn density_rate(
    p: &ModelParams,
    x: f64,
    kind: DensityModel,
    cfg: &ThermoConfig,
) -> Result<ExtReal> {
    if !(p.alpha < 0.0) {
        return Err(domain(format!("density rate needs alpha < 0, got {}", p.alpha)));
    }
    let ideal = ModelParams {
        model: Model::Ideal,
        mu: p.alpha,
        alpha: 0.0,
        ..*p
    };
    let rho_c = ideal.weights().critical_density();
    let j_alpha = |y: f64| -> Result<ExtReal> {
        if y < 0.0 || matches!(rho_c, ExtReal::Finite(rc) if y > rc) {
            return Ok(ExtReal::PosInfinity);
        }
        let f = free_energy(&ideal, y, cfg)?.f;
        let pa = ideal.weights().qbar(p.alpha)? / p.beta;
        Ok(ExtReal::Finite(p.beta * (pa + f - p.alpha * y)))
    };
    match kind {
        DensityModel::IdealDensity => j_alpha(x),
        DensityModel::PmfDensity => {
            let phi = |y: f64| -> Result<ExtReal> {
                Ok(match j_alpha(y)? {
                    ExtReal::Finite(j) => ExtReal::Finite(p.beta * (-p.mu * y + 0.5 * p.a * y * y) + j),
                    other => other,
                })
            };
            let upper = match rho_c {
                ExtReal::Finite(rc) => rc,
                _ => {
                    if p.a <= 0.0 && p.mu > 0.0 {
                        return Err(domain("PMF density rate is unbounded below for a = 0, mu > 0"));
                    }
                    let y_alpha = ideal.weights().density(p.alpha)?.to_f64();
                    let y_mu = if p.a > 0.0 { p.mu.max(0.0) / p.a } else { 0.0 };
                    1.5 * y_alpha.max(y_mu).max(1e-300)
                }
            };
            let n = convex_min(|y| phi(y).map(|v| v.to_f64()), 0.0, upper)?;
            Ok(match phi(x)? {
                ExtReal::Finite(v) => ExtReal::Finite(v - n),
                other => other,
            })
        }
    }
}

// minimum of a convex function on [lo, hi]: grid, then golden section
fn convex_min<F>(f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    const N: usize = 200;
    let xs: Vec<f64> = (0..=N).map(|i| lo + (hi - lo) * i as f64 / N as f64).collect();
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        vals.push(f(x)?);
    }
    let (i, _) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let (mut a, mut b) = (xs[i.saturating_sub(1)], xs[(i + 1).min(N)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(vals[i].min(fc).min(fd).min(f(0.5 * (a + b))?))
}
