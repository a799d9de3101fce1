use super::{
    condensate, hyl_condensate, hyl_pressure, hyl_slope, one_sided_check, pmf_pressure, pmf_slope,
    pressure, Quantity, Regime, ThermoConfig,
};
use crate::error::{domain, Result};
use crate::ext::ExtReal;
use crate::minimize::{self, select_min, MinimizerSolution, SolutionDetail};
use crate::model::{Model, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

/// One row of a phase-diagram sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThermoPoint {
    pub mu_eff: f64,
    /// NaN when the point failed (see `error`).
    pub pressure: f64,
    pub dp_dmu: Quantity,
    pub condensate: Quantity,
    pub regime: Regime,
    pub model: Model,
    /// Self-consistent density of the zero (PMF, HYL).
    pub delta_star: Option<f64>,
    /// Number of `χ = 0` solutions (HYL).
    pub families: Option<usize>,
    pub error: Option<String>,
}

impl ThermoPoint {
    fn failed(mu_eff: f64, model: Model, msg: String) -> Self {
        ThermoPoint {
            mu_eff,
            pressure: f64::NAN,
            dp_dmu: Quantity::Undefined,
            condensate: Quantity::Undefined,
            regime: Regime::Subcritical,
            model,
            delta_star: None,
            families: None,
            error: Some(msg),
        }
    }
}

/// Evaluates `template` at each `μ` of an increasing grid (`α` is kept).
///
/// Points are computed in parallel and returned in grid order; a failing
/// point carries its error message instead of aborting the sweep. For HYL
/// the selected solution is tracked along the grid: where it jumps to
/// another family the switching point `μ̂` is located by bisection, checked
/// with one-sided differences of the pressure, and the row nearest to it is
/// marked [`Regime::NonSmooth`] with an undefined `dp/dμ`.
pub fn sweep(template: &ModelParams, mu_grid: &[f64], cfg: &ThermoConfig) -> Result<Vec<ThermoPoint>> {
    if mu_grid.is_empty() {
        return Err(domain("empty mu grid"));
    }
    if mu_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("mu grid must be strictly increasing"));
    }
    let mut rows: Vec<ThermoPoint> = mu_grid
        .par_iter()
        .map(|&mu| {
            let p = template.with_mu(mu);
            point(&p, cfg).unwrap_or_else(|e| ThermoPoint::failed(p.mu_eff(), p.model, e.to_string()))
        })
        .collect();
    if template.model == Model::Hyl {
        mark_switches(template, mu_grid, &mut rows, cfg)?;
    }
    Ok(rows)
}

fn point(p: &ModelParams, cfg: &ThermoConfig) -> Result<ThermoPoint> {
    let p = p.reduced();
    p.validate()?;
    let mu = p.mu;
    let base = |pressure, dp_dmu, condensate, regime| ThermoPoint {
        mu_eff: mu,
        pressure,
        dp_dmu,
        condensate,
        regime,
        model: p.model,
        delta_star: None,
        families: None,
        error: None,
    };
    let edge = if mu < 0.0 { Regime::Subcritical } else { Regime::Critical };
    match p.model {
        Model::Ideal => Ok(base(
            pressure(&p, cfg)?,
            p.weights().density(mu)?.into(),
            condensate(&p, cfg)?,
            edge,
        )),
        Model::Cmf => {
            let z = minimize::zero_cmf(&p, cfg.trunc)?;
            Ok(base(
                pressure(&p, cfg)?,
                z.xi.density().into(),
                condensate(&p, cfg)?,
                edge,
            ))
        }
        Model::Pmf if p.a == 0.0 => Ok(base(
            pressure(&p, cfg)?,
            super::dpressure_dmu(&p, cfg)?,
            Quantity::Finite(0.0),
            edge,
        )),
        Model::Pmf => {
            let z = minimize::zero_pmf(&p, cfg.trunc)?;
            let regime = match (z.detail.clone(), p.weights().critical_density()) {
                (_, ExtReal::Finite(rc)) if mu == p.a * rc => Regime::Critical,
                (SolutionDetail::Pmf { supercritical: true, .. }, _) => Regime::Supercritical,
                _ => Regime::Subcritical,
            };
            let mut row = base(
                pmf_pressure(&p, &z)?,
                Quantity::Finite(pmf_slope(&p, &z)),
                condensate(&p, cfg)?,
                regime,
            );
            row.delta_star = z.delta_star;
            Ok(row)
        }
        Model::Hyl => {
            let sols = minimize::hyl_solutions(&p, &cfg.hyl, cfg.trunc)?;
            let families = sols.iter().filter(|s| s.chi.iter().all(|&c| c == 0)).count();
            let z = select_min(sols, cfg.hyl.tol)?;
            let d = z.delta_star.unwrap_or_else(|| z.density());
            let regime = if p.a * d >= mu {
                Regime::Subcritical
            } else {
                Regime::Supercritical
            };
            let (dp, cond, regime) = if z.unique {
                (
                    Quantity::Finite(hyl_slope(&p, &z)),
                    Quantity::Finite(hyl_condensate(&p, &z)),
                    regime,
                )
            } else {
                (Quantity::Undefined, Quantity::Undefined, Regime::NonSmooth)
            };
            let mut row = base(hyl_pressure(&p, &z)?, dp, cond, regime);
            row.delta_star = Some(d);
            row.families = Some(families);
            Ok(row)
        }
    }
}

fn selected_delta(p: &ModelParams, cfg: &ThermoConfig) -> Result<f64> {
    let z: MinimizerSolution = minimize::zero_hyl(p, &cfg.hyl, cfg.trunc)?;
    Ok(z.delta_star.unwrap_or_else(|| z.density()))
}

fn jumped(a: f64, b: f64) -> bool {
    (a - b).abs() > 0.25 * a.abs().max(b.abs())
}

fn mark_switches(
    template: &ModelParams,
    mu_grid: &[f64],
    rows: &mut [ThermoPoint],
    cfg: &ThermoConfig,
) -> Result<()> {
    let mut switches = Vec::new();
    for i in 0..rows.len().saturating_sub(1) {
        let (Some(dl), Some(dr)) = (rows[i].delta_star, rows[i + 1].delta_star) else {
            continue;
        };
        if !jumped(dl, dr) {
            continue;
        }
        let (mut l, mut r) = (mu_grid[i], mu_grid[i + 1]);
        let (mut dl, mut dr) = (dl, dr);
        let stop = 1e-10 * l.abs().max(r.abs()).max(1.0);
        while r - l > stop {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            let dm = selected_delta(&template.with_mu(m), cfg)?;
            if (dm - dl).abs() <= (dm - dr).abs() {
                l = m;
                dl = dm;
            } else {
                r = m;
                dr = dm;
            }
        }
        if !jumped(dl, dr) {
            continue;
        }
        let mu_hat = 0.5 * (l + r);
        let (smooth, _) = one_sided_check(&template.with_mu(mu_hat), cfg)?;
        if !smooth {
            switches.push((i, mu_hat));
        }
    }
    for (i, mu_hat) in switches {
        let j = if (mu_hat - mu_grid[i]).abs() <= (mu_grid[i + 1] - mu_hat).abs() {
            i
        } else {
            i + 1
        };
        rows[j].regime = Regime::NonSmooth;
        rows[j].dp_dmu = Quantity::Undefined;
    }
    Ok(())
}
