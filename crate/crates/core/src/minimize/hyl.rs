use super::roots::brent;
use super::{pmf, MinimizerSolution, SolutionDetail, Truncation};
use crate::error::{domain, Error, Result};
use crate::model::{lambert_coef, square_coef, CycleCounts, Model, ModelParams, TailPolicy, WeightSeq};
use crate::specfun::{bose_g, w0_neg, wm1_neg, INV_E};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::E;

// order of the Taylor part of -W_0(-z) summed in closed form
const SERIES_ORDER: usize = 20;
// explicit remainder terms are needed while e·z_k exceeds this
const REMAINDER_EZ: f64 = 0.1;

/// Search settings for [`hyl_solutions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HylSolverConfig {
    /// `J_max`: indices `1..=J_max` may carry `χ_j = -1`.
    pub chi_prefix: usize,
    /// `S_max`: at most this many `χ_j = -1` entries.
    pub chi_support_max: usize,
    /// Points in the uniform `δ` grid.
    pub delta_grid: usize,
    /// The grid covers `[0, factor · max(g^0_max, (μ+α)_+/(a-b))]`.
    pub delta_range_factor: f64,
    /// Objective tolerance for ties and for accepting a root on the kink.
    pub tol: f64,
}

impl Default for HylSolverConfig {
    fn default() -> Self {
        HylSolverConfig {
            chi_prefix: 8,
            chi_support_max: 2,
            delta_grid: 2048,
            delta_range_factor: 2.0,
            tol: 1e-10,
        }
    }
}

impl HylSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chi_prefix == 0 || self.delta_grid < 16 {
            return Err(domain("HYL solver needs chi_prefix >= 1 and delta_grid >= 16"));
        }
        if !(self.delta_range_factor > 1.0) || !(self.tol > 0.0) {
            return Err(domain("HYL solver needs delta_range_factor > 1 and tol > 0"));
        }
        Ok(())
    }

    /// All supports `S ⊆ {1..J_max}` with `|S| ≤ S_max`, the empty one first.
    pub fn chi_sets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..self.chi_support_max {
            let mut next = Vec::new();
            for s in &frontier {
                let start = s.last().map_or(1, |&j| j + 1);
                for j in start..=self.chi_prefix {
                    let mut t: Vec<usize> = s.clone();
                    t.push(j);
                    next.push(t);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    s0: f64,
    s1: f64,
    q2: f64,
}

/// The HYL consistency equation `δ = g^χ(δ)` for one parameter set.
///
/// With `c = bβ`, `η(δ) = (μ+α - aδ)·f` (`f = 1` for `aδ ≥ μ+α`, otherwise
/// `-b/(a-b)`) and `z_k = c k^2 q_k^{(η)}`, stationary points are
/// `ξ_k = -W_{χ_k}(-z_k)/(c k^2)` and `g^χ(δ) = Σ_k k ξ_k`.
/// `δ` is admissible when every `z_k ≤ 1/e`.
#[derive(Debug, Clone)]
pub struct HylSystem {
    p: ModelParams,
    w: WeightSeq,
    c: f64,
    ln_c: f64,
    cp: f64,
    f_low: f64,
    eta_req: f64,
    a_coef: Vec<f64>,
    c_coef: Vec<f64>,
}

impl HylSystem {
    /// Needs `a > b > 0`, and `d ≥ 3` unless the weights are cut off.
    pub fn new(p: &ModelParams) -> Result<Self> {
        let p = p.reduced();
        p.validate()?;
        if p.model != Model::Hyl {
            return Err(domain("HylSystem needs the HYL model"));
        }
        if !(p.b > 0.0) {
            return Err(domain("HylSystem needs b > 0 (b = 0 is the PMF gas)"));
        }
        if p.d <= 2 && p.k_cut.is_none() {
            return Err(Error::Unsupported(
                "HYL zeros in d <= 2 need a cycle-length cutoff".into(),
            ));
        }
        let w = p.weights();
        let c = p.b * p.beta;
        let ln_c = c.ln();
        let mut sys = HylSystem {
            p,
            w,
            c,
            ln_c,
            cp: c * w.prefactor(),
            f_low: -p.b / (p.a - p.b),
            eta_req: 0.0,
            a_coef: (0..=SERIES_ORDER).map(|n| if n == 0 { 0.0 } else { lambert_coef(n) }).collect(),
            c_coef: (0..=SERIES_ORDER).map(|n| if n < 2 { 0.0 } else { square_coef(n) }).collect(),
        };
        let req = match p.k_cut {
            Some(kc) => (1..=kc)
                .map(|k| (1.0 + sys.ln_z0(k)) / (p.beta * k as f64))
                .fold(f64::NEG_INFINITY, f64::max),
            // z_k is decreasing in k for d ≥ 3
            None => (1.0 + sys.ln_z0(1)) / p.beta,
        };
        sys.eta_req = if p.beta * req < 1e-13 { 0.0 } else { req };
        Ok(sys)
    }

    pub fn params(&self) -> &ModelParams {
        &self.p
    }

    /// `c = bβ`.
    pub fn coupling(&self) -> f64 {
        self.c
    }

    /// The kink `δ = (μ+α)/a`.
    pub fn kink(&self) -> f64 {
        self.p.mu / self.p.a
    }

    /// `η(δ)`, always `≤ 0`.
    pub fn eta(&self, delta: f64) -> f64 {
        let x = self.p.mu - self.p.a * delta;
        if x <= 0.0 {
            x
        } else {
            x * self.f_low
        }
    }

    /// Smallest `-η` for which all `z_k ≤ 1/e`; zero when every `δ` works.
    pub fn eta_required(&self) -> f64 {
        self.eta_req
    }

    /// The open interval of inadmissible `δ`, if there is one.
    pub fn gap(&self) -> Option<(f64, f64)> {
        if self.eta_req <= 0.0 {
            return None;
        }
        let lo = (self.p.mu - self.eta_req / -self.f_low) / self.p.a;
        let hi = (self.p.mu + self.eta_req) / self.p.a;
        Some((lo, hi))
    }

    pub fn admissible(&self, delta: f64) -> bool {
        if !(delta >= 0.0) {
            return false;
        }
        match self.gap() {
            Some((lo, hi)) => delta <= lo || delta >= hi,
            None => true,
        }
    }

    /// `β* = (b^2 e^2 / (4π)^d)^{1/(d-2)}` for `d ≥ 3`: at and above it every
    /// `δ` is admissible.
    pub fn beta_star(&self) -> Option<f64> {
        beta_star(self.p.d, self.p.b)
    }

    /// `g^0` at `η = 0`, the largest value of `g^0`; `None` below `β*`.
    pub fn g_star(&self) -> Option<f64> {
        if self.eta_req > 0.0 {
            return None;
        }
        self.sums(0.0, false).map(|s| s.s1)
    }

    /// `μ̄ = a·G*`: the chemical potential at which the kink solves the
    /// consistency equation.
    pub fn mu_bar(&self) -> Option<f64> {
        self.g_star().map(|g| self.p.a * g)
    }

    /// `g^0(δ)`; `None` outside the admissible set.
    pub fn g0(&self, delta: f64) -> Option<f64> {
        if !self.admissible(delta) {
            return None;
        }
        self.sums(self.eta(delta), false).map(|s| s.s1)
    }

    /// `g^χ(δ)` for the support `chi` of the `-1` entries.
    pub fn g_chi(&self, delta: f64, chi: &[usize]) -> Option<f64> {
        let g = self.g0(delta)?;
        let eta = self.eta(delta);
        let corr: f64 = chi.iter().map(|&j| self.swap_terms(j, eta).s1).sum();
        Some(g + corr)
    }

    fn ln_z0(&self, k: usize) -> f64 {
        self.ln_c + 2.0 * (k as f64).ln() + self.w.ln_q(k, 0.0)
    }

    fn ln_z(&self, k: usize, eta: f64) -> f64 {
        self.ln_c + 2.0 * (k as f64).ln() + self.w.ln_q(k, eta)
    }

    // Σx, Σkx, Σk²x² of the χ = 0 stationary point at η
    fn sums(&self, eta: f64, full: bool) -> Option<Sums> {
        let c = self.c;
        if let Some(kc) = self.p.k_cut {
            let mut s = Sums::default();
            for k in (1..=kc).rev() {
                let z = self.ln_z(k, eta).exp();
                if z > INV_E * (1.0 + 1e-12) {
                    return None;
                }
                let kf = k as f64;
                let x = -w0_neg(z) / (c * kf * kf);
                s.s0 += x;
                s.s1 += kf * x;
                s.q2 += kf * kf * x * x;
            }
            return Some(s);
        }
        let z1 = self.ln_z(1, eta).exp();
        if z1 > INV_E * (1.0 + 1e-12) {
            return None;
        }
        // Taylor part: Σ_k k^{-m} z_k^n = cp^n g(m + n(d/2 - 1), nα)
        let alpha = -self.p.beta * eta;
        let step = self.w.half_d() - 1.0;
        let mut s = Sums::default();
        let mut cpn = 1.0;
        for n in 1..=SERIES_ORDER {
            cpn *= self.cp;
            let nf = n as f64;
            let g1 = bose_g(1.0 + nf * step, nf * alpha).ok()?.to_f64();
            s.s1 += self.a_coef[n] * cpn * g1;
            if full {
                let g2 = bose_g(2.0 + nf * step, nf * alpha).ok()?.to_f64();
                s.s0 += self.a_coef[n] * cpn * g2;
                s.q2 += self.c_coef[n] * cpn * g2;
            }
        }
        // remainders, explicit while they matter
        let mut k = 1usize;
        loop {
            let z = if k == 1 { z1 } else { self.ln_z(k, eta).exp() };
            if E * z <= REMAINDER_EZ {
                break;
            }
            let w = w0_neg(z);
            let kf = k as f64;
            let r = -w - horner(&self.a_coef, z);
            s.s1 += r / kf;
            if full {
                s.s0 += r / (kf * kf);
                s.q2 += (w * w - horner(&self.c_coef, z)) / (kf * kf);
            }
            k += 1;
        }
        s.s0 /= c;
        s.s1 /= c;
        s.q2 /= c * c;
        Some(s)
    }

    // change of the sums when χ_j switches from 0 to -1
    fn swap_terms(&self, j: usize, eta: f64) -> Sums {
        if matches!(self.p.k_cut, Some(kc) if j > kc) {
            return Sums::default();
        }
        let ln_z = self.ln_z(j, eta);
        let z = ln_z.exp();
        let w0 = w0_neg(z);
        let wm = wm1_from_ln(ln_z);
        let jf = j as f64;
        let c = self.c;
        let dx = (w0 - wm) / (c * jf * jf);
        let x0 = -w0 / (c * jf * jf);
        let xm = -wm / (c * jf * jf);
        Sums {
            s0: dx,
            s1: jf * dx,
            q2: jf * jf * (xm * xm - x0 * x0),
        }
    }

    fn full_sums(&self, eta: f64, chi: &[usize]) -> Option<Sums> {
        let mut s = self.sums(eta, true)?;
        for &j in chi {
            let t = self.swap_terms(j, eta);
            s.s0 += t.s0;
            s.s1 += t.s1;
            s.q2 += t.q2;
        }
        Some(s)
    }

    /// `I_0(ξ) + βH_lsc(ξ)` at the stationary point `ξ(δ, χ)`.
    pub fn objective_at(&self, delta: f64, chi: &[usize]) -> Option<f64> {
        if !self.admissible(delta) {
            return None;
        }
        let eta = self.eta(delta);
        let s = self.full_sums(eta, chi)?;
        Some(self.objective_from(eta, &s))
    }

    fn objective_from(&self, eta: f64, s: &Sums) -> f64 {
        let p = &self.p;
        let qbar0 = self.w.qbar(0.0).expect("eta = 0 is admissible");
        // ln(ξ_k / q_k^{(η)}) = c k^2 ξ_k on every branch
        let rate = p.beta * eta * s.s1 + self.c * s.q2 - s.s0 + qbar0;
        let d = s.s1;
        let gap = (p.mu - p.a * d).max(0.0);
        let h = -p.mu * d + 0.5 * p.a * d * d - 0.5 * p.b * s.q2 - gap * gap / (2.0 * (p.a - p.b));
        rate + p.beta * h
    }

    /// The stationary point `ξ(δ, χ)` with its objective and the residual
    /// `|δ - g^χ(δ)|`. `δ` need not be a root.
    pub fn solution_at(&self, delta: f64, chi: &[usize], trunc: Truncation) -> Result<MinimizerSolution> {
        if !self.admissible(delta) {
            return Err(domain(format!("delta = {delta} is not admissible")));
        }
        let eta = self.eta(delta);
        let s = self
            .full_sums(eta, chi)
            .ok_or_else(|| domain(format!("delta = {delta} is not admissible")))?;
        let objective = self.objective_from(eta, &s);
        let xi = self.counts(eta, chi, trunc)?;
        let max_j = chi.iter().copied().max().unwrap_or(0);
        let mut chi_vec = vec![0i8; max_j];
        for &j in chi {
            chi_vec[j - 1] = -1;
        }
        Ok(MinimizerSolution {
            xi,
            delta_star: Some(delta),
            chi: chi_vec,
            objective,
            unique: true,
            residual: (delta - s.s1).abs(),
            detail: SolutionDetail::Hyl {
                eta,
                above_kink: self.p.a * delta >= self.p.mu,
            },
        })
    }

    fn counts(&self, eta: f64, chi: &[usize], trunc: Truncation) -> Result<CycleCounts> {
        let max_j = chi.iter().copied().max().unwrap_or(0);
        let (n, tail) = match self.p.k_cut {
            Some(kc) => (kc, TailPolicy::Zero),
            None => {
                let w = self.w;
                let mut n = trunc.k_max.max(max_j);
                while crate::model::lambert_tail_zmax(&w, eta, self.c, n) * E > 0.5 {
                    n *= 2;
                    if n > 1 << 24 {
                        return Err(Error::Size("Lambert tail needs too many explicit terms".into()));
                    }
                }
                (n, TailPolicy::Lambert { weights: w, eta, coupling: self.c })
            }
        };
        let mut logs = Vec::with_capacity(n);
        for k in 1..=n {
            let ln_z = self.ln_z(k, eta);
            let w = if chi.contains(&k) {
                wm1_from_ln(ln_z)
            } else {
                w0_neg(ln_z.exp())
            };
            // ξ_k = -w/(ck^2) = q_k^{(η)} e^{-w}
            logs.push(self.w.ln_q(k, eta) - w);
        }
        let values = logs.iter().map(|l| l.exp()).collect();
        CycleCounts::new(values, tail)?.with_log_values(logs)
    }

    /// Roots of `δ = g^χ(δ)` for every `χ` in the configuration, as
    /// `(δ, support)` pairs sorted by support and then by `δ`.
    pub fn roots(&self, cfg: &HylSolverConfig) -> Result<Vec<(f64, Vec<usize>)>> {
        cfg.validate()?;
        let sets = cfg.chi_sets();
        self.roots_for(cfg, &sets)
    }

    fn roots_for(&self, cfg: &HylSolverConfig, sets: &[Vec<usize>]) -> Result<Vec<(f64, Vec<usize>)>> {
        let p = &self.p;
        let kappa = self.kink();
        let gap = self.gap();
        // g^0 is largest at the admissible point closest to the kink
        let anchor = {
            let k0 = kappa.max(0.0);
            match gap {
                Some((lo, hi)) if k0 > lo && k0 < hi => {
                    if lo >= 0.0 && k0 - lo <= hi - k0 {
                        lo
                    } else {
                        hi
                    }
                }
                _ => k0,
            }
        };
        let g_max = self.g0(anchor).unwrap_or(0.0);
        let hi = cfg.delta_range_factor * g_max.max(p.mu.max(0.0) / (p.a - p.b)).max(1e-12);

        let mut grid: Vec<f64> = (0..cfg.delta_grid)
            .map(|i| hi * i as f64 / (cfg.delta_grid - 1) as f64)
            .collect();
        if kappa > 0.0 && kappa < hi {
            grid.push(kappa);
        }
        if let Some((lo, gh)) = gap {
            for e in [lo, gh] {
                if e >= 0.0 && e <= hi {
                    grid.push(e);
                }
            }
        }
        grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
        grid.dedup();
        grid.retain(|&x| self.admissible(x));

        let side = |x: f64| match gap {
            Some((lo, _)) if x <= lo => 0u8,
            _ => 1u8,
        };
        let jmax = cfg.chi_prefix;
        // g^0 and the χ_j swaps on the grid, shared by all χ
        let table: Vec<(f64, Vec<f64>)> = grid
            .par_iter()
            .map(|&x| {
                let eta = self.eta(x);
                let g = self.sums(eta, false).map_or(f64::NAN, |s| s.s1);
                let sw = (1..=jmax).map(|j| self.swap_terms(j, eta).s1).collect();
                (g, sw)
            })
            .collect();

        let kink_tol = 1e-12 * kappa.abs().max(1.0);
        let out: Result<Vec<Vec<(f64, Vec<usize>)>>> = sets
            .par_iter()
            .map(|chi| {
                let f = |x: f64| match self.g_chi(x, chi) {
                    Some(g) => x - g,
                    None => f64::NAN,
                };
                let vals: Vec<f64> = grid
                    .iter()
                    .zip(&table)
                    .map(|(&x, (g, sw))| x - g - chi.iter().map(|&j| sw[j - 1]).sum::<f64>())
                    .collect();
                let mut found = Vec::new();
                let push = |r: f64, found: &mut Vec<f64>| {
                    if !found.iter().any(|&q| (q - r).abs() <= 1e-13 * r.abs().max(1.0)) {
                        found.push(r);
                    }
                };
                for i in 0..grid.len() {
                    let (x, fx) = (grid[i], vals[i]);
                    if fx == 0.0 || (x == kappa && fx.abs() <= kink_tol) {
                        push(x, &mut found);
                        continue;
                    }
                    if i + 1 == grid.len() {
                        break;
                    }
                    let (y, fy) = (grid[i + 1], vals[i + 1]);
                    if side(x) != side(y) || fy == 0.0 || !(fx * fy < 0.0) {
                        continue;
                    }
                    let r = brent(f, x, y, fx, fy, 0.0)?;
                    push(r, &mut found);
                }
                // χ ≠ 0: g^χ grows without bound, keep going while δ - g^χ > 0
                if !chi.is_empty() {
                    let mut lo = *grid.last().unwrap();
                    let mut flo = *vals.last().unwrap();
                    let mut steps = 0;
                    while flo > 0.0 && steps < 60 {
                        let up = 2.0 * lo.max(1e-12);
                        let fup = f(up);
                        if fup <= 0.0 {
                            found.push(brent(f, lo, up, flo, fup, 0.0)?);
                            break;
                        }
                        lo = up;
                        flo = fup;
                        steps += 1;
                    }
                }
                found.sort_by(|x, y| x.partial_cmp(y).unwrap());
                Ok(found.into_iter().map(|r| (r, chi.clone())).collect())
            })
            .collect();
        Ok(out?.into_iter().flatten().collect())
    }
}

/// `β*` of the HYL transition in `d ≥ 3`.
pub fn beta_star(d: u32, b: f64) -> Option<f64> {
    if d < 3 || !(b > 0.0) {
        return None;
    }
    let df = d as f64;
    Some(((b * E).ln() * 2.0 - df * (4.0 * std::f64::consts::PI).ln()).exp().powf(1.0 / (df - 2.0)))
}

fn horner(coef: &[f64], z: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coef.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

// W_{-1}(-z) from ln z, valid where z underflows
fn wm1_from_ln(ln_z: f64) -> f64 {
    if ln_z > -700.0 {
        return wm1_neg(ln_z.exp());
    }
    // w + ln(-w) = ln z
    let mut w = ln_z - (-ln_z).ln();
    for _ in 0..50 {
        let f = w + (-w).ln() - ln_z;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-16 * w.abs() {
            break;
        }
    }
    w
}

/// All stationary points found by the `δ` scan, one per root and `χ`.
///
/// `unique` is set on each entry when it is the only solution. `b = 0`
/// yields the single PMF zero.
pub fn hyl_solutions(
    p: &ModelParams,
    cfg: &HylSolverConfig,
    trunc: Truncation,
) -> Result<Vec<MinimizerSolution>> {
    cfg.validate()?;
    let pr = p.reduced();
    pr.validate()?;
    if pr.model != Model::Hyl {
        return Err(domain("hyl_solutions needs the HYL model"));
    }
    if pr.b == 0.0 {
        return Ok(vec![pmf::zero_pmf(&ModelParams { model: Model::Pmf, ..pr }, trunc)?]);
    }
    let sys = HylSystem::new(&pr)?;
    let roots = sys.roots(cfg)?;
    let mut sols = roots
        .par_iter()
        .map(|(r, chi)| sys.solution_at(*r, chi, trunc))
        .collect::<Result<Vec<_>>>()?;
    let single = sols.len() == 1;
    for s in &mut sols {
        s.unique = single;
    }
    Ok(sols)
}

/// The HYL zero: the stationary point with the smallest objective.
///
/// When the runner-up is within `cfg.tol` (relative to `max(1, |objective|)`)
/// the one with smaller density is returned and `unique` is `false`.
pub fn zero_hyl(p: &ModelParams, cfg: &HylSolverConfig, trunc: Truncation) -> Result<MinimizerSolution> {
    select_min(hyl_solutions(p, cfg, trunc)?, cfg.tol)
}

pub(crate) fn select_min(mut sols: Vec<MinimizerSolution>, tol: f64) -> Result<MinimizerSolution> {
    if sols.is_empty() {
        return Err(Error::NonConvergence(
            "no solution of the HYL consistency equation found".into(),
        ));
    }
    sols.sort_by(|x, y| x.objective.partial_cmp(&y.objective).unwrap());
    let best = sols[0].objective;
    let tol = tol * best.abs().max(1.0);
    let ties: Vec<&MinimizerSolution> = sols.iter().filter(|s| s.objective - best <= tol).collect();
    let mut pick = ties
        .iter()
        .min_by(|x, y| x.delta_star.partial_cmp(&y.delta_star).unwrap())
        .map(|s| (*s).clone())
        .unwrap();
    pick.unique = sols.len() == 1 || ties.len() == 1;
    Ok(pick)
}

/// One `χ = 0` solution family at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyPoint {
    pub mu: f64,
    pub family: usize,
    pub delta: f64,
    /// `P^j = p(β, 0) - (I + βH_lsc)(ξ^j)/β`.
    pub pressure: f64,
}

/// Output of [`hyl_family_scan`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyScan {
    pub points: Vec<FamilyPoint>,
    /// Number of `χ = 0` solutions at each grid point.
    pub counts: Vec<(f64, usize)>,
    /// First grid point where the family with the largest `P^j` changes.
    pub mu_hat: Option<f64>,
    /// First grid point where the number of families increases.
    pub mu_lower: Option<f64>,
    /// Last grid point before the number of families first decreases.
    pub mu_upper: Option<f64>,
    pub warnings: Vec<String>,
}

impl FamilyScan {
    pub fn max_count(&self) -> usize {
        self.counts.iter().map(|c| c.1).max().unwrap_or(0)
    }

    pub fn at(&self, mu: f64) -> Vec<&FamilyPoint> {
        self.points.iter().filter(|p| p.mu == mu).collect()
    }
}

/// Tracks the `χ = 0` solutions across a grid of `μ + α` values.
///
/// Each family's next `δ` is predicted by linear extrapolation from its last
/// two points, and roots are matched to the nearest prediction. A match more
/// than 5% away from its prediction is kept only when the number of roots is
/// unchanged, and is reported in `warnings`, as are roots that fall within 5%
/// of two predictions.
pub fn hyl_family_scan(
    p: &ModelParams,
    mu_grid: &[f64],
    cfg: &HylSolverConfig,
) -> Result<FamilyScan> {
    cfg.validate()?;
    if mu_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(domain("mu grid must be strictly increasing"));
    }
    let base = p.reduced();
    let per_mu: Vec<Vec<(f64, f64)>> = mu_grid
        .par_iter()
        .map(|&mu| {
            let pm = base.with_mu(mu);
            let sys = HylSystem::new(&pm)?;
            let p0 = sys.w.qbar(0.0)? / pm.beta;
            let roots = sys.roots_for(cfg, &[Vec::new()])?;
            Ok(roots
                .into_iter()
                .filter_map(|(r, _)| sys.objective_at(r, &[]).map(|o| (r, p0 - o / pm.beta)))
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    let mut counts = Vec::new();
    let mut warnings = Vec::new();
    // (family id, δ at the previous grid point, predicted δ here)
    let mut prev: Vec<(usize, f64, f64)> = Vec::new();
    let mut next_id = 0usize;
    let mut mu_hat = None;
    let mut mu_lower = None;
    let mut mu_upper = None;
    let mut prev_best: Option<usize> = None;
    for (i, (&mu, roots)) in mu_grid.iter().zip(&per_mu).enumerate() {
        // descending δ so that family ids follow D^0 ≥ D^1 ≥ D^2 at birth
        let mut order: Vec<usize> = (0..roots.len()).collect();
        order.sort_by(|&x, &y| roots[y].0.partial_cmp(&roots[x].0).unwrap());
        let mut ids = vec![usize::MAX; roots.len()];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ri, r) in roots.iter().enumerate() {
            for (fi, f) in prev.iter().enumerate() {
                pairs.push(((r.0 - f.2).abs(), ri, fi));
            }
        }
        pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let same_count = roots.len() == prev.len();
        let mut used = vec![false; prev.len()];
        for (dist, ri, fi) in pairs {
            if ids[ri] != usize::MAX || used[fi] {
                continue;
            }
            let scale = roots[ri].0.abs().max(prev[fi].2.abs());
            if dist > 0.05 * scale {
                if !same_count {
                    continue;
                }
                warnings.push(format!(
                    "mu = {mu}: family {} jumps from delta = {} to {}",
                    prev[fi].0, prev[fi].1, roots[ri].0
                ));
            }
            ids[ri] = prev[fi].0;
            used[fi] = true;
        }
        for &ri in &order {
            if ids[ri] == usize::MAX {
                ids[ri] = next_id;
                next_id += 1;
            }
        }
        for ri in 0..roots.len() {
            for rj in ri + 1..roots.len() {
                let (a, b) = (roots[ri].0, roots[rj].0);
                if (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    warnings.push(format!("mu = {mu}: two families at delta = {a}"));
                }
            }
        }
        let count = roots.len();
        if i > 0 {
            let before = counts.last().map(|c: &(f64, usize)| c.1).unwrap_or(0);
            if count > before && mu_lower.is_none() {
                mu_lower = Some(mu);
            }
            if count < before && mu_upper.is_none() {
                mu_upper = Some(mu_grid[i - 1]);
            }
        }
        counts.push((mu, count));
        let best = (0..roots.len())
            .max_by(|&x, &y| roots[x].1.partial_cmp(&roots[y].1).unwrap())
            .map(|ri| ids[ri]);
        if let (Some(b), Some(pb)) = (best, prev_best) {
            if b != pb && mu_hat.is_none() {
                mu_hat = Some(mu);
            }
        }
        prev_best = best.or(prev_best);
        for (ri, r) in roots.iter().enumerate() {
            points.push(FamilyPoint {
                mu,
                family: ids[ri],
                delta: r.0,
                pressure: r.1,
            });
        }
        for r in roots.iter() {
            let near = prev
                .iter()
                .filter(|f| (r.0 - f.2).abs() <= 0.05 * r.0.abs().max(f.2.abs()))
                .count();
            if near > 1 {
                warnings.push(format!("mu = {mu}: root at delta = {} is ambiguous between families", r.0));
            }
        }
        let h = i.checked_sub(1).map(|j| (mu - mu_grid[j], mu_grid.get(i + 1).map(|m| m - mu)));
        prev = roots
            .iter()
            .enumerate()
            .map(|(ri, r)| {
                let old = prev.iter().find(|f| f.0 == ids[ri]).map(|f| f.1);
                let pred = match (old, h) {
                    (Some(o), Some((h0, Some(h1)))) => {
                        let x = r.0 + (r.0 - o) * h1 / h0;
                        if x > 0.0 { x } else { r.0 }
                    }
                    _ => r.0,
                };
                (ids[ri], r.0, pred)
            })
            .collect();
    }
    points.sort_by(|x, y| {
        x.mu.partial_cmp(&y.mu)
            .unwrap()
            .then(x.delta.partial_cmp(&y.delta).unwrap())
    });
    Ok(FamilyScan {
        points,
        counts,
        mu_hat,
        mu_lower,
        mu_upper,
        warnings,
    })
}
