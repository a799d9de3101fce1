use super::zeta::zeta_any;
use crate::error::{domain, Result};
use crate::ext::ExtReal;
use serde::Serialize;
use statrs::function::gamma::gamma;

/// Below this `α` (and for moderate orders) the small-`α` expansion is used.
pub const SERIES_CROSSOVER: f64 = 0.5;

/// Orders at or above this always use the direct series: `k^{-n}` alone makes
/// it converge within a handful of terms.
const HIGH_ORDER: f64 = 20.0;

const MAX_TERMS: usize = 10_000_000;

/// How a Bose function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoseMethod {
    /// `α = 0`, the value is `ζ(n)` or infinite.
    Zeta,
    /// Direct summation of `Σ k^{-n} e^{-αk}`.
    Series,
    /// Small-`α` expansion around the logarithmic singularity.
    Expansion,
}

/// Value of `g(n, α)` together with how it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoseEval {
    pub value: ExtReal,
    pub method: BoseMethod,
    /// Bound on the neglected tail (series) or the last retained term
    /// (expansion).
    pub error_bound: f64,
    pub terms: usize,
}

/// Bose function `g(n, α) = Li_n(e^{-α}) = Σ_{k≥1} k^{-n} e^{-αk}` for `α ≥ 0`.
///
/// Returns `+∞` exactly when `α = 0` and `n ≤ 1`.
///
/// ```
/// use bosegas::specfun::bose_g;
/// use bosegas::ExtReal;
///
/// let g = bose_g(1.0, 1.0).unwrap().unwrap();
/// assert!((g + (1.0 - (-1.0f64).exp()).ln()).abs() < 1e-14);
/// assert_eq!(bose_g(1.0, 0.0).unwrap(), ExtReal::PosInfinity);
/// ```
pub fn bose_g(n: f64, alpha: f64) -> Result<ExtReal> {
    bose_g_eval(n, alpha).map(|e| e.value)
}

/// Like [`bose_g`] but also reports the method and an error bound.
pub fn bose_g_eval(n: f64, alpha: f64) -> Result<BoseEval> {
    if n.is_nan() || alpha.is_nan() {
        return Err(domain("bose_g: NaN argument"));
    }
    if alpha < 0.0 {
        return Err(domain(format!("bose_g needs alpha >= 0, got {alpha}")));
    }
    if n.is_infinite() {
        return Err(domain("bose_g: infinite order"));
    }
    if alpha == 0.0 {
        let value = if n > 1.0 {
            ExtReal::Finite(zeta_any(n))
        } else {
            ExtReal::PosInfinity
        };
        return Ok(BoseEval {
            value,
            method: BoseMethod::Zeta,
            error_bound: 0.0,
            terms: 0,
        });
    }
    if alpha == f64::INFINITY {
        return Ok(BoseEval {
            value: ExtReal::Finite(0.0),
            method: BoseMethod::Series,
            error_bound: 0.0,
            terms: 0,
        });
    }
    if alpha >= SERIES_CROSSOVER || n >= HIGH_ORDER {
        bose_series(n, alpha)
    } else {
        bose_expansion(n, alpha)
    }
}

/// Direct summation with a certified tail bound.
///
/// Works for every `α > 0` (and `α = 0` when `n > 1`) but needs roughly
/// `40/α` terms, so it is slow near `α = 0`. Past `10^7` terms it stops and
/// reports the remaining bound in `error_bound`.
pub fn bose_series(n: f64, alpha: f64) -> Result<BoseEval> {
    if alpha < 0.0 || alpha.is_nan() || n.is_nan() {
        return Err(domain("bose_series needs alpha >= 0"));
    }
    if alpha == 0.0 && n <= 1.0 {
        return Ok(BoseEval {
            value: ExtReal::PosInfinity,
            method: BoseMethod::Series,
            error_bound: 0.0,
            terms: 0,
        });
    }
    let decay = (-alpha).exp();
    let mut sum = 0.0;
    let mut bound = f64::INFINITY;
    let mut k = 0usize;
    while k < MAX_TERMS {
        k += 1;
        let kf = k as f64;
        let term = (-alpha * kf - n * kf.ln()).exp();
        sum += term;
        // tail after k: geometric bound once the term ratio is below one,
        // integral bound for n > 1
        let next = kf + 1.0;
        let t_next = (-alpha * next - n * next.ln()).exp();
        let ratio = if n >= 0.0 {
            decay
        } else {
            decay * (1.0 + 1.0 / next).powf(-n)
        };
        let mut b = f64::INFINITY;
        if ratio < 1.0 {
            b = t_next / (1.0 - ratio);
        }
        if n > 1.0 {
            b = b.min(kf.powf(1.0 - n) * (-alpha * kf).exp() / (n - 1.0));
        }
        bound = b;
        if b <= 1e-17 * sum.abs() || (sum == 0.0 && term == 0.0 && b == 0.0) {
            break;
        }
    }
    Ok(BoseEval {
        value: ExtReal::Finite(sum),
        method: BoseMethod::Series,
        error_bound: bound,
        terms: k,
    })
}

/// Small-`α` expansion, valid for `0 < α < 2π`.
///
/// Non-integer `n`: `Γ(1-n) α^{n-1} + Σ_k ζ(n-k) (-α)^k / k!`.
/// Integer `n ≥ 1`: the `k = n-1` term is replaced by
/// `(-α)^{n-1}/(n-1)! · (H_{n-1} - ln α)`.
pub fn bose_expansion(n: f64, alpha: f64) -> Result<BoseEval> {
    if !(alpha > 0.0 && alpha < 2.0 * std::f64::consts::PI) {
        return Err(domain(format!(
            "bose_expansion needs 0 < alpha < 2π, got {alpha}"
        )));
    }
    let nr = n.round();
    let integer = (n - nr).abs() < 1e-12;
    let skip = if integer && nr >= 1.0 {
        Some((nr - 1.0) as usize)
    } else {
        None
    };
    let mut total = match skip {
        Some(m) => {
            let mut p = 1.0;
            let mut h = 0.0;
            for j in 1..=m {
                p *= -alpha / j as f64;
                h += 1.0 / j as f64;
            }
            p * (h - alpha.ln())
        }
        None => gamma(1.0 - n) * alpha.powf(n - 1.0),
    };
    let mut p = 1.0; // (-α)^k / k!
    let mut last = 0.0;
    let mut small_run = 0;
    let mut k = 0usize;
    loop {
        if Some(k) != skip {
            let z = zeta_any(if integer { nr - k as f64 } else { n - k as f64 });
            let term = z * p;
            total += term;
            if z != 0.0 {
                last = term.abs();
                if (k as f64) > n + 1.0 && last <= 1e-17 * total.abs() {
                    small_run += 1;
                    if small_run >= 2 {
                        break;
                    }
                } else {
                    small_run = 0;
                }
            }
        }
        k += 1;
        if k > 400 {
            break;
        }
        p *= -alpha / k as f64;
    }
    Ok(BoseEval {
        value: ExtReal::Finite(total),
        method: BoseMethod::Expansion,
        error_bound: last,
        terms: k + 1,
    })
}
