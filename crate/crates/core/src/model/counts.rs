use super::weights::WeightSeq;
use crate::error::{domain, Result};
use crate::ext::ExtReal;
use crate::specfun::bose_g;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

/// What a [`CycleCounts`] holds beyond its explicit entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailPolicy {
    /// `x_k = 0` for `k > k_max`.
    Zero,
    /// `x_k = scale · q_k^{(eta)}` for `k > k_max`.
    Ideal {
        weights: WeightSeq,
        eta: f64,
        scale: f64,
    },
    /// `x_k = -W_0(-c k^2 q_k^{(eta)}) / (c k^2)` for `k > k_max`, with
    /// `c = coupling`. This is the tail of every HYL stationary point.
    Lambert {
        weights: WeightSeq,
        eta: f64,
        coupling: f64,
    },
}

impl TailPolicy {
    pub fn ideal(weights: WeightSeq, eta: f64) -> Self {
        TailPolicy::Ideal { weights, eta, scale: 1.0 }
    }
}

/// A cycle-count sequence: explicit entries `x_1..x_K` plus an analytic tail.
///
/// Every sum over `k` ([`CycleCounts::moment`], [`CycleCounts::density`], ...)
/// includes the tail in closed form through Bose functions, so a sequence with
/// an ideal tail has the exact infinite-volume density even though only `K`
/// numbers are stored.
///
/// Entries are allowed to be negative so that rate functions can report `+∞`
/// for them; physically meaningful states are nonnegative.
///
/// ```
/// use bosegas::{CycleCounts, TailPolicy, WeightSeq, ExtReal};
///
/// let w = WeightSeq::new(3, bosegas::BETA_NORM).unwrap();
/// // nothing explicit, ideal tail at η = 0: density Σ k^{-3/2} = ζ(3/2)
/// let x = CycleCounts::new(vec![], TailPolicy::ideal(w, 0.0)).unwrap();
/// assert!((x.density().unwrap() - 2.612375348685488).abs() < 1e-12);
///
/// let w2 = WeightSeq::new(2, 1.0).unwrap();
/// let y = CycleCounts::new(vec![], TailPolicy::ideal(w2, 0.0)).unwrap();
/// assert_eq!(y.density(), ExtReal::PosInfinity);
/// ```
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleCounts {
    values: Vec<f64>,
    #[serde(skip)]
    log_values: Option<Vec<f64>>,
    tail: TailPolicy,
}

impl CycleCounts {
    pub fn new(values: Vec<f64>, tail: TailPolicy) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(domain("cycle counts must be finite"));
        }
        match tail {
            TailPolicy::Zero => {}
            TailPolicy::Ideal { weights, eta, scale } => {
                if weights.cutoff().is_some() {
                    return Err(domain("analytic tails need weights without cutoff"));
                }
                if eta > 0.0 || !(scale >= 0.0) || !scale.is_finite() {
                    return Err(domain("ideal tail needs eta <= 0 and scale >= 0"));
                }
            }
            TailPolicy::Lambert { weights, eta, coupling } => {
                if weights.cutoff().is_some() {
                    return Err(domain("analytic tails need weights without cutoff"));
                }
                if eta > 0.0 || !(coupling > 0.0) {
                    return Err(domain("Lambert tail needs eta <= 0 and coupling > 0"));
                }
                let zmax = lambert_tail_zmax(&weights, eta, coupling, values.len());
                if !(zmax * std::f64::consts::E <= 0.5) {
                    return Err(domain(format!(
                        "Lambert tail does not converge beyond k = {} (max e·z = {})",
                        values.len(),
                        zmax * std::f64::consts::E
                    )));
                }
            }
        }
        Ok(CycleCounts {
            values,
            log_values: None,
            tail,
        })
    }

    /// A finite sequence with nothing beyond its last entry.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::new(values, TailPolicy::Zero)
    }

    pub fn zeros(k_max: usize) -> Self {
        CycleCounts {
            values: vec![0.0; k_max],
            log_values: None,
            tail: TailPolicy::Zero,
        }
    }

    /// Attaches `ln x_k` computed elsewhere (avoids underflow in rate sums).
    pub fn with_log_values(mut self, logs: Vec<f64>) -> Result<Self> {
        if logs.len() != self.values.len() {
            return Err(domain("log values must match the explicit entries"));
        }
        self.log_values = Some(logs);
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> Option<&[f64]> {
        self.log_values.as_deref()
    }

    pub fn k_max(&self) -> usize {
        self.values.len()
    }

    pub fn tail(&self) -> &TailPolicy {
        &self.tail
    }

    /// `x_k` for `k ≥ 1`, including the tail.
    pub fn get(&self, k: usize) -> f64 {
        assert!(k >= 1, "cycle lengths start at 1");
        if k <= self.values.len() {
            return self.values[k - 1];
        }
        match self.tail {
            TailPolicy::Zero => 0.0,
            TailPolicy::Ideal { weights, eta, scale } => scale * weights.q(k, eta),
            TailPolicy::Lambert { weights, eta, coupling } => {
                let c = coupling * (k * k) as f64;
                -crate::specfun::w0_neg(c * weights.q(k, eta)) / c
            }
        }
    }

    /// `ln x_k` for the explicit entries (uses stored logs when present).
    pub fn ln_get(&self, k: usize) -> f64 {
        match &self.log_values {
            Some(l) => l[k - 1],
            None => self.values[k - 1].ln(),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `Σ_k k^p x_k` including the tail.
    pub fn moment(&self, p: f64) -> ExtReal {
        let head: f64 = self
            .values
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &v)| if p == 0.0 { v } else { v * ((i + 1) as f64).powf(p) })
            .sum();
        match self.tail_moment(p) {
            ExtReal::Finite(t) => ExtReal::Finite(head + t),
            other => other,
        }
    }

    /// `Σ_k k^p x_k^2` including the tail.
    pub fn square_moment(&self, p: f64) -> ExtReal {
        let head: f64 = self
            .values
            .iter()
            .enumerate()
            .rev()
            .map(|(i, &v)| v * v * ((i + 1) as f64).powf(p))
            .sum();
        match self.tail_square_moment(p) {
            ExtReal::Finite(t) => ExtReal::Finite(head + t),
            other => other,
        }
    }

    /// Particle density `D(x) = Σ_k k x_k`.
    pub fn density(&self) -> ExtReal {
        self.moment(1.0)
    }

    /// Cycle density `Σ_k x_k`.
    pub fn total(&self) -> ExtReal {
        self.moment(0.0)
    }

    /// `Σ_k x_k ln(x_k / q_k^{(eta_ref)})` with `0 ln 0 = 0`.
    ///
    /// `+∞` if an entry is negative or positive where the reference weight
    /// vanishes.
    pub fn xlog_ratio(&self, w: &WeightSeq, eta_ref: f64) -> ExtReal {
        let mut head = 0.0;
        for k in (1..=self.values.len()).rev() {
            let x = self.values[k - 1];
            if x < 0.0 {
                return ExtReal::PosInfinity;
            }
            if x == 0.0 {
                continue;
            }
            let lq = w.ln_q(k, eta_ref);
            if lq == f64::NEG_INFINITY {
                return ExtReal::PosInfinity;
            }
            head += x * (self.ln_get(k) - lq);
        }
        let tail = match self.tail {
            TailPolicy::Zero => 0.0,
            TailPolicy::Ideal { eta, scale, .. } => {
                if scale == 0.0 {
                    0.0
                } else if w.cutoff().is_some() {
                    return ExtReal::PosInfinity;
                } else {
                    let m0 = self.tail_moment(0.0).to_f64();
                    let mut t = scale.ln() * m0;
                    let slope = w.beta() * (eta - eta_ref);
                    if slope != 0.0 {
                        t += slope * self.tail_moment(1.0).to_f64();
                    }
                    t
                }
            }
            TailPolicy::Lambert { eta, coupling, .. } => {
                if w.cutoff().is_some() {
                    return ExtReal::PosInfinity;
                }
                // ln(x_k / q_k^{(η)}) = c k^2 x_k on the Lambert tail
                let mut t = coupling * self.tail_square_moment(2.0).to_f64();
                let slope = w.beta() * (eta - eta_ref);
                if slope != 0.0 {
                    t += slope * self.tail_moment(1.0).to_f64();
                }
                t
            }
        };
        ExtReal::from_f64(head + tail)
    }

    fn tail_moment(&self, p: f64) -> ExtReal {
        let k_max = self.values.len();
        match self.tail {
            TailPolicy::Zero => ExtReal::Finite(0.0),
            TailPolicy::Ideal { weights, eta, scale } => {
                if scale == 0.0 {
                    return ExtReal::Finite(0.0);
                }
                let s = 1.0 + weights.half_d() - p;
                scale_ext(tail_sum(s, -weights.beta() * eta, k_max), scale * weights.prefactor())
            }
            TailPolicy::Lambert { weights, eta, coupling } => {
                let cp = coupling * weights.prefactor();
                let step = weights.half_d() - 1.0;
                let mut total = 0.0;
                let mut cp_n = 1.0;
                for n in 1..=MAX_TAIL_TERMS {
                    cp_n *= cp;
                    let s = 2.0 - p + n as f64 * step;
                    let t = tail_sum(s, -(n as f64) * weights.beta() * eta, k_max);
                    let t = match t {
                        ExtReal::Finite(v) => v,
                        other => return other,
                    };
                    let term = lambert_coef(n) * cp_n * t;
                    total += term;
                    if term.abs() <= 1e-17 * total.abs() || term == 0.0 {
                        break;
                    }
                }
                ExtReal::Finite(total / coupling)
            }
        }
    }

    fn tail_square_moment(&self, p: f64) -> ExtReal {
        let k_max = self.values.len();
        match self.tail {
            TailPolicy::Zero => ExtReal::Finite(0.0),
            TailPolicy::Ideal { weights, eta, scale } => {
                if scale == 0.0 {
                    return ExtReal::Finite(0.0);
                }
                let pre = scale * weights.prefactor();
                let s = 2.0 + 2.0 * weights.half_d() - p;
                scale_ext(tail_sum(s, -2.0 * weights.beta() * eta, k_max), pre * pre)
            }
            TailPolicy::Lambert { weights, eta, coupling } => {
                let cp = coupling * weights.prefactor();
                let step = weights.half_d() - 1.0;
                let mut total = 0.0;
                let mut cp_n = cp;
                for n in 2..=MAX_TAIL_TERMS {
                    cp_n *= cp;
                    let s = 4.0 - p + n as f64 * step;
                    let t = match tail_sum(s, -(n as f64) * weights.beta() * eta, k_max) {
                        ExtReal::Finite(v) => v,
                        other => return other,
                    };
                    let term = square_coef(n) * cp_n * t;
                    total += term;
                    if term.abs() <= 1e-17 * total.abs() || term == 0.0 {
                        break;
                    }
                }
                ExtReal::Finite(total / (coupling * coupling))
            }
        }
    }
}

pub(crate) const MAX_TAIL_TERMS: usize = 120;

fn scale_ext(x: ExtReal, s: f64) -> ExtReal {
    match x {
        ExtReal::Finite(v) => ExtReal::Finite(v * s),
        other => other,
    }
}

/// `n^{n-1} / n!`, the Taylor coefficients of `-W_0(-z)`.
pub(crate) fn lambert_coef(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 1.0) * nf.ln() - ln_gamma(nf + 1.0)).exp()
}

/// Coefficients of `W_0(-z)^2 = Σ_N C_N z^N`.
pub(crate) fn square_coef(n: usize) -> f64 {
    (1..n).map(|i| lambert_coef(i) * lambert_coef(n - i)).sum()
}

/// Largest `z_k = c k^2 q_k^{(η)}` over `k > k_max`.
pub(crate) fn lambert_tail_zmax(w: &WeightSeq, eta: f64, c: f64, k_max: usize) -> f64 {
    let expo = 1.0 - w.half_d();
    let k0 = (k_max + 1) as f64;
    let z = |k: f64| (c.ln() + w.ln_prefactor() + expo * k.ln() + w.beta() * eta * k).exp();
    if expo <= 0.0 {
        return z(k0);
    }
    if eta == 0.0 {
        return f64::INFINITY;
    }
    // k^{expo} e^{βηk} peaks at k = expo / (β|η|)
    let peak = expo / (w.beta() * -eta);
    z(peak.max(k0))
}

/// `Σ_{k > k_max} k^{-s} e^{-αk}`.
pub(crate) fn tail_sum(s: f64, alpha: f64, k_max: usize) -> ExtReal {
    if alpha == 0.0 && s <= 1.0 {
        return ExtReal::PosInfinity;
    }
    if alpha >= 0.02 {
        // direct summation, no cancellation
        let decay = (-alpha).exp();
        let mut sum = 0.0;
        let mut k = k_max;
        loop {
            k += 1;
            let kf = k as f64;
            let t = (-alpha * kf - s * kf.ln()).exp();
            sum += t;
            let ratio = if s >= 0.0 {
                decay
            } else {
                decay * (1.0 + 1.0 / kf).powf(-s)
            };
            if t == 0.0 || (ratio < 1.0 && t * ratio / (1.0 - ratio) <= 1e-17 * sum) {
                break;
            }
        }
        return ExtReal::Finite(sum);
    }
    let g = match bose_g(s, alpha).expect("alpha >= 0") {
        ExtReal::Finite(v) => v,
        other => return other,
    };
    let head: f64 = (1..=k_max)
        .rev()
        .map(|k| {
            let kf = k as f64;
            (-alpha * kf - s * kf.ln()).exp()
        })
        .sum();
    ExtReal::Finite((g - head).max(0.0))
}
