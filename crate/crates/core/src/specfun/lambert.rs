use crate::error::{domain, Error, Result};
use serde::{Deserialize, Serialize};

/// `1/e` rounded to the nearest double (slightly above the true value).
pub const INV_E: f64 = 0.367_879_441_171_442_33;
// true 1/e = INV_E + INV_E_LO
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;

const MAX_ITER: usize = 100;

/// The two real branches of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WBranch {
    /// `W_0`, defined on `[-1/e, ∞)` with values `≥ -1`.
    Principal,
    /// `W_{-1}`, defined on `[-1/e, 0)` with values `≤ -1`.
    Lower,
}

impl WBranch {
    /// Conventional branch index: `0` or `-1`.
    pub fn index(self) -> i32 {
        match self {
            WBranch::Principal => 0,
            WBranch::Lower => -1,
        }
    }
}

/// Real Lambert W: the `w` on the requested branch with `w e^w = x`.
///
/// Halley iteration from branch-specific seeds (branch-point series near
/// `-1/e`, asymptotic logs far out), with bisection as a fallback.
///
/// ```
/// use bosegas::specfun::{lambert_w, WBranch};
///
/// let omega = lambert_w(WBranch::Principal, 1.0).unwrap();
/// assert!((omega * omega.exp() - 1.0).abs() < 1e-15);
/// assert_eq!(lambert_w(WBranch::Lower, -(-1.0f64).exp()).unwrap(), -1.0);
/// assert!(lambert_w(WBranch::Lower, 0.5).is_err());
/// ```
pub fn lambert_w(branch: WBranch, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("lambert_w: NaN argument"));
    }
    if x < -INV_E {
        return Err(domain(format!("lambert_w: {x} < -1/e")));
    }
    if x == -INV_E {
        return Ok(-1.0);
    }
    match branch {
        WBranch::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
            Ok(principal(x))
        }
        WBranch::Lower => {
            if x >= 0.0 {
                return Err(domain(format!("lambert_w lower branch needs x < 0, got {x}")));
            }
            Ok(lower(x))
        }
    }
}

/// Derivative `W'(x) = W / (x (1 + W))`, with the limit `1` at `x = 0`.
///
/// ```
/// use bosegas::specfun::{lambert_w_prime, WBranch};
///
/// let e = std::f64::consts::E;
/// let d = lambert_w_prime(WBranch::Principal, e).unwrap();
/// assert!((d - 0.5 / e).abs() < 1e-15);
/// ```
pub fn lambert_w_prime(branch: WBranch, x: f64) -> Result<f64> {
    let w = lambert_w(branch, x)?;
    if w == -1.0 || x == -INV_E {
        return Err(Error::Singular("W'(x) is infinite at x = -1/e".into()));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    Ok(w / (x * (1.0 + w)))
}

// distance to the branch point, x + 1/e, without losing the low bits
fn branch_gap(x: f64) -> f64 {
    (x + INV_E) + INV_E_LO
}

fn branch_point_p(x: f64) -> f64 {
    (2.0 * std::f64::consts::E * branch_gap(x)).max(0.0).sqrt()
}

fn principal(x: f64) -> f64 {
    if x > std::f64::consts::E {
        // log form: w + ln w = ln x
        let l1 = x.ln();
        let l2 = l1.ln();
        let w0 = l1 - l2 + l2 / l1;
        return halley_log(w0, l1, false).unwrap_or_else(|| bisect(WBranch::Principal, x));
    }
    let w0 = if x < -0.25 {
        let p = branch_point_p(x);
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if x.abs() < 0.05 {
        x * (1.0 - x * (1.0 - 1.5 * x))
    } else {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    };
    halley(w0, x).unwrap_or_else(|| bisect(WBranch::Principal, x))
}

fn lower(x: f64) -> f64 {
    if x > -0.25 {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        let w0 = l1 - l2 + l2 / l1;
        return halley_log(w0, l1, true).unwrap_or_else(|| bisect(WBranch::Lower, x));
    }
    let p = branch_point_p(x);
    let w0 = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
    halley(w0, x).unwrap_or_else(|| bisect(WBranch::Lower, x))
}

// Halley on f(w) = w e^w - x
fn halley(mut w: f64, x: f64) -> Option<f64> {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return Some(w);
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            return Some(w);
        }
        let fp = ew * wp1;
        let step = f / (fp - (w + 2.0) * f / (2.0 * wp1));
        let next = w - step;
        if !next.is_finite() {
            return None;
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1.0) {
            return Some(next);
        }
        w = next;
    }
    None
}

// Halley on f(w) = w + ln(±w) - ln|x|, used away from the branch point
fn halley_log(mut w: f64, ln_x: f64, negative: bool) -> Option<f64> {
    for _ in 0..MAX_ITER {
        let lw = if negative { (-w).ln() } else { w.ln() };
        let f = w + lw - ln_x;
        let fp = 1.0 + 1.0 / w;
        let fpp = -1.0 / (w * w);
        let step = 2.0 * f * fp / (2.0 * fp * fp - f * fpp);
        let next = w - step;
        if !next.is_finite() || (negative && next >= 0.0) || (!negative && next <= 0.0) {
            return None;
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1.0) {
            return Some(next);
        }
        w = next;
    }
    None
}

fn bisect(branch: WBranch, x: f64) -> f64 {
    // w e^w is increasing on [-1, ∞) and decreasing on (-∞, -1]
    let (mut lo, mut hi) = match branch {
        WBranch::Principal => {
            let mut hi = 1.0f64.max(x.ln_1p());
            while hi * hi.exp() < x {
                hi *= 2.0;
            }
            (-1.0, hi)
        }
        WBranch::Lower => {
            let mut lo = -2.0f64;
            while lo * lo.exp() < x {
                lo *= 2.0;
            }
            (lo, -1.0)
        }
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let f = mid * mid.exp() - x;
        let below = match branch {
            WBranch::Principal => f < 0.0,
            WBranch::Lower => f > 0.0,
        };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const SERIES_CUTOFF: f64 = 0.02;

/// `W_0(-z)` for `0 ≤ z ≤ 1/e`, tuned for long sums of small arguments.
///
/// Values of `z` above `1/e` by less than a relative `1e-12` are clamped to
/// the branch point; anything further out gives NaN.
pub(crate) fn w0_neg(z: f64) -> f64 {
    if z < SERIES_CUTOFF {
        // -W_0(-z) = Σ n^{n-1} z^n / n!
        const C: [f64; 14] = [
            1.0,
            1.0,
            1.5,
            2.6666666666666665,
            5.208333333333333,
            10.8,
            23.343055555555555,
            52.01269841269841,
            118.62522321428571,
            275.5731922398589,
            649.7871723434745,
            1551.1605194805195,
            3741.4497029592385,
            9104.500241158019,
        ];
        let mut acc = C[13];
        for c in C[..13].iter().rev() {
            acc = acc * z + c;
        }
        return -(acc * z);
    }
    if z > INV_E {
        if z <= INV_E * (1.0 + 1e-12) {
            return -1.0;
        }
        return f64::NAN;
    }
    lambert_w(WBranch::Principal, -z).unwrap_or(f64::NAN)
}

/// `W_{-1}(-z)` for `0 < z ≤ 1/e`, with the same clamping as [`w0_neg`].
pub(crate) fn wm1_neg(z: f64) -> f64 {
    if z > INV_E {
        if z <= INV_E * (1.0 + 1e-12) {
            return -1.0;
        }
        return f64::NAN;
    }
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    lambert_w(WBranch::Lower, -z).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_argument_series_matches_iteration() {
        for &z in &[1e-6, 1e-3, 0.01, 0.0199] {
            let a = w0_neg(z);
            let b = halley(-z, -z).unwrap();
            assert!((a - b).abs() <= 1e-16 * b.abs().max(1e-300) * 8.0, "{z}: {a} {b}");
        }
    }

    #[test]
    fn branch_point_clamp() {
        assert_eq!(w0_neg(INV_E), -1.0);
        assert_eq!(wm1_neg(INV_E * (1.0 + 1e-13)), -1.0);
        assert!(w0_neg(0.4).is_nan());
    }

    #[test]
    fn close_to_branch_point() {
        for &eps in &[1e-15, 1e-12, 1e-9, 1e-6, 1e-3] {
            let x = -INV_E + eps;
            for b in [WBranch::Principal, WBranch::Lower] {
                let w = lambert_w(b, x).unwrap();
                assert!((w * w.exp() - x).abs() < 1e-15, "{b:?} {eps}");
            }
        }
    }
}
