use serde::{Deserialize, Serialize};
use std::fmt;

/// A real number that may also be `+∞` or `-∞`.
///
/// Divergent series (a critical density in two dimensions, a Bose function at
/// `α = 0` and order `n ≤ 1`) come back as an explicit infinity rather than a
/// bare `f64::INFINITY`, so callers have to branch on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtReal {
    Finite(f64),
    PosInfinity,
    NegInfinity,
}

impl ExtReal {
    /// Maps a float to the extended reals. NaN maps to `Finite(NaN)`.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::PosInfinity
        } else if x == f64::NEG_INFINITY {
            ExtReal::NegInfinity
        } else {
            ExtReal::Finite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_pos_infinite(self) -> bool {
        matches!(self, ExtReal::PosInfinity)
    }

    /// Lossy conversion back to `f64` (infinities become `±inf`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::PosInfinity => f64::INFINITY,
            ExtReal::NegInfinity => f64::NEG_INFINITY,
        }
    }

    /// Unwraps a finite value, panicking otherwise.
    pub fn unwrap(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            other => panic!("called `ExtReal::unwrap` on {other}"),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInfinity => f.write_str("inf"),
            ExtReal::NegInfinity => f.write_str("-inf"),
        }
    }
}
