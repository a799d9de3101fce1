//! Scalar special functions: the Bose function `g(n, α)`, the Riemann zeta
//! function and the two real branches of Lambert W.
//!
//! All functions are pure and thread safe.

mod bose;
mod lambert;
mod zeta;

pub use bose::{bose_expansion, bose_g, bose_g_eval, bose_series, BoseEval, BoseMethod, SERIES_CROSSOVER};
pub use lambert::{lambert_w, lambert_w_prime, WBranch, INV_E};
pub use zeta::zeta;

pub(crate) use lambert::{w0_neg, wm1_neg};
