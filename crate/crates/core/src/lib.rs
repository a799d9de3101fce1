//! Grand-canonical Bose gases through the statistics of their cycle counts.
//!
//! A configuration of the gas is summarised by `x = (x_k)`, the density of
//! cycles of length `k`. The reference process has independent Poisson counts
//! with intensities `q_k`; the ideal, cycle-mean-field (CMF),
//! particle-mean-field (PMF) and Huang–Yang–Luttinger (HYL) gases tilt it by a
//! Hamiltonian. This crate computes
//!
//! * rate functions and their zeros ([`model`], [`minimize`]),
//! * pressures, free energies, critical densities and condensates
//!   ([`thermo`]),
//! * Monte Carlo and exact-enumeration checks of the above ([`sim`]),
//!
//! on top of the special functions in [`specfun`].
//!
//! ```
//! use bosegas::{thermo, ModelParams};
//!
//! // d = 3 with β = 1/(4π): the ideal pressure at μ = 0 is 4π ζ(5/2)
//! let p = ModelParams::ideal(3, bosegas::BETA_NORM, 0.0);
//! let pressure = thermo::pressure(&p, &Default::default()).unwrap();
//! assert!((pressure - 4.0 * std::f64::consts::PI * 1.341487257250917).abs() < 1e-11);
//! ```

pub mod error;
pub mod ext;
pub mod minimize;
pub mod model;
pub mod sim;
pub mod specfun;
pub mod thermo;
pub mod verify;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use model::{CycleCounts, Model, ModelParams, TailPolicy, WeightSeq, BETA_NORM};
