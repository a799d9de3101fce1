//! Model parameters, cycle weights, cycle-count sequences, Hamiltonians and
//! rate functions.

mod counts;
mod functional;
mod params;
mod weights;

pub use counts::{CycleCounts, TailPolicy};
pub use functional::{
    cumulant_density, cumulant_seq, density, hamiltonian, hamiltonian_lsc, objective, rate_ideal,
    rate_model, reference_eta, reference_rate, stationarity_gradient,
};
pub use params::{Model, ModelParams, Reduction, BETA_NORM};
pub use weights::{cycle_weight, qbar, WeightSeq};

pub(crate) use counts::{lambert_coef, lambert_tail_zmax, square_coef, tail_sum};
