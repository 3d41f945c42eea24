//! Discounted EWA (multiplicative weights with memory loss) learning dynamics
//! on two-resource nonatomic congestion games.
//!
//! The population state is the fraction `x` of agents on resource 1, updated by
//! the interval map `f(x) = x^(1-σ) / (x^(1-σ) + (1-x)^(1-σ) e^(a(x-b)))`.
//! The crate evaluates that map and its conjugate form, locates the interior
//! equilibrium, classifies its stability, hunts for attracting cycles and
//! period-3 chaos witnesses, and sweeps parameter planes for diagrams.

// `!(x > 0.0)` style guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod orbits;
pub mod stability;
pub mod sweep;
pub mod verify;

pub use dynamics::{MwuConfig, Params, WeightPair};
pub use error::{Error, Result};
