//! Tail asymptotics of one-dimensional diffusions: geodesic distances,
//! energy minimisers, CEV densities, time changes and Monte Carlo checks.

pub mod carrlee;
pub mod cev;
pub mod energy;
pub mod error;
pub mod expr;
pub mod geodesic;
pub mod montecarlo;
pub mod quad;
pub mod real;
pub mod roots;
pub mod timechange;
pub mod volmodel;

pub use error::{Error, Result};
pub use real::Real;

pub type VolModelF64 = volmodel::VolModel<f64>;
pub type VolModelF32 = volmodel::VolModel<f32>;
