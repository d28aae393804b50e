//! Quantum radiation from dynamical external conditions at finite
//! temperature: particle creation by moving mirrors, vibrating cavities,
//! time-dependent dielectrics and expanding spacetimes, evaluated in
//! quadratic response and cross-checked against independent numerical
//! oracles.
//!
//! Natural units (ħ = c = k_B = 1) are used everywhere; [`units`] converts
//! laboratory quantities at the boundary.

pub mod cavity;
pub mod dielectric;
pub mod error;
pub mod frw;
pub mod mirror;
pub mod numerics;
pub mod response;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
pub use thermal::Temperature;
