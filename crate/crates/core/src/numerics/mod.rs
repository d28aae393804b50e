//! Numerical building blocks shared by the scenario modules.

pub mod expm;
pub mod magnus;
pub mod quad;
pub mod spectral;
pub mod spline;
