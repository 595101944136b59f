//! Numerical workbench for the zero-temperature behaviour of geometric Gibbs
//! states of real quadratic maps near the Chebyshev parameter.
//!
//! The crate is split by role:
//! - [`dynamics`]: maps, orbits, Green's function, Böttcher coordinate, rays, periodic points.
//! - [`puzzle`]: real puzzle traces, the Cantor set data, itineraries and parameter search.
//! - [`deform`]: the explicit deformation family and its interpolation identities.
//! - [`pressure`]: first return / landing branches, partition functions and pressure.
//! - [`series`]: exact block partition and two-variable series in log-domain extended precision.
//! - [`schedule`]: sign-driven hat itineraries, temperature windows and schedules.

pub mod config;
pub mod deform;
pub mod dynamics;
pub mod error;
pub mod pressure;
pub mod puzzle;
pub mod schedule;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
