//! Quadratic and deformed polynomial dynamics on the complex plane.

mod angle;
mod green;
mod map;
mod orbit;
mod periodic;
mod ray;

pub use angle::Angle;
pub use green::{boettcher, escape_radius, green_potential, GreenValue};
pub use map::{MapKind, QuadraticMap};
pub use orbit::{iterate_orbit, OrbitTrace};
pub use periodic::{fixed_points, lyapunov_exponent, refine_periodic_orbit, FixedPointPair};
pub use ray::{trace_external_ray, RayPolyline, LANDING_TOLERANCE};
