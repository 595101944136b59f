use super::QuadraticMap;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Recorded forward orbit. `log_abs_derivative_prefix[k]` is log|Df^k(points[0])|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    pub points: Vec<Complex64>,
    pub log_abs_derivative_prefix: Vec<f64>,
    pub escaped_at: Option<usize>,
    pub escape_radius: f64,
}

/// Iterates until the orbit leaves the disk of radius `escape_radius` or
/// `max_steps` iterations were taken. The escaping point is recorded.
pub fn iterate_orbit(map: &QuadraticMap, z0: Complex64, max_steps: usize, escape_radius: f64) -> Result<OrbitTrace> {
    if max_steps < 1 {
        return Err(Error::InvalidArgument("max_steps must be at least 1".into()));
    }
    if !(escape_radius >= 4.0) {
        return Err(Error::InvalidArgument(format!("escape radius {escape_radius} below 4")));
    }
    let mut points = Vec::with_capacity(max_steps + 1);
    let mut prefix = Vec::with_capacity(max_steps + 1);
    let mut z = z0;
    let mut acc = 0.0;
    let mut escaped_at = None;
    for step in 0..=max_steps {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Overflow { step });
        }
        points.push(z);
        prefix.push(acc);
        if z.norm() > escape_radius {
            escaped_at = Some(step);
            break;
        }
        if step == max_steps {
            break;
        }
        let (fz, dz) = map.eval_with_deriv(z);
        acc += dz.norm().ln();
        z = fz;
    }
    Ok(OrbitTrace { points, log_abs_derivative_prefix: prefix, escaped_at, escape_radius })
}
