use super::{MapKind, QuadraticMap};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointPair {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub alpha_multiplier: Complex64,
    pub beta_multiplier: Complex64,
}

fn newton_fixed(map: &QuadraticMap, seed: Complex64) -> Result<Complex64> {
    let mut z = seed;
    for _ in 0..100 {
        let (fz, dz) = map.eval_with_deriv(z);
        let step = (fz - z) / (dz - 1.0);
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    let res = (map.eval(z) - z).norm();
    if !(res < 1e-12) {
        return Err(Error::NoConvergence(format!("fixed point Newton stalled at {z} (residual {res:e})")));
    }
    Ok(z)
}

/// α = (1 − √(1−4c))/2 and β = (1 + √(1−4c))/2; deformed maps continue both
/// by Newton from the values of z² + λ.
pub fn fixed_points(map: &QuadraticMap) -> Result<FixedPointPair> {
    let c = map.c();
    let disc = (1.0 - 4.0 * c).sqrt();
    if disc.norm() < 1e-12 {
        return Err(Error::Domain("c = 1/4: fixed points collide".into()));
    }
    let (mut alpha, mut beta) = ((1.0 - disc) / 2.0, (1.0 + disc) / 2.0);
    if map.kind == MapKind::Deformed {
        alpha = newton_fixed(map, alpha)?;
        beta = newton_fixed(map, beta)?;
    }
    Ok(FixedPointPair { alpha, beta, alpha_multiplier: map.deriv(alpha), beta_multiplier: map.deriv(beta) })
}

/// Newton on f^p(z) − z, followed by a minimal-period check. Returns the orbit
/// starting at the refined point.
pub fn refine_periodic_orbit(map: &QuadraticMap, seed: Complex64, period: usize) -> Result<Vec<Complex64>> {
    if period < 1 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let mut z = seed;
    for _ in 0..200 {
        let (fz, dz) = map.iterate_with_deriv(z, period);
        let step = (fz - z) / (dz - 1.0);
        if !step.re.is_finite() || !step.im.is_finite() {
            return Err(Error::NoConvergence(format!("period-{period} Newton diverged from {seed}")));
        }
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    let res = (map.iterate(z, period) - z).norm();
    if !(res < 1e-12) {
        return Err(Error::NoConvergence(format!("period-{period} residual {res:e} at {z}")));
    }
    for d in 1..period {
        if period % d == 0 && (map.iterate(z, d) - z).norm() < 1e-8 {
            return Err(Error::WrongPeriod { expected: period, found: d });
        }
    }
    let mut orbit = Vec::with_capacity(period);
    let mut w = z;
    for _ in 0..period {
        orbit.push(w);
        w = map.eval(w);
    }
    Ok(orbit)
}

/// (1/m) Σ log|Df| over a periodic orbit.
pub fn lyapunov_exponent(map: &QuadraticMap, orbit: &[Complex64], period: usize) -> Result<f64> {
    if period == 0 || orbit.len() < period {
        return Err(Error::InvalidArgument("orbit shorter than its period".into()));
    }
    let close = (map.iterate(orbit[0], period) - orbit[0]).norm();
    if !(close < 1e-8) {
        return Err(Error::InvalidArgument(format!("orbit not periodic (residual {close:e})")));
    }
    let mut acc = 0.0;
    for z in &orbit[..period] {
        let d = map.deriv(*z).norm();
        if d == 0.0 {
            return Err(Error::Critical);
        }
        acc += d.ln();
    }
    Ok(acc / period as f64)
}
