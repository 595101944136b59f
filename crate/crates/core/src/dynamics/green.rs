use super::QuadraticMap;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub error_bound: f64,
    pub iterations_used: usize,
}

const BUDGET: usize = 100_000;

pub fn escape_radius(c: Complex64) -> f64 {
    (c.norm() + 2.0).max(4.0)
}

fn require_standard(map: &QuadraticMap) -> Result<()> {
    if map.is_standard() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("potential theory is implemented for z²+c only".into()))
    }
}

/// Escape-rate potential 2^{-n} log|f^n z| with the tail
/// Σ_{k≥n} 2^{-k-1} log|1 + c/z_k²| bounded by 2^{-n}·(−log(1 − |c|/|z_n|²)).
pub fn green_potential(map: &QuadraticMap, z: Complex64, tolerance: f64) -> Result<GreenValue> {
    require_standard(map)?;
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let c = map.c();
    let r0 = escape_radius(c);
    let mut w = z;
    let mut n = 0usize;
    while w.norm() <= r0 {
        if n == BUDGET {
            return Ok(GreenValue { value: 0.0, error_bound: 0.0, iterations_used: BUDGET });
        }
        w = w * w + c;
        n += 1;
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::Overflow { step: n });
        }
    }
    let tail = |w: Complex64, n: usize| -> f64 {
        let eps = c.norm() / w.norm_sqr();
        -(-eps).ln_1p() * 0.5f64.powi(n as i32)
    };
    while tail(w, n) > tolerance && w.norm() < 1e100 {
        w = w * w + c;
        n += 1;
    }
    Ok(GreenValue {
        value: w.norm().ln() * 0.5f64.powi(n as i32),
        error_bound: tail(w, n),
        iterations_used: n,
    })
}

/// Böttcher coordinate by iterated square roots: f^N(z) is pushed far out where
/// φ ≈ identity, then square roots are taken back along the orbit, each time
/// choosing the root on the side of the orbit point z_k.
pub fn boettcher(map: &QuadraticMap, z: Complex64) -> Result<Complex64> {
    require_standard(map)?;
    let g0 = green_potential(map, Complex64::new(0.0, 0.0), 1e-14)?.value;
    let gz = green_potential(map, z, 1e-14)?.value;
    if gz <= g0 + 1e-9 {
        return Err(Error::Domain(format!("G(z) = {gz} does not exceed G(0) = {g0}")));
    }
    let c = map.c();
    let mut orbit = vec![z];
    let mut w = z;
    while w.norm() < 1e20 || c.norm() / w.norm_sqr() > 1e-36 {
        w = w * w + c;
        if !w.re.is_finite() {
            return Err(Error::Overflow { step: orbit.len() });
        }
        orbit.push(w);
        if orbit.len() > 10_000 {
            return Err(Error::NoConvergence("Böttcher orbit too slow to escape".into()));
        }
    }
    // φ(w) = w (1 + c/w²)^{1/2} … ≈ w (1 + c/(2w²)) for the outermost point.
    let mut phi = w * (1.0 + c / (2.0 * w * w));
    for zk in orbit.iter().rev().skip(1) {
        let r = phi.sqrt();
        phi = if (r * zk.conj()).re >= 0.0 { r } else { -r };
    }
    Ok(phi)
}
