use super::poly::{derivative, horner, polynomial_roots};
use crate::dynamics::QuadraticMap;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_RADIUS: f64 = 80.0;

const STEPS_PER_TURN: usize = 2048;
const MAX_TURNS: usize = 64;
const CLOSE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticLikeReport {
    pub lambda: f64,
    pub radius: f64,
    /// Critical points other than 0 enclosed by the preimage contour.
    pub critical_points_inside: Vec<Complex64>,
    pub critical_ok: bool,
    /// Turns of the circle needed before the lifted contour closes.
    pub contour_degree: Option<usize>,
    pub degree_ok: bool,
    pub max_contour_modulus: f64,
    pub containment_ok: bool,
    pub failed_clause: Option<String>,
    pub pass: bool,
}

fn newton_to(map: &QuadraticMap, target: Complex64, mut w: Complex64) -> Option<Complex64> {
    // cancellation in the monomial basis limits how small the last steps get
    let mut last = f64::INFINITY;
    for _ in 0..40 {
        let (v, d) = map.eval_with_deriv(w);
        let step = (v - target) / d;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return None;
        }
        w -= step;
        last = step.norm();
        if last <= 1e-14 * w.norm().max(1.0) {
            return Some(w);
        }
    }
    (last <= 1e-9 * w.norm().max(1.0)).then_some(w)
}

/// First x > 0 where the real map reaches `radius`, by scan and bisection.
fn boundary_seed(map: &QuadraticMap, radius: f64) -> Option<Complex64> {
    let f = |x: f64| map.eval_real(x);
    if f(0.0) >= radius {
        return None;
    }
    let step = radius.sqrt() / 4096.0;
    let mut lo = 0.0;
    while f(lo + step) < radius {
        lo += step;
        if lo > 4.0 * radius {
            return None;
        }
    }
    let mut hi = lo + step;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < radius {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    newton_to(map, Complex64::new(radius, 0.0), Complex64::new(hi, 0.0))
}

/// Lifts t ↦ R e^{it} through the map starting at `w0`, until the lift closes
/// up. Returns the sampled curve and the number of turns.
fn lift_circle(map: &QuadraticMap, radius: f64, w0: Complex64) -> Option<(Vec<Complex64>, usize)> {
    let mut curve = vec![w0];
    let mut w = w0;
    let dt = 2.0 * PI / STEPS_PER_TURN as f64;
    for turn in 1..=MAX_TURNS {
        for k in 1..=STEPS_PER_TURN {
            let t = ((turn - 1) * STEPS_PER_TURN + k) as f64 * dt;
            let mut sub = 1;
            // refine the step when Newton wanders
            'retry: loop {
                let mut x = w;
                for j in 1..=sub {
                    let tj = t - dt + dt * j as f64 / sub as f64;
                    let target = Complex64::from_polar(radius, tj);
                    let guess = x + (target - map.eval(x)) / map.deriv(x);
                    match newton_to(map, target, guess) {
                        Some(y) if (y - x).norm() < 0.5 * (x.norm() * dt * 4.0).max(1e-3) => x = y,
                        _ => {
                            sub *= 2;
                            if sub > 1 << 12 {
                                return None;
                            }
                            continue 'retry;
                        }
                    }
                }
                w = x;
                break;
            }
            curve.push(w);
        }
        if (w - w0).norm() < CLOSE_TOL * w0.norm().max(1.0) {
            return Some((curve, turn));
        }
    }
    None
}

fn winding(curve: &[Complex64], z: Complex64) -> i64 {
    let mut total = 0.0;
    for pair in curve.windows(2) {
        total += ((pair[1] - z) / (pair[0] - z)).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Numerical proxy for "the map restricted to the preimage of the disk of the
/// given radius is quadratic-like": the lifted boundary closes after two
/// turns, stays inside the disk, and encloses no critical point except 0.
pub fn quadratic_like_check(map: &QuadraticMap, radius: f64) -> Result<QuadraticLikeReport> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius = {radius} must be positive")));
    }
    let lambda = map.c().re;
    let coef: Vec<Complex64> = if map.is_standard() {
        vec![map.c(), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
    } else {
        map.coefficients.clone()
    };
    let lifted = boundary_seed(map, radius).and_then(|w0| lift_circle(map, radius, w0));
    let (curve, degree) = match &lifted {
        Some((c, d)) => (c.as_slice(), Some(*d)),
        None => (&[][..], None),
    };
    let degree_ok = degree == Some(2);
    let max_contour_modulus = curve.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let containment_ok = lifted.is_some() && max_contour_modulus < radius;

    // Df = w·h(w); the roots of h are the critical points other than 0
    let df = derivative(&coef);
    let h: Vec<Complex64> = df.iter().skip(1).copied().collect();
    let mut inside = Vec::new();
    let mut zero_enclosed = false;
    if lifted.is_some() {
        zero_enclosed = winding(curve, Complex64::new(0.0, 0.0)) != 0;
        for z in polynomial_roots(&h) {
            let tiny = horner(&df, z).norm() < 1e-6 * (1.0 + z.norm());
            if tiny && winding(curve, z) != 0 {
                inside.push(z);
            }
        }
    }
    let critical_ok = lifted.is_some() && zero_enclosed && inside.is_empty() && df[0].norm() == 0.0;
    let failed_clause = if !degree_ok {
        Some("degree".to_string())
    } else if !critical_ok {
        Some("critical_points".to_string())
    } else if !containment_ok {
        Some("containment".to_string())
    } else {
        None
    };
    Ok(QuadraticLikeReport {
        lambda,
        radius,
        critical_points_inside: inside,
        critical_ok,
        contour_degree: degree,
        degree_ok,
        max_contour_modulus,
        containment_ok,
        pass: failed_clause.is_none(),
        failed_clause,
    })
}
