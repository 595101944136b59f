use super::{central_trace, RealTrace};
use crate::dynamics::{trace_external_ray, Angle, QuadraticMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// How Y was told apart from Ỹ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identification {
    /// The 7/24 ray landed on the boundary of Y.
    Ray,
    /// Ray inconclusive; Y is the component whose g-fixed point has the larger multiplier.
    Multiplier,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CantorData {
    pub c: f64,
    #[serde(rename = "Y")]
    pub y: RealTrace,
    #[serde(rename = "Y_tilde")]
    pub y_tilde: RealTrace,
    pub p: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub mult_p: f64,
    pub mult_p_plus: f64,
    pub mult_p_minus_sq: f64,
    pub theta: f64,
    /// log Δ₂ / (2 log θ); `None` when θ ≤ 1.
    pub xi: Option<f64>,
    pub delta2: f64,
    pub identification: Identification,
    pub gamma: Option<f64>,
    pub y_is_negative: bool,
}

impl CantorData {
    /// Orbit of p under f (three points).
    pub fn orbit_p(&self) -> [f64; 3] {
        orbit3(self.c, self.p)
    }

    pub fn orbit_p_plus(&self) -> [f64; 3] {
        orbit3(self.c, self.p_plus)
    }

    /// Orbit of p⁻ under f (six points).
    pub fn orbit_p_minus(&self) -> [f64; 6] {
        let mut out = [self.p_minus; 6];
        for j in 1..6 {
            out[j] = out[j - 1] * out[j - 1] + self.c;
        }
        out
    }

    /// (1/3) log |Dg(p⁺)|.
    pub fn chi_crit(&self) -> f64 {
        self.mult_p_plus.ln() / 3.0
    }

    pub fn symbol_trace(&self, symbol: u8) -> RealTrace {
        if symbol == 0 {
            self.y
        } else {
            self.y_tilde
        }
    }
}

fn orbit3(c: f64, x: f64) -> [f64; 3] {
    let a = x * x + c;
    [x, a, a * a + c]
}

/// sign·√(y − c), the inverse branch of x² + c on the side `sign`.
#[inline]
pub fn inverse_branch(c: f64, y: f64, sign: f64) -> f64 {
    sign * (y - c).max(0.0).sqrt()
}

fn pull_trace(c: f64, t: RealTrace, sign: f64) -> Option<RealTrace> {
    if t.left < c {
        return None;
    }
    Some(RealTrace::new(inverse_branch(c, t.left, sign), inverse_branch(c, t.right, sign)))
}

// Sign pattern (+, −, last) of the pullback that lands back in the central piece.
fn g_inverse(c: f64, y: f64, last: f64) -> f64 {
    let x1 = inverse_branch(c, y, 1.0);
    let x2 = inverse_branch(c, x1, -1.0);
    inverse_branch(c, x2, last)
}

/// The two components of f^{-3}(central) inside the central trace, negative one
/// first. All eight sign patterns are pulled back; exactly two must land inside.
pub fn cantor_traces(c: f64) -> Result<(RealTrace, RealTrace)> {
    let central = central_trace(c)?;
    let mut inside = Vec::new();
    for pattern in 0..8u8 {
        let signs = [pattern & 1, pattern & 2, pattern & 4].map(|b| if b != 0 { -1.0 } else { 1.0 });
        let mut t = Some(central);
        for s in signs {
            t = t.and_then(|t| pull_trace(c, t, s));
        }
        if let Some(t) = t {
            if central.contains_trace(&t) && t.left > central.left && t.right < central.right {
                inside.push(t);
            }
        }
    }
    if inside.len() != 2 {
        return Err(Error::Domain(format!(
            "c = {c}: expected 2 components of the third preimage in the central piece, found {}",
            inside.len()
        )));
    }
    inside.sort_by(|a, b| a.left.total_cmp(&b.left));
    let (neg, pos) = (inside[0], inside[1]);
    if !neg.disjoint(&pos) || neg.right >= 0.0 {
        return Err(Error::Domain(format!("c = {c}: components are not separated by 0")));
    }
    Ok((neg, pos))
}

fn fixed_of(map: impl Fn(f64) -> f64, seed: f64) -> f64 {
    let mut x = seed;
    for _ in 0..200 {
        let nx = map(x);
        if nx == x {
            break;
        }
        x = nx;
    }
    x
}

fn abs_dg(c: f64, x: f64) -> f64 {
    orbit3(c, x).iter().map(|v| 2.0 * v.abs()).product()
}

/// Locates the landing point of the 7/24 ray and matches it against the
/// endpoints of the two components.
fn identify_by_ray(c: f64, neg: &RealTrace, pos: &RealTrace) -> (Option<bool>, Option<f64>) {
    let map = QuadraticMap::real(c);
    let angle = Angle::new(7, 24).expect("valid angle");
    let ray = match trace_external_ray(&map, angle, 1e-10, 4000) {
        Ok(r) => r,
        Err(_) => return (None, None),
    };
    let gamma = match (ray.landing_certified, ray.landing_point) {
        (true, Some(z)) if z.im.abs() < 1e-6 => z.re,
        _ => return (None, None),
    };
    let near = |t: &RealTrace| (t.left - gamma).abs().min((t.right - gamma).abs()) < 1e-6;
    match (near(neg), near(pos)) {
        (true, false) => (Some(true), Some(gamma)),
        (false, true) => (Some(false), Some(gamma)),
        _ => (None, Some(gamma)),
    }
}

/// Y, Ỹ, the periodic points p, p⁺, p⁻ of g = f³ and the derived θ and ξ.
pub fn cantor_data(c: f64, delta2: f64) -> Result<CantorData> {
    if !(delta2 > 1.0) {
        return Err(Error::InvalidArgument(format!("delta2 = {delta2} must exceed 1")));
    }
    let (neg, pos) = cantor_traces(c)?;
    let by_sign = |negative: bool| {
        let s = if negative { -1.0 } else { 1.0 };
        let t = if negative { neg } else { pos };
        fixed_of(|x| g_inverse(c, x, s), t.mid())
    };
    let (fix_neg, fix_pos) = (by_sign(true), by_sign(false));
    let (ray_choice, gamma) = identify_by_ray(c, &neg, &pos);
    let (y_is_negative, identification) = match ray_choice {
        Some(b) => (b, Identification::Ray),
        None => (abs_dg(c, fix_neg) >= abs_dg(c, fix_pos), Identification::Multiplier),
    };
    let (y, y_tilde, sy, st) = if y_is_negative { (neg, pos, -1.0, 1.0) } else { (pos, neg, 1.0, -1.0) };
    let p = if y_is_negative { fix_neg } else { fix_pos };
    let p_plus = if y_is_negative { fix_pos } else { fix_neg };
    let p_minus = fixed_of(|x| g_inverse(c, g_inverse(c, x, sy), st), y_tilde.mid());

    let g = |x: f64| orbit3(c, x)[2] * orbit3(c, x)[2] + c;
    for (name, x, iters) in [("p", p, 1), ("p+", p_plus, 1), ("p-", p_minus, 2)] {
        let mut w = x;
        for _ in 0..iters {
            w = g(w);
        }
        if !((w - x).abs() < 1e-10) {
            return Err(Error::NoConvergence(format!("{name} residual {:e}", (w - x).abs())));
        }
    }
    if !((g(p_minus) - p_minus).abs() > 1e-10) {
        return Err(Error::NoConvergence("p- collapsed onto a fixed point of g".into()));
    }
    let mult_p = abs_dg(c, p);
    let mult_p_plus = abs_dg(c, p_plus);
    let mult_p_minus_sq = abs_dg(c, p_minus) * abs_dg(c, g(p_minus));
    let theta = (mult_p / mult_p_plus).sqrt();
    let xi = (theta > 1.0).then(|| delta2.ln() / (2.0 * theta.ln()));
    Ok(CantorData {
        c,
        y,
        y_tilde,
        p,
        p_plus,
        p_minus,
        mult_p,
        mult_p_plus,
        mult_p_minus_sq,
        theta,
        xi,
        delta2,
        identification,
        gamma,
        y_is_negative,
    })
}
