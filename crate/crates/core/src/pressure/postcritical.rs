use super::partition::{log_scalar_from_ln, log_sum_exp};
use crate::config::Margins;
use crate::dynamics::QuadraticMap;
use crate::puzzle::{cantor_data, critical_itinerary, critical_orbit, kn_membership};
use crate::series::LogScalar;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::LN_2;

/// The tail is certified only when the last terms decay at least this fast.
pub const CERTIFIED_RATIO: f64 = 0.9;
const TAIL_WINDOW: usize = 5;

#[derive(Clone, Debug, Serialize)]
pub struct SeriesEstimate {
    pub log_value: LogScalar,
    pub tail_bound: LogScalar,
    pub tail_certified: bool,
    /// Largest ratio of consecutive terms among the last five.
    pub decay_ratio: f64,
    pub terms_used: usize,
    /// ln of each term, k = 0..=k_max.
    pub log_terms: Vec<f64>,
}

fn check_map(map: &QuadraticMap, n: usize, k_max: usize) -> Result<f64> {
    if !map.is_standard() || map.c().im != 0.0 {
        return Err(Error::InvalidArgument("the postcritical series needs a real map z^2 + c".into()));
    }
    let c = map.c().re;
    let r = kn_membership(c, n, k_max + 1);
    if !r.pass {
        return Err(Error::Domain(format!("critical orbit of c = {c} not certified in Y and Y~ up to k = {k_max}")));
    }
    Ok(c)
}

/// ln|Df^{n+3k}(c)| for k = 0..=k_max.
fn log_derivs(c: f64, n: usize, k_max: usize) -> Vec<f64> {
    let orbit = critical_orbit(c, n + 3 * k_max);
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(k_max + 1);
    for (j, x) in orbit.iter().enumerate().take(n + 3 * k_max) {
        if j >= n && (j - n) % 3 == 0 {
            out.push(acc);
        }
        acc += (2.0 * x).abs().ln();
    }
    out.push(acc);
    out
}

/// Σ_{k=0}^{k_max} exp(−(n+3k)p) |Df^{n+3k}(f(0))|^{−t/2} with a geometric tail bound.
pub fn postcritical_series(map: &QuadraticMap, n: usize, t: f64, p: f64, k_max: usize) -> Result<SeriesEstimate> {
    if !(t.is_finite() && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("t = {t}, p = {p}")));
    }
    let c = check_map(map, n, k_max)?;
    let log_terms: Vec<f64> = log_derivs(c, n, k_max)
        .iter()
        .enumerate()
        .map(|(k, d)| -((n + 3 * k) as f64) * p - 0.5 * t * d)
        .collect();
    let last = &log_terms[log_terms.len().saturating_sub(TAIL_WINDOW)..];
    let decay_ratio = if last.len() < 2 {
        f64::INFINITY
    } else {
        last.windows(2).map(|w| (w[1] - w[0]).exp()).fold(f64::NEG_INFINITY, f64::max)
    };
    let tail_certified = last.len() == TAIL_WINDOW && decay_ratio < CERTIFIED_RATIO;
    let tail_ln = if tail_certified {
        log_terms[k_max] + (decay_ratio / (1.0 - decay_ratio)).ln()
    } else {
        f64::INFINITY
    };
    Ok(SeriesEstimate {
        log_value: log_scalar_from_ln(log_sum_exp(log_terms.iter().copied())),
        tail_bound: log_scalar_from_ln(tail_ln),
        tail_certified,
        decay_ratio,
        terms_used: log_terms.len(),
        log_terms,
    })
}

/// One term of the postcritical series set against the two-variable weights.
#[derive(Clone, Debug, Serialize)]
pub struct TermBracket {
    pub k: usize,
    pub log_lower: f64,
    pub log_term: f64,
    pub log_upper: f64,
    pub holds: bool,
}

/// Compares each term at p = −tχ_crit/2 + δ with
/// Δ₁^{∓t/2} e^{−nδ} (e^{χ_crit}/|Df(β)|)^{tn/2} 2^{−λk − τN(k) ± ξτB(k)},
/// τ = t log θ / log 2, λ = 3δ / log 2, reading the itinerary with 1 as 1⁺.
pub fn postcritical_bracket(
    map: &QuadraticMap,
    n: usize,
    t: f64,
    delta: f64,
    k_max: usize,
    margins: &Margins,
) -> Result<Vec<TermBracket>> {
    margins.validate()?;
    if !(t > 0.0 && delta >= 0.0) {
        return Err(Error::InvalidArgument(format!("need t > 0 and delta >= 0, got {t}, {delta}")));
    }
    let c = check_map(map, n, k_max)?;
    let data = cantor_data(c, margins.d2)?;
    let xi = data.xi.ok_or_else(|| Error::Domain(format!("theta = {} <= 1", data.theta)))?;
    let chi = data.chi_crit();
    let symbols = critical_itinerary(c, n, k_max + 1)?.symbols;
    let beta = (1.0 + (1.0 - 4.0 * c).sqrt()) / 2.0;
    let tau = t * data.theta.ln() / LN_2;
    let lambda = 3.0 * delta / LN_2;
    let p = -t * chi / 2.0 + delta;
    let base = -(n as f64) * delta + 0.5 * t * n as f64 * (chi - (2.0 * beta).ln());
    let slack = 0.5 * t * margins.d1.ln();
    let derivs = log_derivs(c, n, k_max);
    let mut zeros = 0usize;
    let mut blocks = 0usize;
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            zeros += (symbols[k - 1] == 0) as usize;
            if k == 1 || symbols[k - 1] != symbols[k - 2] {
                blocks += 1;
            }
        }
        let core = LN_2 * (-lambda * k as f64 - tau * zeros as f64);
        let spread = LN_2 * xi * tau * blocks as f64;
        let log_term = -((n + 3 * k) as f64) * p - 0.5 * t * derivs[k];
        let log_lower = -slack + base + core - spread;
        let log_upper = slack + base + core + spread;
        out.push(TermBracket { k, log_lower, log_term, log_upper, holds: log_lower <= log_term && log_term <= log_upper });
    }
    Ok(out)
}
