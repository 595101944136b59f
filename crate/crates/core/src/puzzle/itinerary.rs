use super::{cantor_data, CantorData};
use crate::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};

/// Minimal distance from the trace endpoints for a certified symbol.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;
const ORBIT_PRECISION: u32 = 192;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItineraryPrefix {
    /// Symbols until the orbit first leaves Y ∪ Ỹ (or k_max).
    pub symbols: Vec<u8>,
    pub n: usize,
    pub certified_steps: usize,
}

/// f^j(c) for j = 0..=steps (index 0 is c itself), iterated in 192-bit binary
/// floating point and rounded to f64.
pub fn critical_orbit(c: f64, steps: usize) -> Vec<f64> {
    let cc = Float::with_val(ORBIT_PRECISION, c);
    let mut x = cc.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(c);
    for _ in 0..steps {
        x.square_mut();
        x += &cc;
        out.push(x.to_f64());
    }
    out
}

/// Index of the first failure of f(c) > f²(c) > … > f^{n−1}(c) > 0, if any.
/// `orbit[j] = f^j(c)`.
pub(crate) fn ordering_failure(orbit: &[f64], n: usize) -> Option<usize> {
    for j in 1..n {
        let next = if j + 1 < n { orbit[j + 1] } else { 0.0 };
        if !(orbit[j] > next) {
            return Some(j);
        }
    }
    None
}

pub(crate) fn symbols_from_orbit(orbit: &[f64], data: &CantorData, n: usize, k_max: usize, tol: f64) -> ItineraryPrefix {
    let mut symbols = Vec::new();
    let mut certified = 0;
    let mut still_certified = true;
    for k in 0..k_max {
        let x = orbit[n + 3 * k];
        let (sym, depth) = if data.y.contains(x) {
            (0, data.y.depth_of(x))
        } else if data.y_tilde.contains(x) {
            (1, data.y_tilde.depth_of(x))
        } else {
            break;
        };
        symbols.push(sym);
        still_certified &= depth >= tol;
        if still_certified {
            certified += 1;
        }
    }
    ItineraryPrefix { symbols, n, certified_steps: certified }
}

pub fn critical_itinerary(c: f64, n: usize, k_max: usize) -> Result<ItineraryPrefix> {
    critical_itinerary_with_tolerance(c, n, k_max, MEMBERSHIP_TOLERANCE)
}

/// Symbols ι_k = 0 if f^{n+3k}(c) ∈ Y, 1 if in Ỹ, for k < k_max.
pub fn critical_itinerary_with_tolerance(c: f64, n: usize, k_max: usize, tol: f64) -> Result<ItineraryPrefix> {
    let orbit = critical_orbit(c, n + 3 * k_max);
    if let Some(j) = ordering_failure(&orbit, n) {
        return Err(Error::Domain(format!("ordering of the critical orbit fails at f^{j}(c) for c = {c}")));
    }
    let data = cantor_data(c, 2.0)?;
    Ok(symbols_from_orbit(&orbit, &data, n, k_max, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnReport {
    pub c: f64,
    pub n: usize,
    pub k_max: usize,
    pub ordering_ok: bool,
    pub ordering_failed_at: Option<usize>,
    pub cantor_ok: bool,
    /// Per k: f^{n+3k}(c) certified inside Y ∪ Ỹ.
    pub confinement: Vec<bool>,
    pub symbols: Vec<u8>,
    pub pass: bool,
}

/// Finite-depth membership proxy for K_n.
pub fn kn_membership(c: f64, n: usize, k_max: usize) -> KnReport {
    let orbit = critical_orbit(c, n + 3 * k_max);
    let failed = if n >= 3 { ordering_failure(&orbit, n) } else { Some(0) };
    let data = cantor_data(c, 2.0).ok();
    let (confinement, symbols) = match &data {
        Some(d) => {
            let it = symbols_from_orbit(&orbit, d, n, k_max, MEMBERSHIP_TOLERANCE);
            ((0..k_max).map(|k| k < it.certified_steps).collect(), it.symbols)
        }
        None => (vec![false; k_max], Vec::new()),
    };
    let pass = failed.is_none() && data.is_some() && confinement.iter().all(|&b| b);
    KnReport {
        c,
        n,
        k_max,
        ordering_ok: failed.is_none(),
        ordering_failed_at: failed,
        cantor_ok: data.is_some(),
        confinement,
        symbols,
        pass,
    }
}
