use super::branches::{BranchInventory, BranchKind};
use crate::series::{LogScalar, Rounding};
use crate::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// Which derivative bound of a branch enters a sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeBound {
    /// sup |DF|: the smaller sum for t > 0.
    Sup,
    /// inf |DF|: the larger sum for t > 0.
    Inf,
    /// |DF| at the branch midpoint.
    Mid,
}

/// ln Σ exp(x_i), 0 terms giving −∞.
pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

pub(crate) fn log_scalar_from_ln(x: f64) -> LogScalar {
    LogScalar::new(Float::with_val(53, x / LN_2), Rounding::Nearest)
}

/// Natural log of Z₁(t, p) = Σ_W exp(−m_W p) |DF|_W^{−t}.
pub fn log_partition(inv: &BranchInventory, t: f64, p: f64, bound: DerivativeBound) -> f64 {
    let terms = inv.branches.iter().filter(|b| !b.ambiguous).map(move |b| {
        let d = match bound {
            DerivativeBound::Sup => b.log_deriv_max,
            DerivativeBound::Inf => b.log_deriv_min,
            DerivativeBound::Mid => b.log_deriv_mid,
        };
        -(b.return_time as f64) * p - t * d
    });
    log_sum_exp(terms)
}

/// Z₁(t, p) as a log-domain scalar.
pub fn partition_function(inv: &BranchInventory, t: f64, p: f64, bound: DerivativeBound) -> Result<LogScalar> {
    if inv.branches.iter().all(|b| b.ambiguous) {
        return Err(Error::InvalidArgument("empty inventory".into()));
    }
    if !(t.is_finite() && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("t = {t}, p = {p} must be finite")));
    }
    Ok(log_scalar_from_ln(log_partition(inv, t, p, bound)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureBracket {
    pub t: f64,
    pub p_low: f64,
    pub p_high: f64,
    /// ln Z₁ at the bracket midpoint, with midpoint derivatives.
    pub consistency: f64,
    /// ln Z₁ at the midpoint with sup and inf derivative bounds.
    pub log_z_low: f64,
    pub log_z_high: f64,
    /// Roots of the sup-based and inf-based partition functions.
    pub enclosure_low: f64,
    pub enclosure_high: f64,
    pub tolerance: f64,
    pub branches: usize,
    pub time_cap: usize,
}

fn root(f: impl Fn(f64) -> f64, tol: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut grow = 0;
    while !(f(lo) > 0.0) || !(f(hi) < 0.0) {
        if !(f(lo) > 0.0) {
            lo *= 2.0;
        }
        if !(f(hi) < 0.0) {
            hi *= 2.0;
        }
        grow += 1;
        if grow > 60 {
            return Err(Error::NoConvergence("no sign change of the partition function".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < tol && f(mid).abs() < tol {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.abs().max(1.0) {
            break;
        }
    }
    Ok((lo, hi))
}

/// Root in p of ln Z₁(t, ·), found by bisection on the midpoint-derivative sum
/// and enclosed by the roots of the sup- and inf-based sums.
pub fn bowen_pressure(inv: &BranchInventory, t: f64, tolerance: f64) -> Result<PressureBracket> {
    if inv.kind != BranchKind::FirstReturn {
        return Err(Error::InvalidArgument("bowen_pressure needs a first return inventory".into()));
    }
    if !(tolerance > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t}, tolerance = {tolerance}")));
    }
    let live: Vec<_> = inv.branches.iter().filter(|b| !b.ambiguous).collect();
    if live.is_empty() {
        return Err(Error::InvalidArgument("empty inventory".into()));
    }
    if let Some(b) = live.iter().find(|b| !(b.log_deriv_min > 0.0)) {
        return Err(Error::Domain(format!("branch {} is not expanding: log|DF| >= {}", b.word, b.log_deriv_min)));
    }
    let z = |bound| move |p: f64| log_partition(inv, t, p, bound);
    let (p_low, p_high) = root(z(DerivativeBound::Mid), tolerance)?;
    let (s_lo, s_hi) = root(z(DerivativeBound::Sup), tolerance)?;
    let (i_lo, i_hi) = root(z(DerivativeBound::Inf), tolerance)?;
    let mid = 0.5 * (p_low + p_high);
    let (a, b) = (z(DerivativeBound::Sup)(mid), z(DerivativeBound::Inf)(mid));
    Ok(PressureBracket {
        t,
        p_low,
        p_high,
        consistency: z(DerivativeBound::Mid)(mid),
        log_z_low: a.min(b),
        log_z_high: a.max(b),
        enclosure_low: s_lo.min(i_lo),
        enclosure_high: s_hi.max(i_hi),
        tolerance,
        branches: live.len(),
        time_cap: inv.time_cap,
    })
}

/// log κ̂ = min_W (log inf|DL| − (χ_crit/2 + υ) m_W) over a first landing inventory.
pub fn peierls_margin(inv: &BranchInventory, chi_crit: f64, upsilon: f64) -> Result<f64> {
    if inv.kind != BranchKind::FirstLanding {
        return Err(Error::InvalidArgument("peierls_margin needs a first landing inventory".into()));
    }
    if inv.complete_up_to < inv.n + 3 {
        return Err(Error::InvalidArgument(format!(
            "inventory complete only up to {}, need {}",
            inv.complete_up_to,
            inv.n + 3
        )));
    }
    let slope = chi_crit / 2.0 + upsilon;
    inv.branches
        .iter()
        .filter(|b| !b.ambiguous)
        .map(|b| b.log_deriv_min - slope * b.return_time as f64)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::InvalidArgument("empty inventory".into()))
}

/// ln of the level-k part of Z₁(t, p) (midpoint derivatives), for each level present.
pub fn level_sums(inv: &BranchInventory, t: f64, p: f64) -> Vec<(usize, f64)> {
    let top = inv.branches.iter().map(|b| b.level).max().unwrap_or(0);
    (0..=top)
        .map(|k| {
            let terms = inv
                .branches
                .iter()
                .filter(move |b| b.level == k && !b.ambiguous)
                .map(move |b| -(b.return_time as f64) * p - t * b.log_deriv_mid);
            (k, log_sum_exp(terms))
        })
        .collect()
}
