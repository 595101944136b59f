use super::branches::{BranchInventory, BranchKind};
use crate::dynamics::QuadraticMap;
use crate::puzzle::cantor_data;
use crate::{Error, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct GibbsMassReport {
    pub t: f64,
    pub p: f64,
    pub radius: f64,
    pub branches: usize,
    /// Normalized branch weights (they sum to 1), in inventory order.
    pub weights: Vec<f64>,
    /// Spread mass assigned to the nearest of O(p), O⁺, O⁻ when within `radius`.
    pub near_p: f64,
    pub near_plus: f64,
    pub near_minus: f64,
    pub remainder: f64,
    /// Spread mass within `radius` of O⁺ ∪ O⁻.
    pub near_plus_or_minus: f64,
}

/// Weights exp(−p m_W) |DF(mid)|^{−t}, normalized, then spread evenly over the
/// forward images f^j(mid), j < m_W.
pub fn gibbs_mass_report(inv: &BranchInventory, map: &QuadraticMap, t: f64, p: f64, radius: f64) -> Result<GibbsMassReport> {
    if inv.kind != BranchKind::FirstReturn {
        return Err(Error::InvalidArgument("gibbs_mass_report needs a first return inventory".into()));
    }
    if !map.is_standard() || map.c().re != inv.c || map.c().im != 0.0 {
        return Err(Error::InvalidArgument("map does not match the inventory".into()));
    }
    if !(radius > 0.0) || !t.is_finite() || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t}, p = {p}, radius = {radius}")));
    }
    let live: Vec<_> = inv.branches.iter().filter(|b| !b.ambiguous).collect();
    if live.is_empty() {
        return Err(Error::InvalidArgument("empty inventory".into()));
    }
    let logs: Vec<f64> = live.iter().map(|b| -(b.return_time as f64) * p - t * b.log_deriv_mid).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = raw.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Underflow("branch weights do not normalize; raise the precision".into()));
    }
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let data = cantor_data(inv.c, 2.0)?;
    let orbits: [Vec<f64>; 3] = [data.orbit_p().to_vec(), data.orbit_p_plus().to_vec(), data.orbit_p_minus().to_vec()];
    let c = inv.c;
    let spread_total: f64 = live.iter().zip(&weights).map(|(b, w)| w * b.return_time as f64).sum();
    let mut near = [0.0; 3];
    let mut union = 0.0;
    let mut remainder = 0.0;
    for (b, w) in live.iter().zip(&weights) {
        let share = w / spread_total;
        let mut x = b.trace.mid();
        for _ in 0..b.return_time {
            let dist = orbits.iter().map(|o| o.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min));
            let dist: Vec<f64> = dist.collect();
            let (best, d) = dist.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &d)| if d < acc.1 { (i, d) } else { acc });
            if d < radius {
                near[best] += share;
            } else {
                remainder += share;
            }
            if dist[1] < radius || dist[2] < radius {
                union += share;
            }
            x = x * x + c;
        }
    }
    Ok(GibbsMassReport {
        t,
        p,
        radius,
        branches: live.len(),
        weights,
        near_p: near[0],
        near_plus: near[1],
        near_minus: near[2],
        remainder,
        near_plus_or_minus: union,
    })
}
