use super::ival::Ival;
use super::log_scalar::LogEnclosure;
use super::scheme::{block_counters, PartitionScheme};
use crate::{Error, Result};
use rug::float::Round;
use rug::ops::AddAssignRound;
use rug::{Float, Integer};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct OracleSum {
    pub plus: LogEnclosure,
    pub minus: LogEnclosure,
    pub terms: u64,
    /// The last block was cut by k_max.
    pub partial: bool,
}

/// Σ_{k=0}^{k_max} 2^{−λk − τN(k) ± τξB(k)} term by term, with every term
/// and partial sum rounded outward.
pub fn brute_force_oracle(scheme: &PartitionScheme, tau: f64, lambda: f64, k_max: u64, prec: u32) -> Result<OracleSum> {
    if !(tau >= 0.0 && lambda >= 0.0 && tau.is_finite() && lambda.is_finite()) {
        return Err(Error::InvalidArgument("tau and lambda must be finite and nonnegative".into()));
    }
    if k_max > 10_000_000 {
        return Err(Error::InvalidArgument(format!("k_max = {k_max} too large for term-by-term summation")));
    }
    let (tau_iv, lam, xi) = (Ival::f64(prec, tau), Ival::f64(prec, lambda), Ival::f64(prec, scheme.exponent));
    let mut acc = [[Float::with_val(prec, 0), Float::with_val(prec, 0)], [Float::with_val(prec, 0), Float::with_val(prec, 0)]];
    for k in 0..=k_max {
        let c = block_counters(scheme, &Integer::from(k))?;
        let base = lam
            .mul(&Ival::u64(prec, k))
            .add(&tau_iv.mul(&Ival::int(prec, &c.count)))
            .neg();
        let label = tau_iv.mul(&xi).mul(&Ival::u64(prec, c.block));
        for (slot, e) in [base.add(&label), base.sub(&label)].iter().enumerate() {
            let v = e.exp2();
            acc[slot][0].add_assign_round(&v.lo, Round::Down);
            acc[slot][1].add_assign_round(&v.hi, Round::Up);
        }
    }
    let enclose = |pair: &[Float; 2]| {
        LogEnclosure::from_ival(&Ival { lo: pair[0].clone(), hi: pair[1].clone(), nearest: false }.log2())
    };
    let last = block_counters(scheme, &Integer::from(k_max))?;
    let next = block_counters(scheme, &Integer::from(k_max + 1))?;
    Ok(OracleSum {
        plus: enclose(&acc[0]),
        minus: enclose(&acc[1]),
        terms: k_max + 1,
        partial: k_max > 0 && last.block == next.block,
    })
}
