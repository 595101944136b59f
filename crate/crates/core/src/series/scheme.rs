use super::ival::Ival;
use super::log_scalar::LogEnclosure;
use crate::{Error, Result};
use rug::Integer;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

/// Largest block exponent q·s³ handled in floating point (MPFR exponent range).
pub const MAX_BLOCK_EXPONENT: u64 = (1 << 30) - 2;
/// Largest block exponent for which exact integers are materialized.
pub const MAX_EXACT_BITS: u64 = 1 << 28;

/// Block partition data: real exponent ξ, integer offset Ξ = ⌈2ξ⌉ + 1 and
/// growth q, with a_s = 2^{q s³} and b_s = a_s + q(2s+1) + Ξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionScheme {
    #[serde(rename = "xi")]
    pub exponent: f64,
    #[serde(rename = "Xi")]
    pub offset: u64,
    #[serde(rename = "q")]
    pub growth: u64,
    /// Growth satisfies q ≥ 50(Ξ + 1).
    pub lemma_mode: bool,
}

pub fn offset_for(exponent: f64) -> u64 {
    (2.0 * exponent).ceil() as u64 + 1
}

impl PartitionScheme {
    /// The default scheme for an exponent: q = 50(Ξ + 1).
    pub fn standard(exponent: f64) -> Result<Self> {
        Self::check_exponent(exponent)?;
        let offset = offset_for(exponent);
        Ok(PartitionScheme { exponent, offset, growth: 50 * (offset + 1), lemma_mode: true })
    }

    /// Lemma mode with an explicit growth; q below 50(Ξ+1) is rejected.
    pub fn with_growth(exponent: f64, growth: u64) -> Result<Self> {
        let s = Self::oracle(exponent, growth)?;
        if growth < 50 * (s.offset + 1) {
            return Err(Error::InvalidArgument(format!(
                "q = {growth} below 50(Xi + 1) = {}",
                50 * (s.offset + 1)
            )));
        }
        Ok(PartitionScheme { lemma_mode: true, ..s })
    }

    /// Relaxed growth for brute-force comparisons. Blocks may overlap or be empty.
    pub fn oracle(exponent: f64, growth: u64) -> Result<Self> {
        Self::check_exponent(exponent)?;
        if growth == 0 {
            return Err(Error::InvalidArgument("q must be positive".into()));
        }
        let offset = offset_for(exponent);
        Ok(PartitionScheme { exponent, offset, growth, lemma_mode: growth >= 50 * (offset + 1) })
    }

    fn check_exponent(exponent: f64) -> Result<()> {
        if !(exponent > 0.0 && exponent.is_finite() && exponent < 1e6) {
            return Err(Error::InvalidArgument(format!("xi = {exponent} must be positive and finite")));
        }
        Ok(())
    }

    /// q·s³, checked against the representable range.
    pub fn block_exponent(&self, s: u64) -> Result<u64> {
        s.checked_pow(3)
            .and_then(|c| c.checked_mul(self.growth))
            .filter(|&e| e <= MAX_BLOCK_EXPONENT)
            .ok_or_else(|| Error::Overflow { step: s as usize })
    }

    /// |I_s| = q(2s+1) + Ξ.
    pub fn short_len(&self, s: u64) -> u64 {
        self.growth * (2 * s + 1) + self.offset
    }

    /// N on J_s: q(s+1)² + Ξ(s+1).
    pub fn long_count(&self, s: u64) -> u64 {
        self.growth * (s + 1) * (s + 1) + self.offset * (s + 1)
    }

    pub(crate) fn a_iv(&self, s: u64, prec: u32) -> Result<Ival> {
        Ok(Ival::pow2(prec, self.block_exponent(s)? as i64))
    }

    pub(crate) fn b_iv(&self, s: u64, prec: u32) -> Result<Ival> {
        Ok(self.a_iv(s, prec)?.add(&Ival::u64(prec, self.short_len(s))))
    }

    /// |J_s| = a_{s+1} − b_s (may be ≤ 0 for relaxed schemes).
    pub(crate) fn long_len_iv(&self, s: u64, prec: u32) -> Result<Ival> {
        Ok(self.a_iv(s + 1, prec)?.sub(&self.b_iv(s, prec)?))
    }

    fn exact_pow2(&self, s: u64) -> Result<Integer> {
        let e = self.block_exponent(s)?;
        if e > MAX_EXACT_BITS {
            return Err(Error::InvalidArgument(format!("2^{e} is too large for exact integers")));
        }
        Ok(Integer::from(1) << (e as u32))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Endpoints {
    pub s: u64,
    pub a: Integer,
    pub b: Integer,
    pub short_len: Integer,
    pub long_len: Integer,
    a_exp: u64,
    next_exp: u64,
}

fn big(x: &Integer) -> String {
    if x.significant_bits() <= 256 {
        x.to_string()
    } else {
        format!("~2^{:.6}", x.to_f64_exp().1 as f64 + x.to_f64_exp().0.abs().log2())
    }
}

impl Serialize for Endpoints {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let c = Integer::from(&self.b - &self.a);
        let mut st = s.serialize_struct("Endpoints", 5)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("a", &format!("2^{}", self.a_exp))?;
        st.serialize_field("b", &format!("2^{} + {}", self.a_exp, c))?;
        st.serialize_field("I_len", &self.short_len.to_string())?;
        st.serialize_field("J_len", &format!("2^{} - 2^{} - {} = {}", self.next_exp, self.a_exp, c, big(&self.long_len)))?;
        st.end()
    }
}

/// Exact a_s, b_s, |I_s| and |J_s|.
pub fn partition_endpoints(scheme: &PartitionScheme, s: u64) -> Result<Endpoints> {
    let a = scheme.exact_pow2(s)?;
    let next = scheme.exact_pow2(s + 1)?;
    let short_len = Integer::from(scheme.short_len(s));
    let b = Integer::from(&a + &short_len);
    let long_len = Integer::from(&next - &b);
    Ok(Endpoints {
        s,
        a,
        b,
        short_len,
        long_len,
        a_exp: scheme.block_exponent(s)?,
        next_exp: scheme.block_exponent(s + 1)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counters {
    /// N(k): how many j < k have j + 1 in a short block.
    pub count: Integer,
    /// B(k): 2s + 1 on I_s, 2s + 2 on J_s, 0 at k = 0.
    pub block: u64,
    pub s: u64,
    pub in_long: bool,
}

/// N(k) and B(k). For relaxed schemes whose blocks overlap, the first block
/// containing k wins.
pub fn block_counters(scheme: &PartitionScheme, k: &Integer) -> Result<Counters> {
    if *k < 0 {
        return Err(Error::InvalidArgument("k must be nonnegative".into()));
    }
    if *k == 0 {
        return Ok(Counters { count: Integer::new(), block: 0, s: 0, in_long: false });
    }
    let floor_log = u64::from(k.significant_bits() - 1);
    let mut top = 0;
    while scheme.block_exponent(top + 1)? <= floor_log {
        top += 1;
    }
    for s in 0..=top {
        let a = scheme.exact_pow2(s)?;
        if *k >= a && *k < Integer::from(&a + scheme.short_len(s)) {
            let q = scheme.growth;
            let count = Integer::from(k - &a) + 1u32 + q * s * s + scheme.offset * s;
            return Ok(Counters { count, block: 2 * s + 1, s, in_long: false });
        }
    }
    Ok(Counters { count: Integer::from(scheme.long_count(top)), block: 2 * top + 2, s: top, in_long: true })
}

/// Enclosure of log2 λ(s) = −log2 |J_s| for real s ≥ 0.
pub fn lambda_of_s(scheme: &PartitionScheme, s: f64, prec: u32) -> Result<LogEnclosure> {
    Ok(LogEnclosure::from_ival(&log2_lambda_iv(scheme, s, prec)?))
}

pub(crate) fn log2_lambda_iv(scheme: &PartitionScheme, s: f64, prec: u32) -> Result<Ival> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::InvalidArgument(format!("s = {s} must be a nonnegative real")));
    }
    let q = scheme.growth as f64;
    if q * (s + 1.0).powi(3) > MAX_BLOCK_EXPONENT as f64 {
        return Err(Error::Overflow { step: s as usize });
    }
    let sv = Ival::f64(prec, s);
    let s1 = sv.add_f64(1.0);
    let cube = |x: &Ival| x.mul(x).mul(x);
    let e1 = cube(&s1).mul_f64(q);
    let e0 = cube(&sv).mul_f64(q);
    let c = sv.mul_f64(2.0).add_f64(1.0).mul_f64(q).add_f64(scheme.offset as f64);
    // |J_s| = 2^{e1}(1 − x), x = 2^{e0−e1} + c·2^{−e1}
    let x = e0.sub(&e1).exp2().add(&c.mul(&e1.neg().exp2()));
    let one_minus = Ival::f64(prec, 1.0).sub(&x);
    if one_minus.lo.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::Domain(format!("|J_s| is not positive at s = {s}")));
    }
    Ok(e1.add(&one_minus.log2()).neg())
}
