use super::ival::{log1m_exp2_r, Ival};
use rug::float::Round;
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    Down,
    Up,
    Nearest,
}

impl Rounding {
    fn mode(self) -> Round {
        match self {
            Rounding::Down => Round::Down,
            Rounding::Up => Round::Up,
            Rounding::Nearest => Round::Nearest,
        }
    }
}

/// A nonnegative real stored as its base-2 logarithm (−∞ for zero).
#[derive(Clone, Debug, PartialEq)]
pub struct LogScalar {
    pub log2_value: Float,
    pub rounding: Rounding,
    pub precision_bits: u32,
}

impl LogScalar {
    pub fn new(log2_value: Float, rounding: Rounding) -> Self {
        let precision_bits = log2_value.prec();
        LogScalar { log2_value, rounding, precision_bits }
    }

    pub fn zero(precision_bits: u32) -> Self {
        Self::new(super::ival::neg_inf(precision_bits), Rounding::Nearest)
    }

    pub fn from_f64(x: f64, precision_bits: u32) -> Self {
        let mut v = Float::with_val(precision_bits, x);
        v.log2_round(Round::Nearest);
        Self::new(v, Rounding::Nearest)
    }

    pub fn is_zero(&self) -> bool {
        self.log2_value.is_infinite() && self.log2_value.is_sign_negative()
    }

    pub fn log2_f64(&self) -> f64 {
        self.log2_value.to_f64_round(self.rounding.mode())
    }

    /// The value itself; overflows to ∞ or underflows to 0 outside the f64 range.
    pub fn to_f64(&self) -> f64 {
        let l = self.log2_f64();
        if l > 1100.0 {
            f64::INFINITY
        } else {
            l.exp2()
        }
    }

    /// log2(1 − 2^{−x}) for x > 0, rounded as requested.
    pub fn one_minus_pow2_neg(x: &Float, rounding: Rounding, precision_bits: u32) -> Self {
        Self::new(log1m_exp2_r(x, precision_bits, rounding.mode()), rounding)
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        write!(f, "2^{}", self.log2_value.to_string_radix(10, Some(24)))
    }
}

impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LogScalar", 3)?;
        st.serialize_field("log2_value", &self.log2_value.to_string_radix(10, Some(24)))?;
        st.serialize_field("rounding", &self.rounding)?;
        st.serialize_field("precision_bits", &self.precision_bits)?;
        st.end()
    }
}

/// Lower and upper log-domain bounds of a nonnegative real.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEnclosure {
    pub lo: LogScalar,
    pub hi: LogScalar,
}

impl LogEnclosure {
    pub(crate) fn from_ival(v: &Ival) -> Self {
        let (rl, rh) = if v.nearest { (Rounding::Nearest, Rounding::Nearest) } else { (Rounding::Down, Rounding::Up) };
        LogEnclosure { lo: LogScalar::new(v.lo.clone(), rl), hi: LogScalar::new(v.hi.clone(), rh) }
    }

    pub(crate) fn to_ival(&self) -> Ival {
        Ival {
            lo: self.lo.log2_value.clone(),
            hi: self.hi.log2_value.clone(),
            nearest: self.lo.rounding == Rounding::Nearest,
        }
    }

    pub fn precision_bits(&self) -> u32 {
        self.lo.precision_bits
    }

    /// hi − lo in log2 units (0 for an exact zero).
    pub fn width_log2(&self) -> f64 {
        if self.lo.is_zero() && self.hi.is_zero() {
            return 0.0;
        }
        Float::with_val(self.precision_bits(), &self.hi.log2_value - &self.lo.log2_value).to_f64_round(Round::Up)
    }

    pub fn is_zero(&self) -> bool {
        self.hi.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !(self.hi.log2_value.is_infinite() && self.hi.log2_value.is_sign_positive())
    }

    pub fn contains_log2(&self, x: &Float) -> bool {
        self.lo.log2_value <= *x && *x <= self.hi.log2_value
    }

    pub fn intersects(&self, o: &LogEnclosure) -> bool {
        self.to_ival().intersects(&o.to_ival())
    }

    /// Midpoint of the log2 bounds, as f64.
    pub fn log2_mid(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let p = self.precision_bits();
        let s = Float::with_val(p, &self.lo.log2_value + &self.hi.log2_value);
        (s / 2u32).to_f64()
    }
}
