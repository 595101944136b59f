use serde::{Deserialize, Serialize};
use std::fmt;

/// Rational angle in ℝ/ℤ as a reduced fraction `num/den`, `0 ≤ num < den ≤ 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Angle {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Angle {
    pub const MAX_DEN: u64 = 1 << 31;

    pub fn new(num: i64, den: u64) -> crate::Result<Self> {
        if den == 0 || den > Self::MAX_DEN {
            return Err(crate::Error::InvalidArgument(format!("angle denominator {den} out of range")));
        }
        let num = num.rem_euclid(den as i64) as u64;
        let g = gcd(num, den).max(1);
        Ok(Angle { num: num / g, den: den / g })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// t ↦ 2t mod 1, exact.
    pub fn double(&self) -> Self {
        let num = (2 * self.num) % self.den;
        let g = gcd(num, self.den).max(1);
        Angle { num: num / g, den: self.den / g }
    }

    pub fn double_n(&self, n: usize) -> Self {
        (0..n).fold(*self, |a, _| a.double())
    }

    /// 1 − t mod 1.
    pub fn conjugate(&self) -> Self {
        Angle { num: (self.den - self.num) % self.den, den: self.den }.reduced()
    }

    fn reduced(self) -> Self {
        let g = gcd(self.num, self.den).max(1);
        Angle { num: self.num / g, den: self.den / g }
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl std::str::FromStr for Angle {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        let bad = || crate::Error::InvalidArgument(format!("cannot parse angle '{s}'"));
        match s.split_once('/') {
            Some((a, b)) => Angle::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => Angle::new(s.trim().parse().map_err(|_| bad())?, 1),
        }
    }
}
