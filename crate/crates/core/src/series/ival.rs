//! Closed real intervals with MPFR endpoints and outward rounding. A
//! `nearest` interval has equal endpoints computed with round-to-nearest,
//! which lets the same code paths produce the nearest-mode value.

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::{Float, Integer};
use std::cmp::Ordering;

#[derive(Clone, Debug)]
pub(crate) struct Ival {
    pub lo: Float,
    pub hi: Float,
    pub nearest: bool,
}

pub(crate) fn flip(r: Round) -> Round {
    match r {
        Round::Down => Round::Up,
        Round::Up => Round::Down,
        other => other,
    }
}

fn fmin(a: Float, b: Float) -> Float {
    if a <= b {
        a
    } else {
        b
    }
}

fn fmax(a: Float, b: Float) -> Float {
    if a >= b {
        a
    } else {
        b
    }
}

macro_rules! rnd {
    ($prec:expr, $e:expr, $r:expr) => {
        Float::with_val_round($prec, $e, $r).0
    };
}

pub(crate) fn neg_inf(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Special::NegInfinity)
}

pub(crate) fn pos_inf(prec: u32) -> Float {
    Float::with_val(prec, rug::float::Special::Infinity)
}

pub(crate) fn ln2(prec: u32, r: Round) -> Float {
    rnd!(prec, Constant::Log2, r)
}

pub(crate) fn log2_r(x: &Float, prec: u32, r: Round) -> Float {
    let mut y = Float::with_val(prec, 0);
    y.assign_round(x, r);
    if y.cmp0() == Some(Ordering::Less) {
        return Float::with_val(prec, rug::float::Special::Nan);
    }
    y.log2_round(r);
    y
}

pub(crate) fn exp2_r(x: &Float, prec: u32, r: Round) -> Float {
    let mut y = Float::with_val(prec, 0);
    y.assign_round(x, r);
    y.exp2_round(r);
    y
}

/// log2(2^a + 2^b).
pub(crate) fn lse_r(a: &Float, b: &Float, prec: u32, r: Round) -> Float {
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big.is_infinite() && big.is_sign_negative() {
        return neg_inf(prec);
    }
    if big.is_infinite() {
        return pos_inf(prec);
    }
    if small.is_infinite() {
        return rnd!(prec, big, r);
    }
    let d = rnd!(prec, small - big, r);
    let t = exp2_r(&d, prec, r);
    let mut l = t;
    l.ln_1p_round(r);
    let lg = rnd!(prec, &l / &ln2(prec, flip(r)), r);
    rnd!(prec, big + &lg, r)
}

/// log2(1 − 2^{−x}) for x ≥ 0, increasing in x.
pub(crate) fn log1m_exp2_r(x: &Float, prec: u32, r: Round) -> Float {
    if x.is_infinite() && x.is_sign_positive() {
        return Float::with_val(prec, 0);
    }
    if x.cmp0() != Some(Ordering::Greater) {
        return neg_inf(prec);
    }
    let w = prec + 16;
    if *x > 1 {
        // ln(1 − t)/ln2 with t = 2^{−x}; a larger t gives a smaller result
        let mut t = Float::with_val(w, 1);
        t.assign_round(-x, flip(r));
        t.exp2_round(flip(r));
        t = -t;
        t.ln_1p_round(r);
        return rnd!(prec, &t / &ln2(w, r), r);
    }
    let y = rnd!(w, x * &ln2(w, r), r);
    // 1 − e^{−y} = −expm1(−y)
    let mut e = rnd!(w, -&y, flip(r));
    e.exp_m1_round(flip(r));
    let t = -e;
    log2_r(&t, prec, r)
}

/// log2 Σ_{m=1}^{len} 2^{−rate·m} at a point.
pub(crate) fn geom_r(rate: &Float, len: &Float, prec: u32, r: Round) -> Float {
    if len.cmp0() != Some(Ordering::Greater) {
        return neg_inf(prec);
    }
    if rate.is_zero() {
        return log2_r(len, prec, r);
    }
    let x = rnd!(prec, rate * len, r);
    let a = log1m_exp2_r(&x, prec, r);
    let b = log1m_exp2_r(rate, prec, flip(r));
    let t = rnd!(prec, &a - &b, r);
    rnd!(prec, &t - rate, r)
}

/// log2 Σ_{m=1}^{len} m·2^{−rate·m} at a point.
pub(crate) fn wsum_r(rate: &Float, len: &Float, prec: u32, r: Round) -> Float {
    if len.cmp0() != Some(Ordering::Greater) {
        return neg_inf(prec);
    }
    let tri = {
        let l1 = rnd!(prec, len + 1u32, r);
        let p = rnd!(prec, len * &l1, r);
        let h = rnd!(prec, p / 2u32, r);
        log2_r(&h, prec, r)
    };
    if rate.is_zero() {
        return tri;
    }
    let x = rnd!(prec, rate * len, r);
    let tiny = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    if x < tiny {
        // each term m·2^{−rate·m} lies in [m·2^{−rate·len}, m]
        return match r {
            Round::Down => rnd!(prec, &tri - &rnd!(prec, rate * len, Round::Up), Round::Down),
            _ => tri,
        };
    }
    let boost = match x.get_exp() {
        Some(e) if e < 0 => (-e) as u32,
        _ => 0,
    };
    let w = prec + boost + 64;
    let x = rnd!(w, rate * len, r);
    // A = 1 − 2^{−x}, u = 1 − 2^{−rate}, B = A − len·u·2^{−x}
    let a = {
        let y = rnd!(w, &x * &ln2(w, r), r);
        let mut e = rnd!(w, -&y, flip(r));
        e.exp_m1_round(flip(r));
        -e
    };
    // u rounded against r: it enters both the subtracted product and −2 log2 u
    let u = {
        let y = rnd!(w, rate * &ln2(w, flip(r)), flip(r));
        let mut e = rnd!(w, -&y, r);
        e.exp_m1_round(r);
        -e
    };
    let one_minus_a = exp2_r(&rnd!(w, -&x, flip(r)), w, flip(r));
    let prod = rnd!(w, len * &u, flip(r));
    let prod = rnd!(w, &prod * &one_minus_a, flip(r));
    let b = rnd!(w, &a - &prod, r);
    if b.cmp0() != Some(Ordering::Greater) {
        return match r {
            Round::Down => neg_inf(prec),
            _ => tri,
        };
    }
    // log2 S = −rate + log2 B − 2 log2 u
    let lb = log2_r(&b, w, r);
    let lu = log2_r(&u, w, flip(r));
    let t = rnd!(w, &lb - &rnd!(w, &lu * 2u32, flip(r)), r);
    let v = rnd!(prec, &t - rate, r);
    // never above the rate-free triangle bound
    if matches!(r, Round::Up) && v > tri {
        tri
    } else {
        v
    }
}

impl Ival {
    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    fn rd(&self, other_nearest: bool) -> (Round, Round) {
        if self.nearest || other_nearest {
            (Round::Nearest, Round::Nearest)
        } else {
            (Round::Down, Round::Up)
        }
    }

    pub fn point(x: Float) -> Self {
        Ival { lo: x.clone(), hi: x, nearest: false }
    }

    pub fn f64(prec: u32, x: f64) -> Self {
        Self::point(Float::with_val(prec.max(53), x))
    }

    pub fn int(prec: u32, x: &Integer) -> Self {
        Ival { lo: rnd!(prec, x, Round::Down), hi: rnd!(prec, x, Round::Up), nearest: false }
    }

    pub fn u64(prec: u32, x: u64) -> Self {
        Self::int(prec, &Integer::from(x))
    }

    /// 2^e for an exact integer exponent.
    pub fn pow2(prec: u32, e: i64) -> Self {
        let mut f = Float::with_val(prec, 1);
        f <<= e as i32;
        Self::point(f)
    }

    pub fn neg_inf(prec: u32) -> Self {
        Self::point(neg_inf(prec))
    }

    pub fn zero(prec: u32) -> Self {
        Self::point(Float::with_val(prec, 0))
    }

    pub fn as_nearest(mut self) -> Self {
        self.nearest = true;
        let m = rnd!(self.prec(), &self.lo + &self.hi, Round::Nearest);
        self.lo = rnd!(self.prec(), m / 2u32, Round::Nearest);
        self.hi = self.lo.clone();
        self
    }

    pub fn add(&self, o: &Ival) -> Ival {
        let p = self.prec().max(o.prec());
        let (d, u) = self.rd(o.nearest);
        Ival { lo: rnd!(p, &self.lo + &o.lo, d), hi: rnd!(p, &self.hi + &o.hi, u), nearest: d == u }
    }

    pub fn neg(&self) -> Ival {
        Ival { lo: -self.hi.clone(), hi: -self.lo.clone(), nearest: self.nearest }
    }

    pub fn sub(&self, o: &Ival) -> Ival {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Ival) -> Ival {
        let p = self.prec().max(o.prec());
        let (d, u) = self.rd(o.nearest);
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs.iter().map(|(a, b)| rnd!(p, *a * *b, d)).reduce(fmin).unwrap();
        let hi = pairs.iter().map(|(a, b)| rnd!(p, *a * *b, u)).reduce(fmax).unwrap();
        Ival { lo, hi, nearest: d == u }
    }

    pub fn mul_f64(&self, x: f64) -> Ival {
        self.mul(&Ival::f64(self.prec(), x))
    }

    pub fn add_f64(&self, x: f64) -> Ival {
        self.add(&Ival::f64(self.prec(), x))
    }

    /// Monotone increasing function applied endpoint-wise.
    fn inc(&self, f: impl Fn(&Float, u32, Round) -> Float) -> Ival {
        let p = self.prec();
        let (d, u) = self.rd(false);
        Ival { lo: f(&self.lo, p, d), hi: f(&self.hi, p, u), nearest: self.nearest }
    }

    pub fn log2(&self) -> Ival {
        self.inc(log2_r)
    }

    pub fn exp2(&self) -> Ival {
        self.inc(exp2_r)
    }

    pub fn log1m_exp2(&self) -> Ival {
        self.inc(log1m_exp2_r)
    }

    pub fn lse(&self, o: &Ival) -> Ival {
        let p = self.prec().max(o.prec());
        let (d, u) = self.rd(o.nearest);
        Ival { lo: lse_r(&self.lo, &o.lo, p, d), hi: lse_r(&self.hi, &o.hi, p, u), nearest: d == u }
    }

    pub fn max0(&self) -> Ival {
        let z = Float::with_val(self.prec(), 0);
        Ival { lo: fmax(self.lo.clone(), z.clone()), hi: fmax(self.hi.clone(), z), nearest: self.nearest }
    }

    pub fn width(&self) -> Float {
        rnd!(self.prec(), &self.hi - &self.lo, Round::Up)
    }

    pub fn intersects(&self, o: &Ival) -> bool {
        self.lo <= o.hi && o.lo <= self.hi
    }
}

/// log2 Σ_{m=1}^{len} 2^{−rate·m}: decreasing in rate, increasing in len.
pub(crate) fn geom(rate: &Ival, len: &Ival) -> Ival {
    let p = rate.prec().max(len.prec());
    let (d, u) = rate.rd(len.nearest);
    Ival { lo: geom_r(&rate.hi, &len.lo, p, d), hi: geom_r(&rate.lo, &len.hi, p, u), nearest: d == u }
}

/// log2 Σ_{m=1}^{len} m·2^{−rate·m}.
pub(crate) fn wsum(rate: &Ival, len: &Ival) -> Ival {
    let p = rate.prec().max(len.prec());
    let (d, u) = rate.rd(len.nearest);
    Ival { lo: wsum_r(&rate.hi, &len.lo, p, d), hi: wsum_r(&rate.lo, &len.hi, p, u), nearest: d == u }
}
