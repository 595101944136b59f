use super::ival::{geom, wsum, Ival};
use super::log_scalar::LogEnclosure;
use super::scheme::PartitionScheme;
use crate::{Error, Result};
use rug::Float;
use serde::Serialize;
use std::cmp::Ordering;

/// Enclosure of the decay rate λ ≥ 0 (a real, not its logarithm).
#[derive(Clone, Debug)]
pub struct DecayRate(pub(crate) Ival);

impl DecayRate {
    pub fn exact(x: f64, prec: u32) -> Result<Self> {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda = {x} must be finite and nonnegative")));
        }
        Ok(DecayRate(Ival::f64(prec, x)))
    }

    /// λ from an enclosure of log2 λ.
    pub fn from_log2(l: &LogEnclosure) -> Self {
        DecayRate(l.to_ival().exp2())
    }

    /// Point value evaluated with round-to-nearest throughout.
    pub fn nearest(&self) -> Self {
        DecayRate(self.0.clone().as_nearest())
    }

    pub fn is_zero(&self) -> bool {
        self.0.hi.is_zero()
    }

    pub fn lower(&self) -> &Float {
        &self.0.lo
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSums {
    pub s: u64,
    #[serde(rename = "I_plus")]
    pub short_plus: LogEnclosure,
    #[serde(rename = "I_minus")]
    pub short_minus: LogEnclosure,
    #[serde(rename = "J_plus")]
    pub long_plus: LogEnclosure,
    #[serde(rename = "J_minus")]
    pub long_minus: LogEnclosure,
    #[serde(rename = "tildeI_plus")]
    pub short_weighted: LogEnclosure,
    #[serde(rename = "tildeJ_plus")]
    pub long_weighted: LogEnclosure,
    #[serde(rename = "hatJ_plus")]
    pub long_shifted_plus: LogEnclosure,
    #[serde(rename = "hatJ_minus")]
    pub long_shifted_minus: LogEnclosure,
}

impl BlockSums {
    pub fn all(&self) -> [(&'static str, &LogEnclosure); 8] {
        [
            ("I_plus", &self.short_plus),
            ("I_minus", &self.short_minus),
            ("J_plus", &self.long_plus),
            ("J_minus", &self.long_minus),
            ("tildeI_plus", &self.short_weighted),
            ("tildeJ_plus", &self.long_weighted),
            ("hatJ_plus", &self.long_shifted_plus),
            ("hatJ_minus", &self.long_shifted_minus),
        ]
    }
}

/// Block sums in log2 form, shared by the public evaluators and the lemma checks.
pub(crate) struct Blocks<'a> {
    pub scheme: &'a PartitionScheme,
    pub prec: u32,
    pub tau: Ival,
    pub xi: Ival,
    pub lam: Ival,
}

pub(crate) struct ShortBlock {
    pub plus: Ival,
    pub minus: Ival,
    pub weighted: Ival,
}

pub(crate) struct LongBlock {
    pub plus: Ival,
    pub minus: Ival,
    pub weighted: Ival,
    pub shifted_plus: Ival,
    pub shifted_minus: Ival,
}

impl<'a> Blocks<'a> {
    pub fn new(scheme: &'a PartitionScheme, tau: f64, rate: &DecayRate, prec: u32) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be finite and nonnegative")));
        }
        let mut tau_iv = Ival::f64(prec, tau);
        let mut xi = Ival::f64(prec, scheme.exponent);
        if rate.0.nearest {
            tau_iv.nearest = true;
            xi.nearest = true;
        }
        Ok(Blocks { scheme, prec, tau: tau_iv, xi, lam: rate.0.clone() })
    }

    pub fn u(&self, x: u64) -> Ival {
        let mut v = Ival::u64(self.prec, x);
        v.nearest = self.lam.nearest;
        v
    }

    pub fn fixed(&self, x: Ival) -> Ival {
        Ival { nearest: self.lam.nearest, ..x }
    }

    /// ±τξ·B with B the block label.
    fn label(&self, label: u64, sign: f64) -> Ival {
        self.tau.mul(&self.xi).mul(&self.u(label)).mul_f64(sign)
    }

    pub fn short(&self, s: u64) -> Result<ShortBlock> {
        let q = self.scheme.growth;
        let a_minus_1 = self.fixed(self.scheme.a_iv(s, self.prec)?.sub(&Ival::f64(self.prec, 1.0)));
        let len = self.u(self.scheme.short_len(s));
        // k = a_s − 1 + m, N(k) = m + q s² + Ξ s
        let base = self
            .lam
            .mul(&a_minus_1)
            .neg()
            .sub(&self.tau.mul(&self.u(q * s * s + self.scheme.offset * s)));
        let rate = self.lam.add(&self.tau);
        let g = geom(&rate, &len);
        let plus_base = base.add(&self.label(2 * s + 1, 1.0));
        let minus_base = base.add(&self.label(2 * s + 1, -1.0));
        let weighted = plus_base.add(&a_minus_1.log2().add(&g).lse(&wsum(&rate, &len)));
        Ok(ShortBlock { plus: plus_base.add(&g), minus: minus_base.add(&g), weighted })
    }

    /// log2 of 2^{−q τ (s+1)² − (Ξ ∓ 2ξ) τ (s+1)}.
    pub fn long_prefactor(&self, s: u64, sign: f64) -> Ival {
        let q = self.scheme.growth;
        let n = self.u(q * (s + 1) * (s + 1));
        let lin = self.u(self.scheme.offset).sub(&self.xi.mul_f64(2.0 * sign)).mul(&self.u(s + 1));
        self.tau.mul(&n.add(&lin)).neg()
    }

    pub fn long_len(&self, s: u64) -> Result<Ival> {
        Ok(self.fixed(self.scheme.long_len_iv(s, self.prec)?.max0()))
    }

    pub fn b(&self, s: u64) -> Result<Ival> {
        Ok(self.fixed(self.scheme.b_iv(s, self.prec)?))
    }

    pub fn long(&self, s: u64) -> Result<LongBlock> {
        let len = self.long_len(s)?;
        let b_minus_1 = self.b(s)?.sub(&self.u(1));
        let (pp, pm) = (self.long_prefactor(s, 1.0), self.long_prefactor(s, -1.0));
        let shift = self.lam.mul(&b_minus_1).neg();
        let g = geom(&self.lam, &len);
        let plus = pp.add(&shift).add(&g);
        let minus = pm.add(&shift).add(&g);
        let weighted = pp.add(&shift).add(&b_minus_1.log2().add(&g).lse(&wsum(&self.lam, &len)));
        // k = b + s² − 1 + m with weight m
        let sq = self.u(s * s);
        let hat_len = len.sub(&sq).max0();
        let hat = self.lam.mul(&b_minus_1.add(&sq)).neg().add(&wsum(&self.lam, &hat_len));
        Ok(LongBlock { plus, minus, weighted, shifted_plus: pp.add(&hat), shifted_minus: pm.add(&hat) })
    }
}

fn check_width(name: &str, v: &Ival) -> Result<()> {
    if v.hi.is_infinite() && v.hi.is_sign_negative() {
        return Ok(());
    }
    let w = v.width();
    if !(w <= 1.0 / 256.0) {
        return Err(Error::Precision(format!(
            "{name} enclosure is {} wide in log2; raise precision_bits",
            w.to_f64()
        )));
    }
    Ok(())
}

fn assemble(s: u64, i: ShortBlock, j: LongBlock) -> BlockSums {
    let e = LogEnclosure::from_ival;
    BlockSums {
        s,
        short_plus: e(&i.plus),
        short_minus: e(&i.minus),
        long_plus: e(&j.plus),
        long_minus: e(&j.minus),
        short_weighted: e(&i.weighted),
        long_weighted: e(&j.weighted),
        long_shifted_plus: e(&j.shifted_plus),
        long_shifted_minus: e(&j.shifted_minus),
    }
}

/// All eight sums of block s as directed-rounding enclosures.
pub fn block_sums(scheme: &PartitionScheme, s: u64, tau: f64, rate: &DecayRate, prec: u32) -> Result<BlockSums> {
    let ctx = Blocks::new(scheme, tau, rate, prec)?;
    let i = ctx.short(s)?;
    let j = ctx.long(s)?;
    for (name, v) in [
        ("I_plus", &i.plus),
        ("I_minus", &i.minus),
        ("tildeI_plus", &i.weighted),
        ("J_plus", &j.plus),
        ("J_minus", &j.minus),
        ("tildeJ_plus", &j.weighted),
        ("hatJ_plus", &j.shifted_plus),
        ("hatJ_minus", &j.shifted_minus),
    ] {
        check_width(name, v)?;
    }
    Ok(assemble(s, i, j))
}

/// The same sums evaluated once with round-to-nearest (lo = hi).
pub fn block_sums_nearest(scheme: &PartitionScheme, s: u64, tau: f64, rate: &DecayRate, prec: u32) -> Result<BlockSums> {
    let ctx = Blocks::new(scheme, tau, &rate.nearest(), prec)?;
    Ok(assemble(s, ctx.short(s)?, ctx.long(s)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesTotals {
    #[serde(rename = "Pi_plus")]
    pub plus: LogEnclosure,
    #[serde(rename = "Pi_minus")]
    pub minus: LogEnclosure,
    #[serde(rename = "tildePi_plus")]
    pub weighted: LogEnclosure,
    pub s_max: u64,
    /// Upper bounds include a finite tail bound.
    pub tail_certified: bool,
}

pub(crate) struct TailBounds {
    pub unweighted: Ival,
    pub weighted: Ival,
    pub certified: bool,
}

impl Blocks<'_> {
    /// log2 of Σ_{s ≥ j} 2^{−τ(q s² + s)}.
    fn decay_sum(&self, j: u64) -> Ival {
        let q = self.scheme.growth;
        let first = self.tau.mul(&self.u(q * j * j + j)).neg();
        let ratio = self.tau.mul(&self.u(q * (2 * j + 1) + 1));
        first.sub(&ratio.log1m_exp2())
    }

    /// Upper bounds for every block beyond `s_max`, in log2.
    ///
    /// With Ξ − 2ξ ≥ 1 the block exponents are dominated by −τ(q s² + s) (plus
    /// τξ on short blocks); the k-sums are bounded by their infinite versions,
    /// keeping the factor 2^{−λ x} at the first index x of the tail.
    pub fn tail(&self, s_max: u64) -> Result<TailBounds> {
        let p = self.prec;
        let inf = Ival::point(super::ival::pos_inf(p));
        let admissible = (self.scheme.offset as f64) - 2.0 * self.scheme.exponent >= 1.0;
        let positive = self.lam.lo.cmp0() == Some(Ordering::Greater)
            && self.tau.lo.cmp0() == Some(Ordering::Greater);
        if !admissible || !positive {
            return Ok(TailBounds { unweighted: inf.clone(), weighted: inf, certified: false });
        }
        let j0 = s_max + 1;
        let lam = &self.lam;
        let rate = lam.add(&self.tau);
        // log2 Σ_{m≥1} 2^{−ρm} and log2 Σ_{m≥1} m 2^{−ρm}
        let g_inf = |r: &Ival| r.neg().sub(&r.log1m_exp2());
        let s_inf = |r: &Ival| r.neg().sub(&r.log1m_exp2().mul_f64(2.0));
        let ln2 = Ival {
            lo: super::ival::ln2(p, rug::float::Round::Down),
            hi: super::ival::ln2(p, rug::float::Round::Up),
            nearest: false,
        };
        // sup over x ≥ x0 of log2(x 2^{−λx}); past the turning point the
        // value at x0, otherwise the bound x 2^{−λx} ≤ 1/(λ ln 2)
        let peak = |x0: &Ival| -> Ival {
            let turn = lam.mul(x0).mul(&ln2);
            if turn.lo >= 1 {
                x0.log2().sub(&lam.mul(x0))
            } else {
                lam.log2().add(&ln2.log2()).neg()
            }
        };
        let xi_tau = self.tau.mul(&self.xi);
        let x0 = self.scheme.a_iv(j0, p)?.sub(&Ival::f64(p, 1.0));
        let y0 = self.scheme.b_iv(j0, p)?.sub(&Ival::f64(p, 1.0));
        let short_t = self.decay_sum(j0);
        let long_t = self.decay_sum(j0 + 1);
        let short_un = xi_tau.sub(&lam.mul(&x0)).add(&g_inf(&rate)).add(&short_t);
        let long_un = lam.mul(&y0).neg().add(&g_inf(lam)).add(&long_t);
        let short_w = xi_tau
            .add(&short_t)
            .add(&peak(&x0).add(&g_inf(&rate)).lse(&lam.mul(&x0).neg().add(&s_inf(&rate))));
        let long_w = long_t.add(&peak(&y0).add(&g_inf(lam)).lse(&lam.mul(&y0).neg().add(&s_inf(lam))));
        Ok(TailBounds { unweighted: short_un.lse(&long_un), weighted: short_w.lse(&long_w), certified: true })
    }
}

impl Ival {
    /// Raise the upper end by a nonnegative addend given in log2.
    pub(crate) fn with_upper_tail(&self, tail: &Ival) -> Ival {
        let p = self.prec();
        Ival {
            lo: self.lo.clone(),
            hi: super::ival::lse_r(&self.hi, &tail.hi, p, rug::float::Round::Up),
            nearest: false,
        }
    }
}

pub(crate) struct RawTotals {
    pub plus: Ival,
    pub minus: Ival,
    pub weighted: Ival,
    pub certified: bool,
}

pub(crate) fn raw_totals(ctx: &Blocks, s_max: u64) -> Result<RawTotals> {
    let mut plus = Ival::zero(ctx.prec);
    let mut minus = plus.clone();
    let mut weighted = plus.clone();
    for s in 0..=s_max {
        let i = ctx.short(s)?;
        let j = ctx.long(s)?;
        plus = plus.lse(&i.plus).lse(&j.plus);
        minus = minus.lse(&i.minus).lse(&j.minus);
        weighted = weighted.lse(&i.weighted).lse(&j.weighted);
    }
    let tail = ctx.tail(s_max)?;
    Ok(RawTotals {
        plus: plus.with_upper_tail(&tail.unweighted),
        minus: minus.with_upper_tail(&tail.unweighted),
        weighted: weighted.with_upper_tail(&tail.weighted),
        certified: tail.certified,
    })
}

/// Π⁺, Π⁻ and the weighted Π̃⁺: blocks up to `s_max` summed exactly, the rest
/// bounded above.
pub fn series_totals(scheme: &PartitionScheme, tau: f64, rate: &DecayRate, s_max: u64, prec: u32) -> Result<SeriesTotals> {
    let need = tau.ceil() as u64 + 2;
    if s_max < need {
        return Err(Error::InvalidArgument(format!("s_max = {s_max} below ceil(tau) + 2 = {need}")));
    }
    let ctx = Blocks::new(scheme, tau, rate, prec)?;
    let t = raw_totals(&ctx, s_max)?;
    Ok(SeriesTotals {
        plus: LogEnclosure::from_ival(&t.plus),
        minus: LogEnclosure::from_ival(&t.minus),
        weighted: LogEnclosure::from_ival(&t.weighted),
        s_max,
        tail_certified: t.certified,
    })
}
