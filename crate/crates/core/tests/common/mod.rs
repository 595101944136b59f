use gibbs_core::series::{BlockSums, LogEnclosure};
use rug::Float;

pub const WIDE: u32 = 512;

/// Term-by-term block sums in linear domain, written from the definitions
/// without touching the library's counters.
pub struct Brute {
    pub q: u64,
    pub offset: u64,
    pub xi: f64,
}

#[derive(Debug)]
pub struct BruteBlock {
    pub short_plus: Float,
    pub short_minus: Float,
    pub short_weighted: Float,
    pub long_plus: Float,
    pub long_minus: Float,
    pub long_weighted: Float,
    pub shifted_plus: Float,
    pub shifted_minus: Float,
}

impl Brute {
    fn a(&self, s: u64) -> u64 {
        1u64 << (self.q * s * s * s)
    }

    fn b(&self, s: u64) -> u64 {
        self.a(s) + self.q * (2 * s + 1) + self.offset
    }

    fn term(&self, tau: f64, lam: f64, k: u64, n: u64, label: u64, sign: f64) -> Float {
        let e = Float::with_val(WIDE, -lam) * k + Float::with_val(WIDE, -tau) * n
            + Float::with_val(WIDE, tau) * Float::with_val(WIDE, sign * self.xi) * label;
        e.exp2()
    }

    pub fn block(&self, s: u64, tau: f64, lam: f64) -> BruteBlock {
        let z = || Float::with_val(WIDE, 0);
        let mut out = BruteBlock {
            short_plus: z(),
            short_minus: z(),
            short_weighted: z(),
            long_plus: z(),
            long_minus: z(),
            long_weighted: z(),
            shifted_plus: z(),
            shifted_minus: z(),
        };
        let (a, b, next) = (self.a(s), self.b(s), self.a(s + 1));
        for k in a..b {
            let n = k - a + 1 + self.q * s * s + self.offset * s;
            let p = self.term(tau, lam, k, n, 2 * s + 1, 1.0);
            out.short_weighted += Float::with_val(WIDE, &p * k);
            out.short_plus += p;
            out.short_minus += self.term(tau, lam, k, n, 2 * s + 1, -1.0);
        }
        let n = self.q * (s + 1) * (s + 1) + self.offset * (s + 1);
        for k in b..next.max(b) {
            let p = self.term(tau, lam, k, n, 2 * s + 2, 1.0);
            let m = self.term(tau, lam, k, n, 2 * s + 2, -1.0);
            out.long_weighted += Float::with_val(WIDE, &p * k);
            if k >= b + s * s {
                let w = k + 1 - b - s * s;
                out.shifted_plus += Float::with_val(WIDE, &p * w);
                out.shifted_minus += Float::with_val(WIDE, &m * w);
            }
            out.long_plus += p;
            out.long_minus += m;
        }
        out
    }
}

/// |x / enclosure − 1| within `rel` on both bounds, or both zero.
pub fn agrees(enc: &LogEnclosure, x: &Float, rel: f64) -> bool {
    if x.is_zero() {
        return enc.is_zero();
    }
    let l = Float::with_val(WIDE, x.log2_ref());
    let tol = rel / std::f64::consts::LN_2;
    let lo = Float::with_val(WIDE, &enc.lo.log2_value - &l).to_f64();
    let hi = Float::with_val(WIDE, &enc.hi.log2_value - &l).to_f64();
    lo.abs() <= tol && hi.abs() <= tol
}

pub fn pairs(b: &BlockSums, o: &BruteBlock) -> Vec<(&'static str, LogEnclosure, Float)> {
    vec![
        ("short_plus", b.short_plus.clone(), o.short_plus.clone()),
        ("short_minus", b.short_minus.clone(), o.short_minus.clone()),
        ("short_weighted", b.short_weighted.clone(), o.short_weighted.clone()),
        ("long_plus", b.long_plus.clone(), o.long_plus.clone()),
        ("long_minus", b.long_minus.clone(), o.long_minus.clone()),
        ("long_weighted", b.long_weighted.clone(), o.long_weighted.clone()),
        ("long_shifted_plus", b.long_shifted_plus.clone(), o.shifted_plus.clone()),
        ("long_shifted_minus", b.long_shifted_minus.clone(), o.shifted_minus.clone()),
    ]
}
