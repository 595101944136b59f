use num_complex::Complex64;
use rug::Float;

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = two_sum(s, e + self.lo + o.lo);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn from_float(x: &Float) -> Dd {
        let hi = x.to_f64();
        let lo = Float::with_val(x.prec(), x - hi).to_f64();
        Dd { hi, lo }
    }
}

/// Coefficients (lowest first) of Π (w − r)^m.
pub(crate) fn expand_roots(roots: &[(Float, u32)], prec: u32) -> Vec<Float> {
    let mut c = vec![Float::with_val(prec, 1)];
    for (r, m) in roots {
        for _ in 0..*m {
            let mut next = vec![Float::with_val(prec, 0); c.len() + 1];
            for (i, a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= Float::with_val(prec, a * r);
            }
            c = next;
        }
    }
    c
}

pub(crate) fn horner(coef: &[Complex64], z: Complex64) -> Complex64 {
    coef.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

pub(crate) fn derivative(coef: &[Complex64]) -> Vec<Complex64> {
    coef.iter().enumerate().skip(1).map(|(i, a)| a * i as f64).collect()
}

/// All complex roots by Aberth–Ehrlich iteration, polished by Newton.
pub(crate) fn polynomial_roots(coef: &[Complex64]) -> Vec<Complex64> {
    let mut coef = coef.to_vec();
    while coef.len() > 1 && coef.last().map_or(false, |a| a.norm() == 0.0) {
        coef.pop();
    }
    let n = coef.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let d = derivative(&coef);
    let lead = coef[n].norm();
    // Fujiwara-type bound for the starting circle
    let radius = (0..n).map(|k| (coef[k].norm() / lead).powf(1.0 / (n - k) as f64)).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = horner(&coef, z[i]) / horner(&d, z[i]);
            let repulse: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulse);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let step = horner(&coef, *r) / horner(&d, *r);
            if step.re.is_finite() && step.im.is_finite() {
                *r -= step;
            }
        }
    }
    z
}
