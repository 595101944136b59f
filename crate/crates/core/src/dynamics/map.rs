use crate::deform::Dd;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Standard,
    Deformed,
}

/// Either z ↦ z² + c or an explicit polynomial with stored coefficients
/// (lowest degree first).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticMap {
    pub kind: MapKind,
    pub c_or_lambda: Complex64,
    pub coefficients: Vec<Complex64>,
    /// Rounding residues of the real parts of `coefficients`; when present,
    /// real evaluation runs in double-double.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub coefficient_tails: Vec<f64>,
}

impl QuadraticMap {
    pub fn standard(c: Complex64) -> Self {
        QuadraticMap { kind: MapKind::Standard, c_or_lambda: c, coefficients: Vec::new(), coefficient_tails: Vec::new() }
    }

    pub fn real(c: f64) -> Self {
        Self::standard(Complex64::new(c, 0.0))
    }

    pub fn deformed(lambda: f64, coefficients: Vec<Complex64>) -> Self {
        QuadraticMap {
            kind: MapKind::Deformed,
            c_or_lambda: Complex64::new(lambda, 0.0),
            coefficients,
            coefficient_tails: Vec::new(),
        }
    }

    /// Real coefficients given as hi + lo pairs.
    pub fn deformed_split(lambda: f64, hi: &[f64], lo: &[f64]) -> Self {
        let mut m = Self::deformed(lambda, hi.iter().map(|&a| Complex64::new(a, 0.0)).collect());
        m.coefficient_tails = lo.to_vec();
        m
    }

    fn horner_dd(&self, x: f64) -> (Dd, Dd) {
        let (mut p, mut dp) = (Dd::default(), Dd::default());
        for (a, t) in self.coefficients.iter().zip(&self.coefficient_tails).rev() {
            dp = dp.mul_f64(x).add(p);
            p = p.mul_f64(x).add(Dd { hi: a.re, lo: *t });
        }
        (p, dp)
    }

    pub fn c(&self) -> Complex64 {
        self.c_or_lambda
    }

    pub fn is_standard(&self) -> bool {
        self.kind == MapKind::Standard
    }

    pub fn degree(&self) -> usize {
        match self.kind {
            MapKind::Standard => 2,
            MapKind::Deformed => self.coefficients.len().saturating_sub(1),
        }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self.kind {
            MapKind::Standard => z * z + self.c_or_lambda,
            MapKind::Deformed => {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in self.coefficients.iter().rev() {
                    acc = acc * z + a;
                }
                acc
            }
        }
    }

    #[inline]
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.eval_with_deriv(z).1
    }

    /// Value and derivative in one Horner pass.
    #[inline]
    pub fn eval_with_deriv(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.kind {
            MapKind::Standard => (z * z + self.c_or_lambda, 2.0 * z),
            MapKind::Deformed => {
                let zero = Complex64::new(0.0, 0.0);
                let (mut p, mut dp) = (zero, zero);
                for a in self.coefficients.iter().rev() {
                    dp = dp * z + p;
                    p = p * z + a;
                }
                (p, dp)
            }
        }
    }

    /// Real-line evaluation for maps with real coefficients.
    #[inline]
    pub fn eval_real(&self, x: f64) -> f64 {
        match self.kind {
            MapKind::Standard => x * x + self.c_or_lambda.re,
            MapKind::Deformed if !self.coefficient_tails.is_empty() => self.horner_dd(x).0.to_f64(),
            MapKind::Deformed => self.coefficients.iter().rev().fold(0.0, |acc, a| acc * x + a.re),
        }
    }

    #[inline]
    pub fn deriv_real(&self, x: f64) -> f64 {
        match self.kind {
            MapKind::Standard => 2.0 * x,
            MapKind::Deformed if !self.coefficient_tails.is_empty() => self.horner_dd(x).1.to_f64(),
            MapKind::Deformed => {
                let (mut p, mut dp) = (0.0, 0.0);
                for a in self.coefficients.iter().rev() {
                    dp = dp * x + p;
                    p = p * x + a.re;
                }
                dp
            }
        }
    }

    /// f^n(z) together with (f^n)'(z).
    pub fn iterate_with_deriv(&self, z: Complex64, n: usize) -> (Complex64, Complex64) {
        let mut w = z;
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            let (fw, dfw) = self.eval_with_deriv(w);
            d *= dfw;
            w = fw;
        }
        (w, d)
    }

    pub fn iterate(&self, z: Complex64, n: usize) -> Complex64 {
        (0..n).fold(z, |w, _| self.eval(w))
    }

    pub fn iterate_real(&self, x: f64, n: usize) -> f64 {
        (0..n).fold(x, |w, _| self.eval_real(w))
    }

    /// log |Df^n(x)| along the real orbit of x.
    pub fn log_deriv_real(&self, x: f64, n: usize) -> f64 {
        let mut w = x;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += self.deriv_real(w).abs().ln();
            w = self.eval_real(w);
        }
        acc
    }
}
