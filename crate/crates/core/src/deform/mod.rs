//! The deformed family λ + w² + ω(λ) w³ P_λ(w): a polynomial agreeing with
//! z² + λ on ±β and on the orbits of p, p⁺ and p⁻, with the multiplier of p⁻
//! moved so that χ(p⁻) = χ(p⁺).

pub(crate) mod poly;

pub(crate) use poly::Dd;
mod quadlike;

pub use quadlike::{quadratic_like_check, QuadraticLikeReport, DEFAULT_RADIUS};

use crate::config::Margins;
use crate::dynamics::QuadraticMap;
use crate::puzzle::{cantor_data, CantorData};
use crate::{Error, Result};
use poly::expand_roots;
use rug::ops::Pow;
use rug::Float;
use num_complex::Complex64;
use serde::Serialize;

/// Default exploration grid: 32 points in (−2, −2 + 0.004].
pub const GRID_POINTS: usize = 32;
pub const GRID_SPAN: f64 = 0.004;

/// Below this |DP(p⁻)| the construction is rejected.
pub const SINGULAR_TOLERANCE: f64 = 1e-12;

pub fn default_grid() -> Vec<f64> {
    (1..=GRID_POINTS).map(|i| -2.0 + GRID_SPAN * i as f64 / GRID_POINTS as f64).collect()
}

/// Everything the construction uses, kept for inspection.
#[derive(Clone, Debug, Serialize)]
pub struct Deformation {
    pub lambda: f64,
    pub omega: f64,
    pub beta: f64,
    /// Roots of P with multiplicities.
    pub factor_roots: Vec<(f64, u32)>,
    /// DP at p⁻, from the factored form.
    pub dp_at_p_minus: f64,
    pub map: QuadraticMap,
    #[serde(skip)]
    pub data: CantorData,
}

/// Working precision for the periodic points, ω and the expansion of P.
const WORK_PREC: u32 = 256;

fn orbit_derivative(orbit: &[f64]) -> f64 {
    orbit.iter().map(|x| 2.0 * x).product()
}

fn hp_orbit(lambda: f64, x: &Float, len: usize) -> Vec<Float> {
    let mut out = vec![x.clone()];
    for _ in 1..len {
        let last = out.last().expect("nonempty");
        out.push(Float::with_val(WORK_PREC, last.square_ref()) + lambda);
    }
    out
}

fn hp_orbit_derivative(orbit: &[Float]) -> Float {
    orbit.iter().fold(Float::with_val(WORK_PREC, 1), |acc, x| acc * x * 2u32)
}

/// Newton on f^period(x) = x at high precision from a double seed.
fn hp_periodic(lambda: f64, seed: f64, period: usize) -> Result<Float> {
    let mut x = Float::with_val(WORK_PREC, seed);
    for _ in 0..20 {
        let mut y = x.clone();
        let mut d = Float::with_val(WORK_PREC, 1);
        for _ in 0..period {
            d *= Float::with_val(WORK_PREC, &y * 2u32);
            y = Float::with_val(WORK_PREC, y.square_ref()) + lambda;
        }
        let step = Float::with_val(WORK_PREC, &y - &x) / (d - 1u32);
        x -= &step;
        if step.is_zero() || step.get_exp().map_or(false, |e| e < -(WORK_PREC as i32) + 4) {
            return Ok(x);
        }
    }
    let moved = (x.to_f64() - seed).abs();
    if moved > 1e-9 {
        return Err(Error::NoConvergence(format!("period-{period} refinement drifted by {moved:e}")));
    }
    Ok(x)
}

fn factor_roots(lambda: f64, data: &CantorData) -> Result<(Vec<(Float, u32)>, usize)> {
    let disc = Float::with_val(WORK_PREC, 1 - Float::with_val(WORK_PREC, lambda) * 4u32).sqrt();
    let beta = (disc + 1u32) / 2u32;
    let mut roots = vec![(beta.clone(), 1), (-beta, 1)];
    for seed in [data.p, data.p_plus] {
        for x in hp_orbit(lambda, &hp_periodic(lambda, seed, 3)?, 3) {
            roots.push((x, 2));
        }
    }
    let simple = roots.len();
    for (j, x) in hp_orbit(lambda, &hp_periodic(lambda, data.p_minus, 6)?, 6).into_iter().enumerate() {
        roots.push((x, if j == 0 { 1 } else { 2 }));
    }
    Ok((roots, simple))
}

/// Builds ω(λ) and the coefficients of the deformed map.
pub fn deformation(lambda: f64) -> Result<Deformation> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda = {lambda} is not finite")));
    }
    let data = cantor_data(lambda, Margins::default().d2)?;
    let (roots, simple) = factor_roots(lambda, &data)?;
    let p_minus = roots[simple].0.clone();
    // p⁻ is a simple root, so DP(p⁻) is the product of the remaining factors
    let mut dp = Float::with_val(WORK_PREC, 1);
    for (i, (r, m)) in roots.iter().enumerate() {
        if i != simple {
            dp *= Float::with_val(WORK_PREC, &p_minus - r).pow(*m);
        }
    }
    if !(dp.to_f64().abs() >= SINGULAR_TOLERANCE) {
        return Err(Error::Singular(format!("|DP(p-)| = {:e} at lambda = {lambda}", dp.to_f64().abs())));
    }
    // the p⁺ orbit sits just before the p⁻ block
    let plus_orbit: Vec<Float> = roots[simple - 3..simple].iter().map(|(r, _)| r.clone()).collect();
    let minus_orbit: Vec<Float> = roots[simple..].iter().map(|(r, _)| r.clone()).collect();
    let d3_plus = hp_orbit_derivative(&plus_orbit);
    let d6_minus = hp_orbit_derivative(&minus_orbit);
    // the 2-cycle of g visits both components, so Df⁶(p⁻) < 0 near −2; its
    // modulus is what makes ω(−2) = 0
    let ratio = Float::with_val(WORK_PREC, d3_plus.square_ref()) / d6_minus.abs();
    let omega = (ratio - 1u32) * 2u32 / (Float::with_val(WORK_PREC, p_minus.square_ref()) * &dp);
    let p = expand_roots(&roots, WORK_PREC);
    let mut hi = vec![0.0; p.len() + 3];
    let mut lo = vec![0.0; p.len() + 3];
    hi[0] = lambda;
    hi[2] = 1.0;
    for (k, a) in p.iter().enumerate() {
        let v = Dd::from_float(&Float::with_val(WORK_PREC, a * &omega));
        hi[k + 3] = v.hi;
        lo[k + 3] = v.lo;
    }
    Ok(Deformation {
        lambda,
        omega: omega.to_f64(),
        beta: roots[0].0.to_f64(),
        factor_roots: roots.iter().map(|(r, m)| (r.to_f64(), *m)).collect(),
        dp_at_p_minus: dp.to_f64(),
        map: QuadraticMap::deformed_split(lambda, &hi, &lo),
        data,
    })
}

/// The deformed map alone.
pub fn build_deformation(lambda: f64) -> Result<QuadraticMap> {
    Ok(deformation(lambda)?.map)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationReport {
    pub lambda: f64,
    pub omega: f64,
    /// |f̂ − f| at ±β and on the three orbits, relative to the size of the terms.
    pub interpolation_residuals: Vec<(String, f64)>,
    /// |Df̂ − Df| on the orbits of p, p⁺ and f^j(p⁻), plus the prescribed value at p⁻.
    pub derivative_residuals: Vec<(String, f64)>,
    pub multiplier_identity_residual: f64,
    /// χ(p) − χ(p⁺) for the deformed map.
    pub lyapunov_gap: f64,
    /// |χ(p⁻) − χ(p⁺)| for the deformed map.
    pub equality_residual: f64,
}

impl DeformationReport {
    pub fn max_residual(&self) -> f64 {
        self.interpolation_residuals
            .iter()
            .chain(&self.derivative_residuals)
            .map(|(_, v)| *v)
            .fold(self.multiplier_identity_residual, f64::max)
    }
}

fn term_scale(coef: &[Complex64], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, a| acc * x.abs() + a.norm()).max(1.0)
}

fn deriv_scale(coef: &[Complex64], x: f64) -> f64 {
    coef.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, a)| acc * x.abs() + i as f64 * a.norm()).max(1.0)
}

/// Residuals of the interpolation and multiplier identities.
pub fn verify_interpolation_identities(map: &QuadraticMap) -> Result<DeformationReport> {
    if map.is_standard() {
        return Err(Error::InvalidArgument("expected a deformed map".into()));
    }
    let lambda = map.c().re;
    let d = deformation(lambda)?;
    let coef = &map.coefficients;
    let f = |x: f64| x * x + lambda;
    let mut interp = Vec::new();
    let mut deriv = Vec::new();
    let orbits: [(&str, Vec<f64>); 3] = [
        ("p", d.data.orbit_p().to_vec()),
        ("p_plus", d.data.orbit_p_plus().to_vec()),
        ("p_minus", d.data.orbit_p_minus().to_vec()),
    ];
    for (name, x) in [("beta", d.beta), ("neg_beta", -d.beta)] {
        interp.push((name.to_string(), (map.eval_real(x) - f(x)).abs() / term_scale(coef, x)));
    }
    for (name, orbit) in &orbits {
        for (i, &x) in orbit.iter().enumerate() {
            let label = format!("{name}_{i}");
            interp.push((label.clone(), (map.eval_real(x) - f(x)).abs() / term_scale(coef, x)));
            if *name == "p_minus" && i == 0 {
                continue;
            }
            deriv.push((label, (map.deriv_real(x) - 2.0 * x).abs() / deriv_scale(coef, x)));
        }
    }
    let pm = d.data.orbit_p_minus();
    let d3_plus = orbit_derivative(&d.data.orbit_p_plus());
    let d6_minus = orbit_derivative(&pm);
    let prescribed = 2.0 * pm[0] * d3_plus * d3_plus / d6_minus.abs();
    deriv.push(("p_minus_0".to_string(), (map.deriv_real(pm[0]) - prescribed).abs() / deriv_scale(coef, pm[0])));

    let hat_d = |orbit: &[f64]| orbit.iter().map(|&x| map.deriv_real(x)).product::<f64>();
    let hat6_minus = hat_d(&pm);
    let target = d3_plus * d3_plus;
    let multiplier_identity_residual = (hat6_minus.abs() - target).abs() / target;
    let chi_p = hat_d(&d.data.orbit_p()).abs().ln() / 3.0;
    let chi_plus = hat_d(&d.data.orbit_p_plus()).abs().ln() / 3.0;
    let chi_minus = hat6_minus.abs().ln() / 6.0;
    Ok(DeformationReport {
        lambda,
        omega: d.omega,
        interpolation_residuals: interp,
        derivative_residuals: deriv,
        multiplier_identity_residual,
        lyapunov_gap: chi_p - chi_plus,
        equality_residual: (chi_minus - chi_plus).abs(),
    })
}
