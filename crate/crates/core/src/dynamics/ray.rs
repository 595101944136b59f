use super::{Angle, QuadraticMap};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Tail diameter below which the ray counts as landed.
pub const LANDING_TOLERANCE: f64 = 1e-8;
const TAIL: usize = 16;
const SUBSTEPS: f64 = 8.0;
// Newton targets sit at potential 2^n v in [FAR, 2 FAR).
const FAR: f64 = 20.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayPolyline {
    pub angle: Angle,
    pub vertices: Vec<Complex64>,
    pub potential_levels: Vec<f64>,
    pub landing_point: Option<Complex64>,
    pub landing_certified: bool,
    pub diagnostic: Option<String>,
}

impl RayPolyline {
    pub fn tail_diameter(&self) -> Option<f64> {
        if self.vertices.len() < TAIL {
            return None;
        }
        let tail = &self.vertices[self.vertices.len() - TAIL..];
        let mut d: f64 = 0.0;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        Some(d)
    }
}

/// Solve φ(z) = exp(v + 2πi t) via f^n(z) = exp(2^n v + 2πi 2^n t).
fn correct(map: &QuadraticMap, start: Complex64, v: f64, angle: Angle) -> Option<Complex64> {
    let n = if v >= FAR { 0 } else { (FAR / v).log2().ceil() as usize };
    let a = angle.double_n(n).to_f64();
    let radius = v * 2f64.powi(n as i32);
    let target = Complex64::from_polar(radius.exp(), TAU * a);
    let mut z = start;
    for _ in 0..60 {
        let (w, d) = map.iterate_with_deriv(z, n);
        let step = (w - target) / d;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-15 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    let (w, _) = map.iterate_with_deriv(z, n);
    ((w - target).norm() <= 1e-10 * target.norm()).then_some(z)
}

/// Traces the external ray at a rational angle from potential 2 down to `v_min`
/// with eight potential levels per halving.
pub fn trace_external_ray(map: &QuadraticMap, angle: Angle, v_min: f64, max_steps: usize) -> Result<RayPolyline> {
    if !map.is_standard() {
        return Err(Error::InvalidArgument("ray tracing is implemented for z²+c only".into()));
    }
    if !(v_min > 0.0) || v_min > 2.0 {
        return Err(Error::InvalidArgument(format!("v_min {v_min} must lie in (0, 2]")));
    }
    let mut levels = Vec::new();
    let mut k = 0;
    loop {
        let v = 2.0 * 2f64.powf(-(k as f64) / SUBSTEPS);
        if v <= v_min {
            break;
        }
        levels.push(v);
        k += 1;
    }
    if levels.last().map_or(true, |&l| l > v_min) {
        levels.push(v_min);
    }
    levels.truncate(max_steps.max(1));

    let mut vertices = Vec::with_capacity(levels.len());
    let mut potentials = Vec::with_capacity(levels.len());
    let mut diagnostic = None;
    let mut z = Complex64::from_polar(levels[0].exp(), TAU * angle.to_f64());
    for &v in &levels {
        match correct(map, z, v, angle) {
            Some(w) => {
                z = w;
                vertices.push(w);
                potentials.push(v);
            }
            None => {
                diagnostic = Some(format!("Newton failed at potential {v:e}"));
                break;
            }
        }
    }
    let mut ray = RayPolyline {
        angle,
        vertices,
        potential_levels: potentials,
        landing_point: None,
        landing_certified: false,
        diagnostic,
    };
    if ray.diagnostic.is_none() {
        if let Some(d) = ray.tail_diameter() {
            if d < LANDING_TOLERANCE {
                ray.landing_certified = true;
                ray.landing_point = ray.vertices.last().copied();
            }
        }
    }
    Ok(ray)
}
