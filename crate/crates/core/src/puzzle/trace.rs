use crate::dynamics::{fixed_points, QuadraticMap};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTrace {
    pub left: f64,
    pub right: f64,
}

impl RealTrace {
    pub fn new(a: f64, b: f64) -> Self {
        RealTrace { left: a.min(b), right: a.max(b) }
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left < x && x < self.right
    }

    /// Distance from x to the nearer endpoint (negative outside).
    pub fn depth_of(&self, x: f64) -> f64 {
        (x - self.left).min(self.right - x)
    }

    pub fn contains_trace(&self, other: &RealTrace) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn disjoint(&self, other: &RealTrace) -> bool {
        self.right <= other.left || other.right <= self.left
    }

    pub fn negate(&self) -> Self {
        RealTrace { left: -self.right, right: -self.left }
    }
}

/// Real trace (α, −α) of the central depth-one piece.
pub fn central_trace(c: f64) -> Result<RealTrace> {
    if !(-2.0..=-0.75).contains(&c) {
        return Err(Error::Domain(format!("c = {c} outside [-2, -3/4]")));
    }
    let alpha = fixed_points(&QuadraticMap::real(c))?.alpha.re;
    Ok(RealTrace { left: alpha, right: -alpha })
}
