use serde::{Deserialize, Serialize};

/// Distortion margins standing in for the non-constructive constants.
/// `d1` scales the postcritical bracket, `d2` enters the exponent xi,
/// `d3` widens branch derivative bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins { d1: 2.0, d2: 2.0, d3: 1.5 }
    }
}

impl Margins {
    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [("d1", self.d1), ("d2", self.d2), ("d3", self.d3)] {
            if !(v > 1.0) || !v.is_finite() {
                return Err(crate::Error::InvalidArgument(format!("margin {name} must exceed 1, got {v}")));
            }
        }
        Ok(())
    }
}

/// Default Peierls slack: a quarter of log 2.
pub fn default_upsilon() -> f64 {
    0.25 * std::f64::consts::LN_2
}

pub const DEFAULT_PRECISION: u32 = 256;
