use super::partition::log_sum_exp;
use crate::dynamics::QuadraticMap;
use crate::{Error, Complex64, Result};

pub const MAX_PREIMAGE_DEPTH: usize = 24;

/// Base point of the preimage tree: 0, unless the critical orbit comes back
/// to 0 within `depth` steps (then the tree would run through the critical
/// point), in which case β.
fn base_point(c: Complex64, depth: usize) -> Complex64 {
    let mut z = Complex64::new(0.0, 0.0);
    for _ in 0..depth {
        z = z * z + c;
        if z.norm() < 1e-9 {
            return (1.0 + (1.0 - 4.0 * c).sqrt()) / 2.0;
        }
    }
    Complex64::new(0.0, 0.0)
}

fn check(map: &QuadraticMap, t: f64, j_max: usize) -> Result<()> {
    if !map.is_standard() {
        return Err(Error::InvalidArgument("preimage trees are built for z^2 + c only".into()));
    }
    if j_max == 0 || j_max > MAX_PREIMAGE_DEPTH {
        return Err(Error::InvalidArgument(format!("j_max = {j_max} outside 1..={MAX_PREIMAGE_DEPTH}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("t = {t}")));
    }
    Ok(())
}

// ln|Df^j| accumulated from the root down
fn walk(c: Complex64, w: Complex64, acc: f64, left: usize, real: bool, out: &mut Vec<f64>) -> Result<()> {
    if left == 0 {
        out.push(acc);
        return Ok(());
    }
    if real && w.re < c.re {
        return Ok(());
    }
    let y = (w - c).sqrt();
    let d = (2.0 * y).norm();
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Critical);
    }
    let acc = acc + d.ln();
    walk(c, y, acc, left - 1, real, out)?;
    walk(c, -y, acc, left - 1, real, out)
}

fn tree_pressure(map: &QuadraticMap, t: f64, j_max: usize, real: bool) -> Result<f64> {
    check(map, t, j_max)?;
    let c = map.c();
    if real && c.im != 0.0 {
        return Err(Error::InvalidArgument("real slice needs a real parameter".into()));
    }
    let base = base_point(c, j_max);
    let mut logs = Vec::with_capacity(1 << j_max.min(MAX_PREIMAGE_DEPTH));
    walk(c, base, 0.0, j_max, real, &mut logs)?;
    let s = log_sum_exp(logs.iter().map(|&l| -t * l));
    Ok(s / j_max as f64)
}

/// (1/j) ln Σ_{f^j(y) = z₀} |Df^j(y)|^{−t} over the full binary preimage tree.
pub fn preimage_pressure(map: &QuadraticMap, t: f64, j_max: usize) -> Result<f64> {
    tree_pressure(map, t, j_max, false)
}

/// The same sum restricted to real preimages.
pub fn real_preimage_pressure(map: &QuadraticMap, t: f64, j_max: usize) -> Result<f64> {
    tree_pressure(map, t, j_max, true)
}
