use super::itinerary::{critical_orbit, ordering_failure};
use super::{cantor_data, cantor_traces, kn_membership, RealTrace, MEMBERSHIP_TOLERANCE};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Grid points per refinement level.
pub const SCAN_POINTS: usize = 4096;
const FINAL_WIDTH: f64 = 1e-13;
const MAX_SYMBOLS: usize = 40;
// Left end of the real slice where the Cantor data is looked for.
const SEARCH_LO: f64 = -2.0;
const SEARCH_HI: f64 = -1.76;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterBracket {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub target_prefix: Vec<u8>,
}

#[derive(Clone, Copy)]
enum Level {
    /// f(c) > … > f^{len−1}(c), with f^{len−1}(c) > 0 when len = n.
    Ordering(usize),
    /// The first `k+1` symbols equal the target and are certified.
    Symbols(usize),
}

struct Searcher<'a> {
    n: usize,
    target: &'a [u8],
    y_is_negative: bool,
}

impl Searcher<'_> {
    fn satisfies(&self, c: f64, level: Level) -> bool {
        match level {
            Level::Ordering(len) => {
                let orbit = critical_orbit(c, len);
                ordering_prefix_ok(&orbit, len, self.n)
            }
            Level::Symbols(k) => {
                let orbit = critical_orbit(c, self.n + 3 * k);
                if ordering_failure(&orbit, self.n).is_some() {
                    return false;
                }
                let Ok((neg, pos)) = cantor_traces(c) else { return false };
                let (y, yt) = if self.y_is_negative { (neg, pos) } else { (pos, neg) };
                (0..=k).all(|j| {
                    let x = orbit[self.n + 3 * j];
                    let t: &RealTrace = if self.target[j] == 0 { &y } else { &yt };
                    t.contains(x) && t.depth_of(x) >= MEMBERSHIP_TOLERANCE
                })
            }
        }
    }

    /// Scans the bracket, keeps the longest run of passing grid points and
    /// pushes both run edges out to the transition by bisection.
    fn refine(&self, lo: f64, hi: f64, level: Level) -> Result<(f64, f64)> {
        let grid: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
            .collect();
        let pass: Vec<bool> = grid.par_iter().map(|&c| self.satisfies(c, level)).collect();
        let mut best: Option<(usize, usize)> = None;
        let mut i = 0;
        while i < pass.len() {
            if pass[i] {
                let start = i;
                while i + 1 < pass.len() && pass[i + 1] {
                    i += 1;
                }
                if best.map_or(true, |(a, b)| i - start > b - a) {
                    best = Some((start, i));
                }
            }
            i += 1;
        }
        let Some((a, b)) = best else {
            return Err(Error::Search(format!(
                "no grid point of [{lo:.17}, {hi:.17}] ({SCAN_POINTS} points) satisfies the next condition"
            )));
        };
        let left = if a == 0 { grid[0] } else { self.edge(grid[a - 1], grid[a], level) };
        let right = if b + 1 == grid.len() { grid[b] } else { self.edge(grid[b + 1], grid[b], level) };
        Ok((left, right))
    }

    /// Transition between a failing and a passing point; returns the passing side.
    fn edge(&self, mut fail: f64, mut pass: f64, level: Level) -> f64 {
        for _ in 0..80 {
            let mid = 0.5 * (fail + pass);
            if mid == fail || mid == pass {
                break;
            }
            if self.satisfies(mid, level) {
                pass = mid;
            } else {
                fail = mid;
            }
        }
        pass
    }
}

fn ordering_prefix_ok(orbit: &[f64], len: usize, n: usize) -> bool {
    for j in 1..len - 1 {
        if !(orbit[j] > orbit[j + 1]) {
            return false;
        }
    }
    len < n || orbit[len - 1] > 0.0
}

fn check_args(n: usize, prefix: &[u8]) -> Result<()> {
    if n < 6 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 6")));
    }
    if prefix.len() > MAX_SYMBOLS {
        return Err(Error::InvalidArgument(format!("prefix longer than {MAX_SYMBOLS}")));
    }
    if prefix.iter().any(|&s| s > 1) {
        return Err(Error::InvalidArgument("prefix symbols must be 0 or 1".into()));
    }
    Ok(())
}

/// Runs the ordering levels, then one level per symbol of `target`.
fn bracket_for(n: usize, target: &[u8]) -> Result<(ParameterBracket, bool)> {
    let mut probe = Searcher { n, target, y_is_negative: true };
    let (mut lo, mut hi) = (SEARCH_LO, SEARCH_HI);
    for len in 2..=n {
        (lo, hi) = probe.refine(lo, hi, Level::Ordering(len))?;
    }
    // Orientation is fixed once per ordering bracket.
    probe.y_is_negative = cantor_data(0.5 * (lo + hi), 2.0)?.y_is_negative;
    for k in 0..target.len() {
        (lo, hi) = probe.refine(lo, hi, Level::Symbols(k))?;
    }
    Ok((ParameterBracket { n, lo, hi, target_prefix: target.to_vec() }, probe.y_is_negative))
}

/// Parameter interval of K_n whose certified itinerary starts with `prefix`.
pub fn parameter_bracket(n: usize, prefix: &[u8]) -> Result<ParameterBracket> {
    check_args(n, prefix)?;
    bracket_for(n, prefix).map(|(b, _)| b)
}

/// A parameter in K_n with itinerary beginning with `target_prefix`. The
/// prefix is padded with zeros until the bracket is narrower than 1e-13.
pub fn find_parameter(n: usize, target_prefix: &[u8], depth: usize) -> Result<f64> {
    if depth != target_prefix.len() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} differs from the prefix length {}",
            target_prefix.len()
        )));
    }
    check_args(n, target_prefix)?;
    let mut target = target_prefix.to_vec();
    let (mut bracket, y_neg) = bracket_for(n, &target)?;
    while bracket.hi - bracket.lo >= FINAL_WIDTH && target.len() < MAX_SYMBOLS {
        target.push(0);
        let s = Searcher { n, target: &target, y_is_negative: y_neg };
        (bracket.lo, bracket.hi) = s.refine(bracket.lo, bracket.hi, Level::Symbols(target.len() - 1))?;
    }
    let c = 0.5 * (bracket.lo + bracket.hi);
    let report = kn_membership(c, n, depth);
    if !report.pass || report.symbols.get(..depth) != Some(target_prefix) {
        return Err(Error::Search(format!("c = {c} failed re-verification: {report:?}")));
    }
    Ok(c)
}
