use crate::config::Margins;
use crate::dynamics::QuadraticMap;
use crate::puzzle::{critical_orbit, kn_membership, RealTrace};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const MAX_TIME_CAP: usize = 40;
/// Endpoints closer than this to c or to the boundary of V make a pullback ambiguous.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-12;
/// Enumeration stops (and the inventory is marked incomplete) past this many live nodes.
pub const NODE_BUDGET: usize = 1 << 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    FirstReturn,
    FirstLanding,
}

/// A monotone branch W with f^m: W → V a diffeomorphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    /// Signs of the inverse branches x ↦ ±√(x − c), the one applied to V first.
    pub word: String,
    pub return_time: usize,
    pub trace: RealTrace,
    /// Largest k with W inside the central piece of depth n + 3k + 2; 0 for landing branches.
    pub level: usize,
    /// Natural-log bounds for |Df^m| on W, widened by log Δ₃.
    pub log_deriv_min: f64,
    pub log_deriv_max: f64,
    /// log|Df^m| at the midpoint of W, unwidened.
    pub log_deriv_mid: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub ambiguous: bool,
}

impl Branch {
    pub fn diameter(&self) -> f64 {
        self.trace.width()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchInventory {
    pub kind: BranchKind,
    pub c: f64,
    pub n: usize,
    #[serde(rename = "V_trace")]
    pub v_trace: RealTrace,
    pub branches: Vec<Branch>,
    pub time_cap: usize,
    pub complete_up_to: usize,
    pub distortion_margin: f64,
    /// Real traces of the central pieces of depth n + 3k + 2, k = 0, 1, ….
    pub level_pieces: Vec<RealTrace>,
}

impl BranchInventory {
    pub fn min_return_time(&self) -> Option<usize> {
        self.branches.iter().map(|b| b.return_time).min()
    }

    pub fn count_at(&self, m: usize) -> usize {
        self.branches.iter().filter(|b| b.return_time == m).count()
    }
}

/// The depth-d puzzle piece containing `x`, given the forward orbit
/// `orbit[j] = f^j(x)` for j = 0..=d. Depth-0 pieces are (−β, α) and (α, β).
pub(crate) fn piece_along(c: f64, orbit: &[f64], depth: usize) -> RealTrace {
    let disc = (1.0 - 4.0 * c).sqrt();
    let (alpha, beta) = ((1.0 - disc) / 2.0, (1.0 + disc) / 2.0);
    let mut j = if orbit[depth] < alpha { RealTrace::new(-beta, alpha) } else { RealTrace::new(alpha, beta) };
    for i in (0..depth).rev() {
        let x = orbit[i];
        let r = (j.right - c).max(0.0).sqrt();
        j = if j.left <= c {
            RealTrace::new(-r, r)
        } else {
            let l = (j.left - c).sqrt();
            if x >= 0.0 {
                RealTrace::new(l, r)
            } else {
                RealTrace::new(-r, -l)
            }
        };
    }
    j
}

/// Real trace of the central piece P_d(0), pulled back along the critical orbit.
pub fn central_piece(c: f64, depth: usize) -> RealTrace {
    let mut orbit = vec![0.0];
    orbit.extend(critical_orbit(c, depth.saturating_sub(1)));
    orbit.truncate(depth + 1);
    piece_along(c, &orbit, depth)
}

#[derive(Clone, Debug)]
struct Node {
    lo: f64,
    hi: f64,
    // log|Df^m| at lo and hi
    dlo: f64,
    dhi: f64,
    word: String,
}

enum Pull {
    None,
    Two(Node, Node),
    Ambiguous,
}

fn pull(node: &Node, c: f64) -> Pull {
    if node.hi <= c - AMBIGUITY_TOLERANCE {
        return Pull::None;
    }
    if node.lo <= c + AMBIGUITY_TOLERANCE {
        return Pull::Ambiguous;
    }
    let (a, b) = ((node.lo - c).sqrt(), (node.hi - c).sqrt());
    let (la, lb) = ((2.0 * a).ln(), (2.0 * b).ln());
    let plus = Node { lo: a, hi: b, dlo: la + node.dlo, dhi: lb + node.dhi, word: format!("{}+", node.word) };
    let minus = Node { lo: -b, hi: -a, dlo: lb + node.dhi, dhi: la + node.dlo, word: format!("{}-", node.word) };
    Pull::Two(plus, minus)
}

fn log_deriv_forward(c: f64, x: f64, m: usize) -> f64 {
    let (mut w, mut acc) = (x, 0.0);
    for _ in 0..m {
        acc += (2.0 * w).abs().ln();
        w = w * w + c;
    }
    acc
}

struct Builder {
    c: f64,
    n: usize,
    v: RealTrace,
    log_margin: f64,
    level_pieces: Vec<RealTrace>,
}

impl Builder {
    fn branch(&self, node: &Node, m: usize, kind: BranchKind, ambiguous: bool) -> Branch {
        let trace = RealTrace::new(node.lo, node.hi);
        let mid = log_deriv_forward(self.c, trace.mid(), m);
        let lo = node.dlo.min(node.dhi).min(mid);
        let hi = node.dlo.max(node.dhi).max(mid);
        let level = match kind {
            BranchKind::FirstLanding => 0,
            BranchKind::FirstReturn => self.level_pieces.iter().take_while(|p| p.contains_trace(&trace)).count().saturating_sub(1),
        };
        Branch {
            word: node.word.clone(),
            return_time: m,
            trace,
            level,
            log_deriv_min: lo - self.log_margin,
            log_deriv_max: hi + self.log_margin,
            log_deriv_mid: mid,
            ambiguous,
        }
    }

    fn near_v_boundary(&self, lo: f64, hi: f64) -> bool {
        [lo, hi].iter().any(|x| (x - self.v.left).abs() < AMBIGUITY_TOLERANCE || (x - self.v.right).abs() < AMBIGUITY_TOLERANCE)
    }

    fn inside_v(&self, lo: f64, hi: f64) -> bool {
        self.v.left <= lo && hi <= self.v.right
    }

    fn outside_v(&self, lo: f64, hi: f64) -> bool {
        hi <= self.v.left || self.v.right <= lo
    }

    /// Breadth-first pullback of V through landing nodes, collecting both kinds.
    fn run(&self, kind: BranchKind, time_cap: usize) -> (Vec<Branch>, usize) {
        let mut out = Vec::new();
        let mut complete = time_cap;
        let root = Node { lo: self.v.left, hi: self.v.right, dlo: 0.0, dhi: 0.0, word: String::new() };
        let mut frontier = vec![root];
        for m in 1..=time_cap {
            let mut next = Vec::with_capacity(2 * frontier.len());
            let mut broken = false;
            for node in &frontier {
                match pull(node, self.c) {
                    Pull::None => {}
                    Pull::Ambiguous => {
                        broken = true;
                        let n = Node { word: format!("{}?", node.word), ..node.clone() };
                        out.push(self.branch(&n, m, kind, true));
                    }
                    Pull::Two(a, b) => {
                        for k in [a, b] {
                            if self.near_v_boundary(k.lo, k.hi) {
                                broken = true;
                                out.push(self.branch(&k, m, kind, true));
                            } else if self.outside_v(k.lo, k.hi) {
                                if kind == BranchKind::FirstLanding {
                                    out.push(self.branch(&k, m, kind, false));
                                }
                                next.push(k);
                            } else if self.inside_v(k.lo, k.hi) {
                                if kind == BranchKind::FirstReturn {
                                    out.push(self.branch(&k, m, kind, false));
                                }
                            } else {
                                broken = true;
                                out.push(self.branch(&k, m, kind, true));
                            }
                        }
                    }
                }
            }
            if broken {
                complete = complete.min(m - 1);
            }
            if next.len() > NODE_BUDGET && m < time_cap {
                complete = complete.min(m);
                break;
            }
            frontier = next;
        }
        (out, complete)
    }
}

fn build(map: &QuadraticMap, n: usize, time_cap: usize, kind: BranchKind, margins: &Margins) -> Result<BranchInventory> {
    margins.validate()?;
    if !map.is_standard() || map.c().im != 0.0 {
        return Err(Error::InvalidArgument("branch enumeration needs a real map z^2 + c".into()));
    }
    if time_cap > MAX_TIME_CAP {
        return Err(Error::InvalidArgument(format!("time_cap = {time_cap} exceeds {MAX_TIME_CAP}")));
    }
    let c = map.c().re;
    let k_check = (time_cap.saturating_sub(n) / 3).max(1);
    let report = kn_membership(c, n, k_check);
    if !report.pass {
        return Err(Error::Domain(format!("c = {c} fails the K_{n} membership check to depth {k_check}")));
    }
    let depth_needed = time_cap.max(n) + 3;
    let mut orbit = vec![0.0];
    orbit.extend(critical_orbit(c, depth_needed));
    let v = piece_along(c, &orbit, n + 1);
    let level_pieces = (0..).map(|k| n + 3 * k + 2).take_while(|&d| d <= depth_needed).map(|d| piece_along(c, &orbit, d)).collect();
    let b = Builder { c, n, v, log_margin: margins.d3.ln(), level_pieces };
    let (mut branches, complete_up_to) = b.run(kind, time_cap);
    branches.sort_by(|x, y| x.return_time.cmp(&y.return_time).then(x.trace.left.total_cmp(&y.trace.left)));
    Ok(BranchInventory {
        kind,
        c,
        n: b.n,
        v_trace: v,
        branches,
        time_cap,
        complete_up_to,
        distortion_margin: margins.d3,
        level_pieces: b.level_pieces,
    })
}

/// Components of the first return domain to V = P_{n+1}(0) with return time ≤ `time_cap`.
pub fn enumerate_return_branches(map: &QuadraticMap, n: usize, time_cap: usize) -> Result<BranchInventory> {
    enumerate_return_branches_with(map, n, time_cap, &Margins::default())
}

pub fn enumerate_return_branches_with(map: &QuadraticMap, n: usize, time_cap: usize, margins: &Margins) -> Result<BranchInventory> {
    build(map, n, time_cap, BranchKind::FirstReturn, margins)
}

/// Components of the first landing domain to V (points outside V) with landing time ≤ `time_cap`.
pub fn enumerate_landing_branches(map: &QuadraticMap, n: usize, time_cap: usize) -> Result<BranchInventory> {
    enumerate_landing_branches_with(map, n, time_cap, &Margins::default())
}

pub fn enumerate_landing_branches_with(map: &QuadraticMap, n: usize, time_cap: usize, margins: &Margins) -> Result<BranchInventory> {
    build(map, n, time_cap, BranchKind::FirstLanding, margins)
}

/// Least-squares fit of ln(max diameter at time m) = intercept − rate·m.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn diameter_decay(inv: &BranchInventory) -> Result<DecayFit> {
    let mut points: Vec<(usize, f64)> = Vec::new();
    for b in inv.branches.iter().filter(|b| !b.ambiguous) {
        match points.iter_mut().find(|(m, _)| *m == b.return_time) {
            Some(e) => e.1 = e.1.max(b.diameter()),
            None => points.push((b.return_time, b.diameter())),
        }
    }
    points.sort_by_key(|e| e.0);
    if points.len() < 2 {
        return Err(Error::InvalidArgument("need branches at two return times at least".into()));
    }
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(m, d)| (a + m as f64, b + d.ln()));
    let (mx, my) = (sx / k, sy / k);
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(m, d)| (a + (m as f64 - mx) * (d.ln() - my), b + (m as f64 - mx).powi(2)));
    let slope = sxy / sxx;
    Ok(DecayFit { rate: -slope, intercept: my - slope * mx, points })
}
