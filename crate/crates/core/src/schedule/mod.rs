//! Sign-driven hat itineraries over the block partition, their binary
//! projections, temperature windows and the schedule of signs built from a
//! sequence of temperatures.
//!
//! Hat sequences are never materialized: block J_1 alone has about 2^{8q}
//! entries. Symbols are answered per query with exact big-integer endpoints.

use crate::series::{
    block_sums, lambda_of_s, partition_endpoints, DecayRate, LogEnclosure, PartitionScheme, MAX_EXACT_BITS,
};
use crate::{Error, Result};
use rug::Integer;
use serde::{Deserialize, Serialize, Serializer};
use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// Parses a word like "+-+-"; blanks and commas are ignored.
pub fn parse_signs(word: &str) -> Result<Vec<Sign>> {
    word.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(Error::InvalidArgument(format!("sign '{c}' is not + or -"))),
        })
        .collect()
}

pub fn signs_to_string(signs: &[Sign]) -> String {
    signs.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HatSymbol {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1+")]
    Plus,
    #[serde(rename = "1-")]
    Minus,
}

impl HatSymbol {
    fn one(sign: Sign) -> HatSymbol {
        match sign {
            Sign::Plus => HatSymbol::Plus,
            Sign::Minus => HatSymbol::Minus,
        }
    }
}

impl fmt::Display for HatSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HatSymbol::Zero => "0",
            HatSymbol::Plus => "1+",
            HatSymbol::Minus => "1-",
        })
    }
}

impl FromStr for HatSymbol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(HatSymbol::Zero),
            "1+" => Ok(HatSymbol::Plus),
            "1-" => Ok(HatSymbol::Minus),
            _ => Err(Error::InvalidArgument(format!("'{s}' is not a hat symbol"))),
        }
    }
}

fn integer_as_string<S: Serializer>(x: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// The standard scheme for an exponent, with q raised by one when needed so
/// that q + Ξ is even.
pub fn hat_scheme(exponent: f64) -> Result<PartitionScheme> {
    let s = PartitionScheme::standard(exponent)?;
    PartitionScheme::with_growth(exponent, s.growth + (s.growth + s.offset) % 2)
}

/// Block of the query index k = j + 1: I_s or J_s.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Run {
    s: u64,
    long: bool,
    /// First and one-past-last j of the run.
    start: Integer,
    end: Integer,
}

#[derive(Clone, Debug, Serialize)]
pub struct HatSequence {
    pub signs: Vec<Sign>,
    pub scheme: PartitionScheme,
    /// Largest index that may be queried.
    #[serde(serialize_with = "integer_as_string")]
    pub j_max: Integer,
    /// Largest block index reachable from j_max.
    pub top_block: u64,
}

/// Checks the scheme and j_max; symbols are produced on demand.
pub fn build_hat_sequence(sign_prefix: &[Sign], scheme: &PartitionScheme, j_max: &Integer) -> Result<HatSequence> {
    let q = scheme.growth;
    let xi = scheme.offset;
    if (q + xi) % 2 != 0 {
        return Err(Error::InvalidArgument(format!("q + Xi = {} must be even", q + xi)));
    }
    // a_1 = 2^q must lie beyond b_0 = 1 + q + Ξ
    if q < 64 && 1 + q + xi >= 1u64 << q {
        return Err(Error::InvalidArgument(format!("I_0 and I_1 overlap for q = {q}, Xi = {xi}")));
    }
    if *j_max < 0 {
        return Err(Error::InvalidArgument("j_max must be nonnegative".into()));
    }
    let k = Integer::from(j_max + 1u32);
    let floor_log = u64::from(k.significant_bits() - 1);
    let mut top = 0;
    while scheme.block_exponent(top + 1)? <= floor_log {
        top += 1;
    }
    if scheme.block_exponent(top + 1)? > MAX_EXACT_BITS {
        return Err(Error::InvalidArgument(format!(
            "j_max reaches block {top}, whose end 2^{} is beyond exact integers",
            scheme.block_exponent(top + 1)?
        )));
    }
    // a_s is even for s ≥ 1, so b_s = a_s + |I_s| and a_{s+1} are even as well
    for s in 1..=top {
        if scheme.short_len(s) % 2 != 0 {
            return Err(Error::InvalidArgument(format!("|I_{s}| is odd")));
        }
    }
    Ok(HatSequence { signs: sign_prefix.to_vec(), scheme: *scheme, j_max: j_max.clone(), top_block: top })
}

impl HatSequence {
    /// The sign attached to J_s; J_0 carries 1⁺.
    pub fn block_sign(&self, s: u64) -> Result<Sign> {
        if s == 0 {
            return Ok(Sign::Plus);
        }
        let m = s.div_ceil(4);
        self.signs.get(m as usize - 1).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("sign prefix of length {} too short: block J_{s} needs m = {m}", self.signs.len()))
        })
    }

    fn check_index(&self, j: &Integer) -> Result<()> {
        if *j < 0 || *j > self.j_max {
            return Err(Error::InvalidArgument(format!("j = {j} outside [0, {}]", self.j_max)));
        }
        Ok(())
    }

    fn run_at(&self, j: &Integer) -> Result<Run> {
        self.check_index(j)?;
        let k = Integer::from(j + 1u32);
        let floor_log = u64::from(k.significant_bits() - 1);
        let mut s = 0;
        while self.scheme.block_exponent(s + 1)? <= floor_log {
            s += 1;
        }
        let e = partition_endpoints(&self.scheme, s)?;
        let next = Integer::from(&e.b + &e.long_len);
        if k < e.b {
            Ok(Run { s, long: false, start: e.a - 1u32, end: e.b - 1u32 })
        } else {
            Ok(Run { s, long: true, start: e.b - 1u32, end: next - 1u32 })
        }
    }

    fn run_symbol(&self, run: &Run) -> Result<HatSymbol> {
        if !run.long {
            return Ok(HatSymbol::Zero);
        }
        Ok(HatSymbol::one(self.block_sign(run.s)?))
    }

    pub fn symbol_at(&self, j: &Integer) -> Result<HatSymbol> {
        self.run_symbol(&self.run_at(j)?)
    }

    /// Symbols j = start, …, start + len − 1, one block lookup per run.
    pub fn window(&self, start: &Integer, len: usize) -> Result<Vec<HatSymbol>> {
        let mut out = Vec::with_capacity(len);
        let mut j = start.clone();
        while out.len() < len {
            let run = self.run_at(&j)?;
            let sym = self.run_symbol(&run)?;
            let left = Integer::from(&run.end - &j);
            let take = left.to_usize().map_or(len - out.len(), |n| n.min(len - out.len()));
            out.extend(std::iter::repeat(sym).take(take));
            j += take as u64;
        }
        Ok(out)
    }

    /// The three structural properties of the hat sequence on a window, with
    /// the parity of every 1⁻ run touching it read from exact endpoints.
    pub fn check_window(&self, start: &Integer, len: usize) -> Result<WindowCheck> {
        let syms = self.window(start, len)?;
        let adjacency = syms.windows(2).all(|w| {
            !matches!((w[0], w[1]), (HatSymbol::Plus, HatSymbol::Minus) | (HatSymbol::Minus, HatSymbol::Plus))
        });
        let q = self.scheme.growth;
        let leading_zeros = syms
            .iter()
            .enumerate()
            .filter(|(i, _)| Integer::from(start + *i as u64) < q)
            .all(|(_, s)| *s == HatSymbol::Zero);
        let mut even_minus_runs = true;
        let mut minus_runs = 0;
        let mut j = start.clone();
        let stop = Integer::from(start + len as u64);
        while j < stop {
            let run = self.run_at(&j)?;
            if self.run_symbol(&run)? == HatSymbol::Minus {
                minus_runs += 1;
                // neighbours of a J_s run are I_s and I_{s+1}, both 0
                let l = Integer::from(&run.end - &run.start);
                even_minus_runs &= l.is_even();
            }
            j = run.end;
        }
        Ok(WindowCheck { adjacency, even_minus_runs, leading_zeros, minus_runs })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowCheck {
    /// No 1⁺1⁻ and no 1⁻1⁺.
    pub adjacency: bool,
    pub even_minus_runs: bool,
    /// Every queried j < q carries 0.
    pub leading_zeros: bool,
    pub minus_runs: usize,
}

impl WindowCheck {
    pub fn holds(&self) -> bool {
        self.adjacency && self.even_minus_runs && self.leading_zeros
    }
}

/// Binary symbol of x̂_j: 1⁻ becomes the parity of j.
pub fn project_symbol(sym: HatSymbol, j_is_odd: bool) -> u8 {
    match sym {
        HatSymbol::Zero => 0,
        HatSymbol::Plus => 1,
        HatSymbol::Minus => j_is_odd as u8,
    }
}

pub fn project_itinerary(hat: &HatSequence, start: &Integer, len: usize) -> Result<Vec<u8>> {
    let odd = start.is_odd();
    Ok(hat
        .window(start, len)?
        .into_iter()
        .enumerate()
        .map(|(i, s)| project_symbol(s, odd ^ (i % 2 == 1)))
        .collect())
}

/// Whether a binary word follows a hat word of the same length.
pub fn check_compatibility(binary: &[u8], hat: &[HatSymbol]) -> bool {
    if binary.len() != hat.len() {
        return false;
    }
    let pointwise = binary.iter().zip(hat).all(|(x, h)| match h {
        HatSymbol::Zero => *x == 0,
        HatSymbol::Plus => *x == 1,
        HatSymbol::Minus => *x <= 1,
    });
    pointwise
        && (1..hat.len()).all(|j| !(hat[j - 1] == HatSymbol::Minus && hat[j] == HatSymbol::Minus) || binary[j - 1] != binary[j])
}

/// A = 4 log 2 / log θ.
pub fn block_temperature(theta: f64) -> Result<f64> {
    if !(theta > 1.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!("theta = {theta} must exceed 1")));
    }
    Ok(4.0 * LN_2 / theta.ln())
}

/// τ(t) = (log θ / log 2) t.
pub fn tau_of(theta: f64, t: f64) -> Result<f64> {
    Ok(4.0 * t / block_temperature(theta)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TemperatureWindow {
    pub m: u64,
    pub m_hat: u64,
    #[serde(rename = "A")]
    pub a: f64,
    pub t_low: f64,
    pub t_high: f64,
    pub theta: f64,
    /// ς(m) when the signs are constant on [m, m̂].
    pub predicted_sign: Option<Sign>,
}

impl TemperatureWindow {
    pub fn tau(&self, t: f64) -> f64 {
        4.0 * t / self.a
    }

    /// Fills predicted_sign from a sign prefix; None when ς varies on [m, m̂].
    pub fn with_signs(mut self, signs: &[Sign]) -> Result<Self> {
        let get = |m: u64| {
            signs.get(m as usize - 1).copied().ok_or_else(|| {
                Error::InvalidArgument(format!("sign prefix of length {} too short: needs m = {m}", signs.len()))
            })
        };
        let first = get(self.m)?;
        let mut constant = true;
        for m in self.m..=self.m_hat {
            constant &= get(m)? == first;
        }
        self.predicted_sign = constant.then_some(first);
        Ok(self)
    }
}

pub fn temperature_window(theta: f64, m: u64, m_hat: u64) -> Result<TemperatureWindow> {
    let a = block_temperature(theta)?;
    if m == 0 || m_hat < m {
        return Err(Error::InvalidArgument(format!("need 1 <= m <= m_hat, got m = {m}, m_hat = {m_hat}")));
    }
    Ok(TemperatureWindow { m, m_hat, a, t_low: a * m as f64, t_high: a * m_hat as f64, theta, predicted_sign: None })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureBand {
    pub t: f64,
    pub tau: f64,
    pub chi_crit: f64,
    pub p_minus: f64,
    pub p_plus: f64,
    /// log2 λ(τ) and log2 λ(τ − 1); None when λ is below every representable scale.
    pub log2_lambda_tau: Option<f64>,
    pub log2_lambda_tau_minus_one: Option<f64>,
    /// log2 (λ(τ − 1) − λ(τ)), so that P⁺ − P⁻ = (log 2 / 3) 2^{gap}.
    pub log2_gap: f64,
    /// λ underflowed to 0 in f64 at one of the endpoints.
    pub asymptote: bool,
    pub negative: bool,
    pub precision: u32,
}

fn log2_lambda(scheme: &PartitionScheme, s: f64, prec: u32) -> Result<Option<f64>> {
    match lambda_of_s(scheme, s, prec) {
        Ok(l) => Ok(Some(l.log2_mid())),
        // 2^{q(s+1)³} past the exponent range: λ is 0 at any precision
        Err(Error::Overflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pow2_or_zero(l: Option<f64>) -> f64 {
    l.map_or(0.0, f64::exp2)
}

/// P⁻ = −tχ/2 + (log 2/3) λ(τ) and P⁺ = −tχ/2 + (log 2/3) λ(τ − 1).
pub fn pressure_band(t: f64, chi_crit: f64, theta: f64, scheme: &PartitionScheme, prec: u32) -> Result<PressureBand> {
    let tau = tau_of(theta, t)?;
    if !(tau >= 2.0) || !chi_crit.is_finite() {
        return Err(Error::InvalidArgument(format!("tau = {tau} must be at least 2, chi = {chi_crit}")));
    }
    let l0 = log2_lambda(scheme, tau, prec)?;
    let l1 = log2_lambda(scheme, tau - 1.0, prec)?;
    let base = -t * chi_crit / 2.0;
    let p_minus = base + LN_2 / 3.0 * pow2_or_zero(l0);
    let p_plus = base + LN_2 / 3.0 * pow2_or_zero(l1);
    let log2_gap = match (l1, l0) {
        (None, _) => f64::NEG_INFINITY,
        (Some(a), None) => a,
        (Some(a), Some(b)) => a + (-((b - a) * LN_2).exp_m1()).log2(),
    };
    let tiny = |l: Option<f64>| l.map_or(true, |v| v < -1074.0);
    Ok(PressureBand {
        t,
        tau,
        chi_crit,
        p_minus,
        p_plus,
        log2_lambda_tau: l0,
        log2_lambda_tau_minus_one: l1,
        log2_gap,
        asymptote: tiny(l0) || tiny(l1),
        negative: p_minus <= p_plus && p_plus < 0.0,
        precision: prec,
    })
}

/// Ceiling that treats values within a few ulps of an integer as that integer.
fn snapped_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    }
}

fn snapped_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

/// τ at or above this is the regime where block dominance is proved.
pub const CERTIFIED_TAU: f64 = 50.0;

#[derive(Clone, Debug, Serialize)]
pub struct BlockLabel {
    pub s: u64,
    pub sign: Sign,
    /// Ĵ⁻_s(τ, λ(τ − ½)); None when the block is past the exponent range.
    pub hat_j_minus: Option<LogEnclosure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockPrediction {
    pub t: f64,
    pub tau: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub m0: u64,
    pub sign: Sign,
    pub blocks: Vec<BlockLabel>,
    pub certified: bool,
}

/// The sign ς(m₀) of the block group carrying t ∈ (A(m₀ − 1), A m₀], after
/// checking that the blocks ⌈τ⌉ − 3, …, ⌈τ⌉ all carry it.
pub fn dominant_block_prediction(
    t: f64,
    theta: f64,
    scheme: &PartitionScheme,
    sign_prefix: &[Sign],
    prec: u32,
) -> Result<BlockPrediction> {
    let a = block_temperature(theta)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t = {t} must be positive")));
    }
    let tau = 4.0 * t / a;
    let top = snapped_ceil(tau);
    let m0 = snapped_ceil(top / 4.0).max(1.0) as u64;
    let hat = HatSequence { signs: sign_prefix.to_vec(), scheme: *scheme, j_max: Integer::new(), top_block: 0 };
    let sign = hat.block_sign(m0 * 4)?;
    let rate = if tau >= 0.5 {
        match lambda_of_s(scheme, tau - 0.5, prec) {
            Ok(l) => Some(DecayRate::from_log2(&l)),
            Err(Error::Overflow { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let mut blocks = Vec::new();
    for s in (top as i64 - 3).max(0) as u64..=top as u64 {
        let label = hat.block_sign(s)?;
        let hat_j_minus = rate.as_ref().and_then(|r| block_sums(scheme, s, tau, r, prec).ok()).map(|b| b.long_shifted_minus);
        blocks.push(BlockLabel { s, sign: label, hat_j_minus });
    }
    if let Some(b) = blocks.iter().find(|b| b.sign != sign) {
        return Err(Error::Ambiguous(format!(
            "block J_{} carries {} but m0 = {m0} carries {sign} at tau = {tau}",
            b.s, b.sign
        )));
    }
    Ok(BlockPrediction { t, tau, a, m0, sign, blocks, certified: tau >= CERTIFIED_TAU })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub betas: Vec<f64>,
    #[serde(rename = "A_sup")]
    pub a_sup: f64,
    #[serde(rename = "A_inf")]
    pub a_inf: f64,
    /// m(ℓ) = ⌊β_ℓ / A_sup⌋, ℓ = 1, 2, …
    pub m: Vec<u64>,
    /// ℓ (1-based) with β_{ℓ+1} < A_sup(β_ℓ/A_inf + 2).
    pub growth_violations: Vec<usize>,
    pub increasing: bool,
    /// β_1 ≥ A_sup.
    pub first_ok: bool,
    /// ς(1), …, ς(max m(ℓ)): + on [m(ℓ), m(ℓ+1) − 1] for even ℓ, − for odd ℓ,
    /// and + below m(1).
    pub signs: Vec<Sign>,
}

impl ScheduleReport {
    pub fn holds(&self) -> bool {
        self.growth_violations.is_empty() && self.increasing && self.first_ok
    }
}

pub fn schedule_from_temperatures(betas: &[f64], a_sup: f64, a_inf: f64) -> Result<ScheduleReport> {
    if !(a_inf > 0.0 && a_sup >= a_inf && a_sup.is_finite()) {
        return Err(Error::InvalidArgument(format!("need A_sup >= A_inf > 0, got {a_sup}, {a_inf}")));
    }
    if betas.is_empty() || betas.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
        return Err(Error::InvalidArgument("temperatures must be finite, nonnegative and nonempty".into()));
    }
    let m: Vec<u64> = betas.iter().map(|b| snapped_floor(b / a_sup) as u64).collect();
    let growth_violations = (0..betas.len() - 1)
        .filter(|&i| betas[i + 1] < a_sup * (betas[i] / a_inf + 2.0))
        .map(|i| i + 1)
        .collect();
    let increasing = betas.windows(2).all(|w| w[0] < w[1]);
    let top = *m.iter().max().expect("nonempty");
    let mut signs = vec![Sign::Plus; top as usize];
    for (i, &lo) in m.iter().enumerate() {
        let ell = i + 1;
        let sign = if ell % 2 == 0 { Sign::Plus } else { Sign::Minus };
        let hi = m.get(i + 1).map_or(lo, |&next| next.saturating_sub(1));
        for k in lo.max(1)..=hi {
            signs[k as usize - 1] = sign;
        }
    }
    Ok(ScheduleReport {
        betas: betas.to_vec(),
        a_sup,
        a_inf,
        m,
        growth_violations,
        increasing,
        first_ok: betas[0] >= a_sup,
        signs,
    })
}
