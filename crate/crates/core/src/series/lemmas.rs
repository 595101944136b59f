use super::blocks::{raw_totals, Blocks, DecayRate};
use super::ival::{log2_r, Ival};
use super::scheme::{log2_lambda_iv, partition_endpoints, PartitionScheme};
use crate::{Error, Result};
use rug::float::Round;
use rug::{Float, Integer};
use serde::Serialize;

/// Block indices covered by the exact endpoint checks.
pub const ENDPOINT_CHECK_MAX_S: u64 = 10;

/// One inequality `small ≤ big`, both sides in log2, evaluated with the small
/// side rounded up and the big side rounded down.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub tau: Option<f64>,
    pub s: Option<f64>,
    pub block: Option<u64>,
    pub small_log2: f64,
    pub big_log2: f64,
    pub margin_log2: f64,
    pub pass: bool,
    /// The parameters satisfy the inequality's stated hypotheses.
    pub in_hypothesis: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub scheme: PartitionScheme,
    pub precision_bits: u32,
    pub checks: Vec<LemmaCheck>,
    /// Every check inside its hypotheses passed.
    pub all_pass: bool,
}

struct Recorder {
    checks: Vec<LemmaCheck>,
}

impl Recorder {
    fn push(&mut self, name: &str, tau: Option<f64>, s: Option<f64>, block: Option<u64>, small: &Float, big: &Float, hyp: bool) {
        let p = small.prec().max(big.prec());
        let margin = Float::with_val_round(p, big - small, Round::Down).0;
        let pass = !margin.is_nan() && margin >= 0;
        self.checks.push(LemmaCheck {
            name: name.to_string(),
            tau,
            s,
            block,
            small_log2: small.to_f64_round(Round::Up),
            big_log2: big.to_f64_round(Round::Down),
            margin_log2: margin.to_f64_round(Round::Down),
            pass,
            in_hypothesis: hyp,
        });
    }

    fn ival(&mut self, name: &str, tau: f64, s: Option<f64>, block: Option<u64>, small: &Ival, big: &Ival, hyp: bool) {
        self.push(name, Some(tau), s, block, &small.hi, &big.lo, hyp);
    }
}

fn ilog2(x: &Integer, prec: u32, r: Round) -> Float {
    log2_r(&Float::with_val_round(prec, x, r).0, prec, r)
}

fn endpoint_checks(rec: &mut Recorder, scheme: &PartitionScheme, prec: u32) -> Result<()> {
    let hyp = scheme.lemma_mode;
    for s in 0..=ENDPOINT_CHECK_MAX_S {
        let e = partition_endpoints(scheme, s)?;
        let next = partition_endpoints(scheme, s + 1)?.a;
        let sf = Some(s as f64);
        // b_s ≤ a_{s+1}/2
        let lhs = ilog2(&Integer::from(&e.b * 2u32), prec, Round::Up);
        rec.push("endpoint_gap", None, sf, Some(s), &lhs, &ilog2(&next, prec, Round::Down), hyp);
        // a_{s+1}/2 ≤ |J_s|
        let rhs = ilog2(&Integer::from(&e.long_len * 2u32), prec, Round::Down);
        rec.push("long_block_size", None, sf, Some(s), &ilog2(&next, prec, Round::Up), &rhs, hyp);
        if s >= 1 {
            // b_s / a_s ≤ 5/4
            let lhs = ilog2(&Integer::from(&e.b * 4u32), prec, Round::Up);
            let rhs = ilog2(&Integer::from(&e.a * 5u32), prec, Round::Down);
            rec.push("short_block_ratio", None, sf, Some(s), &lhs, &rhs, hyp);
        }
    }
    Ok(())
}

fn rate_at(scheme: &PartitionScheme, s: f64, prec: u32) -> Result<DecayRate> {
    Ok(DecayRate(log2_lambda_iv(scheme, s, prec)?.exp2()))
}

fn first_floor(rec: &mut Recorder, scheme: &PartitionScheme, tau: f64, prec: u32) -> Result<()> {
    let hyp = scheme.lemma_mode && tau >= 2.0;
    let s_max = tau.ceil() as u64 + 2;
    let upper_ctx = Blocks::new(scheme, tau, &rate_at(scheme, tau - 1.0, prec)?, prec)?;
    let plus = raw_totals(&upper_ctx, s_max)?.plus;
    // 2 + 2^{τξ}
    let bound = Ival::f64(prec, 1.0).lse(&upper_ctx.tau.mul(&upper_ctx.xi));
    rec.ival("first_floor_upper", tau, Some(tau - 1.0), None, &plus, &bound, hyp);
    let lower_ctx = Blocks::new(scheme, tau, &rate_at(scheme, tau, prec)?, prec)?;
    let minus = raw_totals(&lower_ctx, s_max)?.minus;
    let t = Ival::f64(prec, tau);
    rec.ival("first_floor_lower", tau, Some(tau), None, &t.mul(&t), &minus, hyp);
    Ok(())
}

/// Weighted series minus the shifted sums and the s0 correction, written as a
/// sum of nonnegative pieces.
fn tower_middle(ctx: &Blocks, s0: u64, tau0: u64, s_max: u64) -> Result<Ival> {
    let q = ctx.scheme.growth;
    let first = tau0.saturating_sub(3);
    let mut m = Ival::zero(ctx.prec);
    for j in 0..=s_max {
        m = m.lse(&ctx.short(j)?.weighted);
        if j < first || j > s0 {
            m = m.lse(&ctx.long(j)?.weighted);
            continue;
        }
        let b = ctx.b(j)?;
        let sq = ctx.u(j * j);
        let len = ctx.long_len(j)?;
        let pre = ctx.long_prefactor(j, 1.0);
        // weight of the first term minus one: b − 1 − c
        let w0 = if j == s0 && s0 >= 1 {
            ctx.b(s0 - 1)?.add(&ctx.u(q * (2 * s0 + 1) + ctx.scheme.offset + s0 * s0)).sub(&ctx.u(1))
        } else {
            b.sub(&ctx.u(1))
        };
        let (head_len, rest_len) = if len.lo >= sq.hi {
            (sq.clone(), len.sub(&sq))
        } else if len.hi <= sq.lo {
            (len.clone(), Ival::zero(ctx.prec))
        } else {
            return Err(Error::Precision("block length straddles the shift".into()));
        };
        let lam = &ctx.lam;
        let head = pre.add(&lam.mul(&b.sub(&ctx.u(1))).neg()).add(
            &w0.log2()
                .add(&super::ival::geom(lam, &head_len))
                .lse(&super::ival::wsum(lam, &head_len)),
        );
        let rest = pre
            .add(&w0.add(&sq).log2())
            .add(&lam.mul(&b.add(&sq).sub(&ctx.u(1))).neg())
            .add(&super::ival::geom(lam, &rest_len));
        m = m.lse(&head).lse(&rest);
    }
    Ok(m.with_upper_tail(&ctx.tail(s_max)?.weighted))
}

fn tower(rec: &mut Recorder, scheme: &PartitionScheme, tau: f64, s: f64, prec: u32) -> Result<()> {
    let hyp = scheme.lemma_mode && tau >= 50.0 && s >= tau - 1.0 && s <= tau;
    let q = scheme.growth;
    let (s0, tau0) = (s.ceil() as u64, tau.ceil() as u64);
    let s_max = tau0 + 2;
    let ctx = Blocks::new(scheme, tau, &rate_at(scheme, s, prec)?, prec)?;
    let qf = q as f64;
    let t = ctx.tau.clone();
    let q_tau_sq = t.mul(&t).mul_f64(qf);
    let hat_minus = |j: u64| -> Result<Ival> { Ok(ctx.long(j)?.shifted_minus) };
    let top = hat_minus(s0)?;

    let sv = Ival::f64(prec, s).add_f64(1.0);
    let cube = sv.mul(&sv).mul(&sv).mul_f64(2.0 * qf);
    let e1 = cube.sub(&t.mul_f64(qf * ((s0 + 1) * (s0 + 2)) as f64));
    rec.ival("core_shifted_growth", tau, Some(s), Some(s0), &e1, &top, hyp);
    let e2 = q_tau_sq.mul(&t.add_f64(-4.0));
    rec.ival("core_shifted_floor", tau, Some(s), Some(s0), &e2, &top, hyp);

    let twentieth = Ival::f64(prec, 20.0).log2().neg();
    for j in tau0.saturating_sub(3)..s0 {
        let lhs = ctx.b(j)?.add(&ctx.u(j * j)).log2().add(&ctx.long(j)?.plus);
        let rhs = twentieth.sub(&q_tau_sq).add(&hat_minus(j)?);
        rec.ival("core_early_blocks", tau, Some(s), Some(j), &lhs, &rhs, hyp);
    }
    if s0 >= 1 {
        let factor = ctx.b(s0 - 1)?.add(&ctx.u(q * (2 * s0 + 1) + scheme.offset + 2 * s0 * s0));
        let lhs = factor.log2().add(&ctx.long(s0)?.plus);
        let rhs = q_tau_sq.add_f64(2.0).neg().add(&top);
        rec.ival("core_last_block", tau, Some(s), Some(s0), &lhs, &rhs, hyp);
    }

    let plus = raw_totals(&ctx, s_max)?.plus;
    let middle = tower_middle(&ctx, s0, tau0, s_max)?;
    rec.ival("tower_chain_left", tau, Some(s), None, &plus, &middle, hyp);
    let mut sum = Ival::neg_inf(prec);
    for j in tau0.saturating_sub(3)..=s0 {
        sum = sum.lse(&hat_minus(j)?);
    }
    rec.ival("tower_chain_right", tau, Some(s), None, &middle, &q_tau_sq.neg().add(&sum), hyp);
    Ok(())
}

fn tower_finite(rec: &mut Recorder, scheme: &PartitionScheme, tau: f64, prec: u32) -> Result<()> {
    let hyp = scheme.lemma_mode && tau >= 50.0;
    let ctx = Blocks::new(scheme, tau, &rate_at(scheme, tau, prec)?, prec)?;
    let w = raw_totals(&ctx, tau.ceil() as u64 + 2)?.weighted;
    let inf = Float::with_val(prec, rug::float::Special::Infinity);
    rec.push("tower_weighted_finite", Some(tau), Some(tau), None, &w.hi, &inf, hyp);
    let last = rec.checks.last_mut().expect("just pushed");
    last.pass = w.hi.is_finite();
    Ok(())
}

/// Evaluates every block inequality on the grid. An empty `s_grid` means
/// {τ−1, τ−1/2, τ} for each τ.
pub fn verify_appendix_lemmas(scheme: &PartitionScheme, tau_grid: &[f64], s_grid: &[f64], prec: u32) -> Result<LemmaReport> {
    let mut rec = Recorder { checks: Vec::new() };
    endpoint_checks(&mut rec, scheme, prec)?;
    for &tau in tau_grid {
        if !(tau >= 1.0 && tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau = {tau} must be at least 1")));
        }
        first_floor(&mut rec, scheme, tau, prec)?;
        if tau >= 50.0 {
            tower_finite(&mut rec, scheme, tau, prec)?;
        }
        let own = [tau - 1.0, tau - 0.5, tau];
        let ss: Vec<f64> = if s_grid.is_empty() { own.to_vec() } else { s_grid.to_vec() };
        for s in ss.into_iter().filter(|&s| s >= tau - 1.0 && s <= tau && s >= 0.0) {
            tower(&mut rec, scheme, tau, s, prec)?;
        }
    }
    let all_pass = rec.checks.iter().filter(|c| c.in_hypothesis).all(|c| c.pass);
    Ok(LemmaReport { scheme: *scheme, precision_bits: prec, checks: rec.checks, all_pass })
}
