use gibbs_core::schedule::*;
use gibbs_core::series::PartitionScheme;
use gibbs_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Integer;

const PREC: u32 = 256;

fn toy() -> PartitionScheme {
    // Ξ = 2, q = 4: a_1 = 16, b_1 = 30, a_2 = 2^32
    PartitionScheme::oracle(0.5, 4).unwrap()
}

fn pow2(e: u64) -> Integer {
    Integer::from(1) << e as u32
}

/// Symbol of x̂_j straight from the block definitions.
fn naive_symbol(q: u64, xi: u64, signs: &[Sign], j: &Integer) -> HatSymbol {
    let k = Integer::from(j + 1u32);
    for s in 0u64.. {
        let a = pow2(q * s * s * s);
        let b = Integer::from(&a + (q * (2 * s + 1) + xi));
        let next = pow2(q * (s + 1) * (s + 1) * (s + 1));
        if k >= a && k < b {
            return HatSymbol::Zero;
        }
        if k >= b && k < next {
            if s == 0 {
                return HatSymbol::Plus;
            }
            return match signs[((s + 3) / 4 - 1) as usize] {
                Sign::Plus => HatSymbol::Plus,
                Sign::Minus => HatSymbol::Minus,
            };
        }
    }
    unreachable!()
}

fn endpoints(q: u64, xi: u64, s: u64) -> (Integer, Integer, Integer) {
    let a = pow2(q * s * s * s);
    let b = Integer::from(&a + (q * (2 * s + 1) + xi));
    (a, b, pow2(q * (s + 1).pow(3)))
}

#[test]
fn hat_scheme_has_even_parity() {
    for xi in [0.5, 1.0, 2.0, 3.3] {
        let s = hat_scheme(xi).unwrap();
        assert_eq!((s.growth + s.offset) % 2, 0);
        assert!(s.lemma_mode);
    }
    // Ξ = 3 makes 50(Ξ+1) + Ξ odd
    assert_eq!(hat_scheme(1.0).unwrap().growth, 201);
    assert_eq!(hat_scheme(0.5).unwrap().growth, 150);
}

#[test]
fn case_list_on_first_blocks() {
    let scheme = hat_scheme(1.0).unwrap();
    let (q, xi) = (scheme.growth, scheme.offset);
    let j_max = pow2(q * 8) - 2u32;
    let hat = build_hat_sequence(&[Sign::Minus], &scheme, &j_max).unwrap();
    let b0 = 1 + q + xi;
    let head = hat.window(&Integer::new(), b0 as usize + 50).unwrap();
    for (j, s) in head.iter().enumerate() {
        let expect = if (j as u64) < b0 - 1 { HatSymbol::Zero } else { HatSymbol::Plus };
        assert_eq!(*s, expect, "j = {j}");
    }
    // last entry of J_0, then I_1, then J_1 carrying ς(1) = −
    let (a1, b1, _) = endpoints(q, xi, 1);
    let at = |j: Integer| hat.symbol_at(&j).unwrap();
    assert_eq!(at(Integer::from(&a1 - 2u32)), HatSymbol::Plus);
    assert_eq!(at(Integer::from(&a1 - 1u32)), HatSymbol::Zero);
    assert_eq!(at(Integer::from(&b1 - 2u32)), HatSymbol::Zero);
    assert_eq!(at(Integer::from(&b1 - 1u32)), HatSymbol::Minus);
    assert_eq!(at(j_max.clone()), HatSymbol::Minus);
    assert!(hat.symbol_at(&Integer::from(&j_max + 1u32)).is_err());
}

#[test]
fn all_plus_has_no_minus() {
    let scheme = hat_scheme(2.0).unwrap();
    let hat = build_hat_sequence(&[Sign::Plus; 2], &scheme, &pow2(scheme.growth * 27 + 5)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bits = scheme.growth * 27;
    for _ in 0..200 {
        let j = random_index(&mut rng, bits as u32 - 1);
        let w = hat.window(&j, 40).unwrap();
        assert!(!w.contains(&HatSymbol::Minus));
    }
}

/// Uniform in [0, 2^b) for a random bit count b ≤ below_bits.
fn random_index(rng: &mut ChaCha8Rng, below_bits: u32) -> Integer {
    let bits = rng.gen_range(1..=below_bits);
    let limbs: Vec<u64> = (0..bits / 64 + 1).map(|_| rng.gen()).collect();
    Integer::from_digits(&limbs, rug::integer::Order::Lsf).keep_bits(bits)
}

#[test]
fn all_minus_blocks_are_even_and_bounded_by_zeros() {
    for xi in [0.5, 1.0, 2.0] {
        let scheme = hat_scheme(xi).unwrap();
        let (q, x) = (scheme.growth, scheme.offset);
        let hat = build_hat_sequence(&[Sign::Minus; 2], &scheme, &(pow2(q * 64) - 1u32)).unwrap();
        for s in 1..=3 {
            let (_, b, next) = endpoints(q, x, s);
            assert!(b.is_even() && next.is_even());
            assert!(Integer::from(&next - &b).is_even());
            let at = |j: Integer| hat.symbol_at(&j).unwrap();
            assert_eq!(at(Integer::from(&b - 2u32)), HatSymbol::Zero);
            assert_eq!(at(Integer::from(&b - 1u32)), HatSymbol::Minus);
            assert_eq!(at(Integer::from(&next - 2u32)), HatSymbol::Minus);
            assert_eq!(at(Integer::from(&next - 1u32)), HatSymbol::Zero);
            let c = hat.check_window(&Integer::from(&b - 10u32), 20).unwrap();
            assert!(c.holds() && c.minus_runs == 1, "{c:?}");
        }
    }
}

#[test]
fn toy_scheme_matches_naive_definition() {
    let scheme = toy();
    let signs = [Sign::Minus, Sign::Plus];
    let hat = build_hat_sequence(&signs, &scheme, &(pow2(256) - 1u32)).unwrap();
    let head = hat.window(&Integer::new(), 200).unwrap();
    for (j, s) in head.iter().enumerate() {
        assert_eq!(*s, naive_symbol(4, 2, &signs, &Integer::from(j)), "j = {j}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..500 {
        let j = random_index(&mut rng, 250);
        let w = hat.window(&j, 8).unwrap();
        for (i, s) in w.iter().enumerate() {
            assert_eq!(*s, naive_symbol(4, 2, &signs, &Integer::from(&j + i as u32)));
        }
    }
    // blocks J_1..J_4 carry ς(1), J_5.. would need ς(2)
    for s in 1..=4 {
        assert_eq!(hat.block_sign(s).unwrap(), Sign::Minus);
    }
}

#[test]
fn rejects_bad_schemes_and_short_prefixes() {
    let odd = PartitionScheme::with_growth(1.0, 200).unwrap();
    assert!(build_hat_sequence(&[Sign::Plus], &odd, &Integer::from(10)).is_err());
    // Ξ = 2 with q = 2 overlaps I_0 and I_1
    let overlap = PartitionScheme::oracle(0.4, 2).unwrap();
    assert!(build_hat_sequence(&[Sign::Plus], &overlap, &Integer::from(10)).is_err());
    let scheme = hat_scheme(1.0).unwrap();
    assert!(build_hat_sequence(&[Sign::Plus], &scheme, &pow2(1 << 29)).is_err());
    assert!(build_hat_sequence(&[Sign::Plus], &scheme, &Integer::from(-1)).is_err());

    let hat = build_hat_sequence(&[Sign::Plus], &toy(), &pow2(300)).unwrap();
    // J_5 lies past 2^{4·125}, beyond j_max; J_4 needs only ς(1)
    let (_, b4, _) = endpoints(4, 2, 4);
    assert_eq!(hat.symbol_at(&b4).unwrap(), HatSymbol::Plus);
    let short = build_hat_sequence(&[], &toy(), &pow2(300)).unwrap();
    match short.symbol_at(&b4) {
        Err(Error::InvalidArgument(msg)) => assert!(msg.contains("m = 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
    assert!(short.symbol_at(&Integer::from(3)).is_ok());
}

#[test]
fn projection_cases() {
    let hat = build_hat_sequence(&[Sign::Minus], &toy(), &pow2(200)).unwrap();
    let (_, b1, _) = endpoints(4, 2, 1);
    // j = b_1 − 1 is odd and opens a 1⁻ run
    let start = Integer::from(&b1 - 3u32);
    let syms = hat.window(&start, 8).unwrap();
    let bin = project_itinerary(&hat, &start, 8).unwrap();
    assert_eq!(&syms[..2], &[HatSymbol::Zero, HatSymbol::Zero]);
    assert_eq!(&bin[..2], &[0, 0]);
    assert_eq!(&bin[2..], &[1, 0, 1, 0, 1, 0]);
    // starting inside the run at an even index
    let even = b1.clone();
    assert!(even.is_even());
    assert_eq!(project_itinerary(&hat, &even, 6).unwrap(), vec![0, 1, 0, 1, 0, 1]);
    assert_eq!(project_itinerary(&hat, &even, 6).unwrap(), project_itinerary(&hat, &even, 6).unwrap());
    // J_0 → 1
    let plus = build_hat_sequence(&[Sign::Plus], &toy(), &pow2(200)).unwrap();
    assert_eq!(project_itinerary(&plus, &Integer::from(7), 3).unwrap(), vec![1, 1, 1]);
    assert_eq!(project_itinerary(&plus, &Integer::new(), 6).unwrap(), vec![0; 6]);
}

#[test]
fn compatibility_clauses() {
    let hat = build_hat_sequence(&[Sign::Minus], &toy(), &pow2(200)).unwrap();
    let start = Integer::from(0);
    let syms = hat.window(&start, 60).unwrap();
    let bin = project_itinerary(&hat, &start, 60).unwrap();
    assert!(check_compatibility(&bin, &syms));
    let zero = syms.iter().position(|s| *s == HatSymbol::Zero).unwrap();
    let mut flipped = bin.clone();
    flipped[zero] ^= 1;
    assert!(!check_compatibility(&flipped, &syms));
    let plus = syms.iter().position(|s| *s == HatSymbol::Plus).unwrap();
    let mut flipped = bin.clone();
    flipped[plus] ^= 1;
    assert!(!check_compatibility(&flipped, &syms));
    let minus = syms.windows(2).position(|w| w == [HatSymbol::Minus, HatSymbol::Minus]).unwrap();
    let mut equal = bin.clone();
    equal[minus + 1] = equal[minus];
    assert!(!check_compatibility(&equal, &syms));
    // the other binary phase of a 1⁻ run is also compatible
    let mut other = bin.clone();
    for (x, s) in other.iter_mut().zip(&syms) {
        if *s == HatSymbol::Minus {
            *x ^= 1;
        }
    }
    assert!(check_compatibility(&other, &syms));
    assert!(!check_compatibility(&bin[1..], &syms));
}

#[test]
fn temperature_window_examples() {
    let w = temperature_window(2.0, 3, 5).unwrap();
    assert!((w.a - 4.0).abs() < 1e-15);
    assert!((temperature_window(4.0, 1, 1).unwrap().a - 2.0).abs() < 1e-15);
    assert_eq!((w.t_low, w.t_high), (12.0, 20.0));
    for theta in [1.3, 2.0, 7.5] {
        let w = temperature_window(theta, 7, 9).unwrap();
        assert!((w.tau(w.a * 7.0) - 28.0).abs() < 1e-12);
        assert!((tau_of(theta, w.t_low).unwrap() - 28.0).abs() < 1e-12);
        assert!(w.t_low <= w.t_high);
    }
    assert!(temperature_window(1.0, 1, 2).is_err());
    assert!(temperature_window(0.5, 1, 2).is_err());
    assert!(temperature_window(2.0, 3, 2).is_err());
    let signs = parse_signs("+--+").unwrap();
    assert_eq!(w_sign(&signs, 2, 3), Some(Sign::Minus));
    assert_eq!(w_sign(&signs, 1, 2), None);
}

fn w_sign(signs: &[Sign], m: u64, m_hat: u64) -> Option<Sign> {
    temperature_window(2.0, m, m_hat).unwrap().with_signs(signs).unwrap().predicted_sign
}

/// log2 λ(s) = −log2 |J_s| at integer s, from exact integers.
fn exact_log2_lambda(q: u64, xi: u64, s: u64) -> f64 {
    let (_, b, next) = endpoints(q, xi, s);
    let len = next - b;
    let (m, e) = len.to_f64_exp();
    -(m.log2() + e as f64)
}

#[test]
fn pressure_band_examples() {
    let scheme = toy();
    let chi = 0.5;
    // θ = 2, t = 3 gives τ = 3
    let band = pressure_band(3.0, chi, 2.0, &scheme, PREC).unwrap();
    assert!((band.tau - 3.0).abs() < 1e-15);
    let l3 = exact_log2_lambda(4, 2, 3);
    let l2 = exact_log2_lambda(4, 2, 2);
    assert!((band.log2_lambda_tau.unwrap() - l3).abs() < 1e-12);
    assert!((band.log2_lambda_tau_minus_one.unwrap() - l2).abs() < 1e-12);
    let base = -1.5 * chi;
    let ln2_3 = std::f64::consts::LN_2 / 3.0;
    assert!((band.p_minus - (base + ln2_3 * l3.exp2())).abs() < 1e-15);
    assert!((band.p_plus - (base + ln2_3 * l2.exp2())).abs() < 1e-15);
    assert!(band.p_minus <= band.p_plus && band.p_plus < 0.0 && band.negative);
    // the gap in log domain against the direct difference
    let gap = l2.exp2() - l3.exp2();
    assert!((band.log2_gap - gap.log2()).abs() < 1e-9);

    // τ = 2 on a lemma-scale scheme: λ(1) = 2^{-8q} is already subnormal
    let big = hat_scheme(1.0).unwrap();
    let b = pressure_band(2.0, chi, 2.0, &big, PREC).unwrap();
    assert!(b.asymptote);
    assert_eq!(b.p_minus, b.p_plus);
    assert_eq!(b.p_plus, -chi);
    assert!((b.log2_gap - exact_log2_lambda(big.growth, big.offset, 1)).abs() < 1e-9);
    // far past the exponent range λ is reported as 0
    let far = pressure_band(4000.0, chi, 2.0, &big, PREC).unwrap();
    assert!(far.log2_lambda_tau.is_none() && far.asymptote);
    assert_eq!(far.p_minus, -2000.0 * chi);
    assert!(pressure_band(1.0, chi, 2.0, &scheme, PREC).is_err());
}

#[test]
fn dominant_block_examples() {
    let scheme = hat_scheme(1.0).unwrap();
    let plus = vec![Sign::Plus; 64];
    for t in [1.0, 7.3, 50.0, 111.0, 200.0] {
        assert_eq!(dominant_block_prediction(t, 2.0, &scheme, &plus, PREC).unwrap().sign, Sign::Plus);
    }
    // τ = 4m exactly: blocks 4m − 3 .. 4m, all labelled ς(m)
    let signs = parse_signs("+-+-+-+-+-+-+-+-").unwrap();
    for m in 1..=16u64 {
        let a = block_temperature(3.0).unwrap();
        let p = dominant_block_prediction(a * m as f64, 3.0, &scheme, &signs, PREC).unwrap();
        assert_eq!(p.m0, m);
        assert_eq!(p.blocks.iter().map(|b| b.s).collect::<Vec<_>>(), (4 * m - 3..=4 * m).collect::<Vec<_>>());
        assert_eq!(p.sign, signs[m as usize - 1]);
        assert_eq!(p.certified, 4 * m >= 50);
    }
    // τ = 5.5 straddles m = 1 and m = 2
    match dominant_block_prediction(5.5, 2.0, &scheme, &signs, PREC) {
        Err(Error::Ambiguous(_)) => {}
        other => panic!("{other:?}"),
    }
    // Ĵ⁻ is evaluated for moderate blocks and grows with the block length
    let p = dominant_block_prediction(52.0, 2.0, &scheme, &plus, PREC).unwrap();
    assert!(p.certified && p.blocks.iter().all(|b| b.hat_j_minus.is_some()));
    assert!(dominant_block_prediction(0.0, 2.0, &scheme, &plus, PREC).is_err());
    assert!(dominant_block_prediction(4.0, 2.0, &scheme, &[], PREC).is_err());
}

#[test]
fn schedule_examples() {
    // β_ℓ = A_sup 4^ℓ, A_inf = A_sup / 2
    let a_sup = 3.0;
    let betas: Vec<f64> = (1..=5).map(|l| a_sup * 4f64.powi(l)).collect();
    let r = schedule_from_temperatures(&betas, a_sup, a_sup / 2.0).unwrap();
    assert!(r.holds(), "{r:?}");
    assert_eq!(r.m, vec![4, 16, 64, 256, 1024]);
    assert_eq!(r.signs.len(), 1024);
    // ℓ = 1 odd: − on [4, 15]; ℓ = 2 even: + on [16, 63]
    assert!(r.signs[..3].iter().all(|s| *s == Sign::Plus));
    assert!(r.signs[3..15].iter().all(|s| *s == Sign::Minus));
    assert!(r.signs[15..63].iter().all(|s| *s == Sign::Plus));
    assert_eq!(r.signs[1023], Sign::Minus);

    let mut bad = betas.clone();
    bad[3] = bad[2] * 1.5;
    let r = schedule_from_temperatures(&bad, a_sup, a_sup / 2.0).unwrap();
    assert_eq!(r.growth_violations, vec![3]);
    assert!(!r.holds());
    assert!(schedule_from_temperatures(&betas, 1.0, 2.0).is_err());
    assert!(schedule_from_temperatures(&[], 1.0, 1.0).is_err());
}

#[test]
fn schedule_drives_alternating_predictions() {
    let betas: Vec<f64> = (0..=6).map(|l| 4.0 * 4f64.powi(l)).collect();
    let r = schedule_from_temperatures(&betas, 4.0, 2.0).unwrap();
    assert!(r.holds());
    let scheme = hat_scheme(1.0).unwrap();
    let preds: Vec<Sign> =
        betas.iter().map(|&b| dominant_block_prediction(b, 2.0, &scheme, &r.signs, PREC).unwrap().sign).collect();
    for w in preds.windows(2) {
        assert_ne!(w[0], w[1]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn windows_satisfy_invariants(
        signs in proptest::collection::vec(prop_oneof![Just(Sign::Plus), Just(Sign::Minus)], 2),
        xi in prop_oneof![Just(0.5), Just(1.0), Just(2.0)],
        seed in any::<u64>(),
        len in 1usize..300,
    ) {
        let scheme = hat_scheme(xi).unwrap();
        let hat = build_hat_sequence(&signs, &scheme, &pow2(scheme.growth * 27)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            // half the windows straddle a block boundary
            let j = if rng.gen() {
                let s = rng.gen_range(0..=2);
                let (a, b, _) = endpoints(scheme.growth, scheme.offset, s);
                let edge = if rng.gen() { a } else { b };
                Integer::from(&edge - rng.gen_range(1..=len.min(100)) as u32).max(Integer::new())
            } else {
                random_index(&mut rng, (scheme.growth * 27) as u32 - 1)
            };
            let c = hat.check_window(&j, len).unwrap();
            prop_assert!(c.holds(), "{:?} at {}", c, j);
            let syms = hat.window(&j, len).unwrap();
            let bin = project_itinerary(&hat, &j, len).unwrap();
            prop_assert!(check_compatibility(&bin, &syms));
        }
    }

    #[test]
    fn prediction_constant_on_windows(m in 1u64..40, extra in 0u64..6, frac in 0.0f64..1.0, theta in 1.2f64..6.0) {
        let mut signs = vec![Sign::Minus; 60];
        for s in signs.iter_mut().skip((m + extra) as usize) {
            *s = Sign::Plus;
        }
        let w = temperature_window(theta, m, m + extra).unwrap().with_signs(&signs).unwrap();
        prop_assert_eq!(w.predicted_sign, Some(Sign::Minus));
        let t = w.t_low + frac * (w.t_high - w.t_low);
        let scheme = hat_scheme(1.0).unwrap();
        match dominant_block_prediction(t, theta, &scheme, &signs, PREC) {
            Ok(p) => prop_assert_eq!(p.sign, Sign::Minus),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn band_is_ordered(t in 2.0f64..40.0, chi in 0.0f64..2.0) {
        let b = pressure_band(t, chi, 2.0, &toy(), PREC).unwrap();
        prop_assert!(b.p_minus <= b.p_plus);
        if b.log2_gap > -1000.0 {
            let direct = b.p_plus - b.p_minus;
            let from_log = std::f64::consts::LN_2 / 3.0 * b.log2_gap.exp2();
            prop_assert!((direct - from_log).abs() <= 1e-12 * from_log.max(1e-300) + 4.0 * f64::EPSILON * b.p_plus.abs());
        }
    }
}
