use gibbs_core::puzzle::*;
use proptest::prelude::*;

fn alpha(c: f64) -> f64 {
    (1.0 - (1.0 - 4.0 * c).sqrt()) / 2.0
}

#[test]
fn central_trace_examples() {
    let t = central_trace(-2.0).unwrap();
    assert!((t.left + 1.0).abs() < 1e-12 && (t.right - 1.0).abs() < 1e-12);
    let t = central_trace(-1.9).unwrap();
    assert!((t.left - alpha(-1.9)).abs() < 1e-12 && (t.right + alpha(-1.9)).abs() < 1e-12);
    let t = central_trace(-0.75).unwrap();
    assert!((t.left + 0.5).abs() < 1e-12 && (t.right - 0.5).abs() < 1e-12);
    assert!(central_trace(-0.5).is_err());
    assert!(central_trace(-2.1).is_err());
}

#[test]
fn chebyshev_cantor_data() {
    let d = cantor_data(-2.0, 2.0).unwrap();
    // |Dg| = 8 at every interior period-3 point of z^2 - 2.
    assert!((d.mult_p - 8.0).abs() < 1e-9 && (d.mult_p_plus - 8.0).abs() < 1e-9);
    assert!((d.theta - 1.0).abs() < 1e-9);
    assert!(d.xi.is_none());
    assert!(d.y_is_negative);
    assert_eq!(d.identification, Identification::Ray);
}

fn g(c: f64, x: f64) -> f64 {
    let mut x = x;
    for _ in 0..3 {
        x = x * x + c;
    }
    x
}

#[test]
fn periodic_points_and_multipliers() {
    for c in [-2.0, -1.99995, -1.9999, -1.99] {
        let d = cantor_data(c, 2.0).unwrap();
        assert!((g(c, d.p) - d.p).abs() < 1e-10);
        assert!((g(c, d.p_plus) - d.p_plus).abs() < 1e-10);
        assert!((g(c, g(c, d.p_minus)) - d.p_minus).abs() < 1e-10);
        assert!((g(c, d.p_minus) - d.p_minus).abs() > 1e-10);
        assert!(d.y.contains(d.p) && d.y_tilde.contains(d.p_plus) && d.y_tilde.contains(d.p_minus));
        assert!((d.theta - (d.mult_p / d.mult_p_plus).sqrt()).abs() < 1e-15);
    }
}

#[test]
fn itinerary_rejects_chebyshev() {
    assert!(critical_itinerary(-2.0, 8, 5).is_err());
    let r = kn_membership(-2.0, 6, 4);
    assert!(!r.pass && !r.ordering_ok);
    let r = kn_membership(0.0, 6, 4);
    assert!(!r.pass && !r.ordering_ok);
}

// Independent membership: x in the central piece with f^3(x) back in it.
fn oracle_symbol(c: f64, x: f64) -> Option<u8> {
    let a = alpha(c);
    let inside = |v: f64| a < v && v < -a;
    (inside(x) && inside(g(c, x))).then_some(if x < 0.0 { 0 } else { 1 })
}

fn oracle_matches(c: f64, n: usize, prefix: &[u8]) -> bool {
    let mut orbit = vec![c];
    for _ in 0..n + 3 * prefix.len() {
        let x = *orbit.last().unwrap();
        orbit.push(x * x + c);
    }
    let ordered = (1..n).all(|j| orbit[j] > if j + 1 < n { orbit[j + 1] } else { 0.0 });
    ordered && prefix.iter().enumerate().all(|(k, &s)| oracle_symbol(c, orbit[n + 3 * k]) == Some(s))
}

fn oracle_hull(n: usize, prefix: &[u8]) -> Option<(f64, f64)> {
    let (lo, hi) = (-2.0, -1.9997);
    let m = 1_000_000;
    let mut hull: Option<(f64, f64)> = None;
    for i in 0..=m {
        let c = lo + (hi - lo) * i as f64 / m as f64;
        if oracle_matches(c, n, prefix) {
            hull = Some(hull.map_or((c, c), |(a, b)| (a.min(c), b.max(c))));
        }
    }
    hull.map(|(a, b)| (a - (hi - lo) / m as f64, b + (hi - lo) / m as f64))
}

#[test]
fn find_all_zero_prefix() {
    let prefix = [0u8; 5];
    let c = find_parameter(8, &prefix, 5).unwrap();
    assert!(c > -2.0 && c < -1.999);
    let it = critical_itinerary(c, 8, 5).unwrap();
    assert_eq!(it.symbols, prefix.to_vec());
    assert_eq!(it.certified_steps, 5);
    let (a, b) = oracle_hull(8, &prefix).unwrap();
    assert!(a <= c && c <= b, "{c} outside oracle hull [{a}, {b}]");
}

#[test]
fn find_prefix_one() {
    let c = find_parameter(8, &[1], 1).unwrap();
    let d = cantor_data(c, 2.0).unwrap();
    let x = critical_orbit(c, 8)[8];
    assert!(d.y_tilde.contains(x));
    let (a, b) = oracle_hull(8, &[1]).unwrap();
    assert!(a <= c && c <= b);
}

#[test]
fn found_parameter_in_k8() {
    let c = find_parameter(8, &[0; 6], 6).unwrap();
    let r = kn_membership(c, 8, 6);
    assert!(r.pass, "{r:?}");
    let d = cantor_data(c, 2.0).unwrap();
    assert!(d.theta > 1.0);
    // θ continuity across a short bracket
    let d2 = cantor_data(c + 1e-6, 2.0).unwrap();
    assert!((d.theta - d2.theta).abs() < 0.1);
}

#[test]
fn brackets_nest() {
    let b0 = parameter_bracket(8, &[]).unwrap();
    let b1 = parameter_bracket(8, &[0]).unwrap();
    let b2 = parameter_bracket(8, &[0, 1]).unwrap();
    for (outer, inner) in [(&b0, &b1), (&b1, &b2)] {
        assert!(outer.lo <= inner.lo && inner.hi <= outer.hi && inner.lo < inner.hi);
        assert!(inner.hi - inner.lo < outer.hi - outer.lo);
    }
}

#[test]
fn certification_is_stable_and_deterministic() {
    let c = find_parameter(8, &[0, 1, 0], 3).unwrap();
    let a = critical_itinerary_with_tolerance(c, 8, 8, MEMBERSHIP_TOLERANCE).unwrap();
    let b = critical_itinerary_with_tolerance(c, 8, 8, MEMBERSHIP_TOLERANCE / 2.0).unwrap();
    assert_eq!(a.symbols[..a.certified_steps], b.symbols[..a.certified_steps]);
    assert!(b.certified_steps >= a.certified_steps);
    assert_eq!(a, critical_itinerary_with_tolerance(c, 8, 8, MEMBERSHIP_TOLERANCE).unwrap());
}

#[test]
fn search_rejects_bad_arguments() {
    assert!(find_parameter(5, &[0], 1).is_err());
    assert!(find_parameter(8, &[0, 2], 2).is_err());
    assert!(find_parameter(8, &[0], 3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn components_disjoint_inside_central(c in -2.0f64..-1.9) {
        let (neg, pos) = cantor_traces(c).unwrap();
        let central = central_trace(c).unwrap();
        prop_assert!(neg.disjoint(&pos));
        prop_assert!(central.left < neg.left && neg.right < pos.left && pos.right < central.right);
    }
}
