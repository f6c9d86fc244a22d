use std::f64::consts::{FRAC_PI_4, SQRT_2};

use bell_recycle::chsh::{evaluate_case, ChshPair, MixedStrategy, TSIRELSON};
use bell_recycle::frontier::{
    best_mixture, equal_point, full_frontier, interval_from_points, region_map, violation_interval, GridSpec,
    Segment, TangentLine,
};
use bell_recycle::states::{prepare, StateSpec};
use bell_recycle::strategies::{Lambda, StrategyCase};

use proptest::prelude::*;

const BP: Lambda = Lambda::BasisProjection;
const IM: Lambda = Lambda::IdentityMeasurement;
const MX: Lambda = Lambda::Mixed;

#[test]
fn equal_point_reproduces_common_value_numerically() {
    for (deg, pair) in [(45.0f64, (BP, IM)), (45.0, (BP, MX)), (34.08, (BP, IM)), (41.48, (BP, MX))] {
        let phi = deg.to_radians();
        let r = equal_point(phi, pair).unwrap();
        assert!((0.0..=1.0).contains(&r.p_star));
        let state = prepare(&StateSpec::pure(phi).unwrap()).unwrap();
        let m = MixedStrategy::pair(r.first_case(), r.second_case(), r.p_star).unwrap();
        let s = m.evaluate(&state).unwrap();
        assert!((s.s_ab - r.s_star).abs() < 1e-8, "{deg} {pair:?}: {s:?} vs {}", r.s_star);
        assert!((s.s_ac - r.s_star).abs() < 1e-8);
        let t = r.tangent().unwrap();
        assert!((t.equal_value().unwrap() - r.s_star).abs() < 1e-9);
    }
}

#[test]
fn equal_point_of_identity_and_mixed_never_violates_twice() {
    let r = equal_point(FRAC_PI_4, (IM, MX)).unwrap();
    assert!(!r.double_violation());
    assert!(r.s_star <= 2.0 + 1e-9);
}

#[test]
fn optimised_values_order() {
    let a = equal_point(FRAC_PI_4, (BP, IM)).unwrap();
    let b = equal_point(FRAC_PI_4, (BP, MX)).unwrap();
    assert!(b.s_star > a.s_star);
    let pe12 = equal_point(34.08f64.to_radians(), (BP, IM)).unwrap();
    let pe13 = equal_point(41.48f64.to_radians(), (BP, MX)).unwrap();
    assert!(pe12.s_star > a.s_star);
    assert!(pe13.s_star > b.s_star);
}

#[test]
fn violation_intervals() {
    let r12 = equal_point(FRAC_PI_4, (BP, IM)).unwrap();
    let (lo12, hi12) = violation_interval(FRAC_PI_4, r12.pair, &r12.settings).unwrap().unwrap();
    let r13 = equal_point(FRAC_PI_4, (BP, MX)).unwrap();
    let (lo13, hi13) = violation_interval(FRAC_PI_4, r13.pair, &r13.settings).unwrap().unwrap();
    assert!(lo13 < 0.30 && hi13 > 0.35);
    assert!(hi13 - lo13 > hi12 - lo12);

    // Endpoints sit on the classical bound.
    for (r, lo, hi) in [(r12, lo12, hi12), (r13, lo13, hi13)] {
        let state = prepare(&StateSpec::pure(FRAC_PI_4).unwrap()).unwrap();
        let a = evaluate_case(&state, &r.first_case()).unwrap();
        let b = evaluate_case(&state, &r.second_case()).unwrap();
        for p in [lo, hi] {
            let s = a.lerp(&b, p);
            let closest = (s.s_ab - 2.0).abs().min((s.s_ac - 2.0).abs());
            assert!(closest < 1e-8);
            assert!(s.min() >= 2.0 - 1e-8);
        }
    }
    let product = violation_interval(0.0, (BP, IM), &r12.settings).unwrap();
    assert_eq!(product, None);
}

proptest! {
    #[test]
    fn interval_points_double_violate(a_ab in 0.0..2.9f64, a_ac in 0.0..2.9f64, b_ab in 0.0..2.9f64, b_ac in 0.0..2.9f64, t in 0.0..=1.0f64) {
        let a = ChshPair::new(a_ab, a_ac);
        let b = ChshPair::new(b_ab, b_ac);
        if let Some((lo, hi)) = interval_from_points(a, b) {
            let p = lo + t * (hi - lo);
            prop_assert!(a.lerp(&b, p).min() >= 2.0 - 1e-9);
            prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn best_mixture_dominates_grid(a_ab in 0.0..2.9f64, a_ac in 0.0..2.9f64, b_ab in 0.0..2.9f64, b_ac in 0.0..2.9f64) {
        let a = ChshPair::new(a_ab, a_ac);
        let b = ChshPair::new(b_ab, b_ac);
        let (value, p, _) = best_mixture(a, b);
        prop_assert!((a.lerp(&b, p).min() - value).abs() < 1e-9);
        for i in 0..=100 {
            prop_assert!(a.lerp(&b, i as f64 / 100.0).min() <= value + 1e-9);
        }
    }

    #[test]
    fn tangent_line_passes_through_both_points(a_ab in 0.0..2.9f64, a_ac in 0.0..2.9f64, b_ab in 0.0..2.9f64, b_ac in 0.0..2.9f64) {
        prop_assume!((a_ab - b_ab).abs() > 1e-3);
        let t = TangentLine::through(ChshPair::new(a_ab, a_ac), ChshPair::new(b_ab, b_ac)).unwrap();
        prop_assert!(t.k.is_finite() && t.s0.is_finite());
        if !t.swapped {
            prop_assert!((t.k * a_ab + t.s0 - a_ac).abs() < 1e-9);
            prop_assert!((t.k * b_ab + t.s0 - b_ac).abs() < 1e-9);
        }
    }
}

fn check_curve_invariants(deg: f64) {
    let phi = deg.to_radians();
    let curve = full_frontier(phi, 4000).unwrap();
    let pts = &curve.points;
    assert!(pts.len() >= 3);
    for w in pts.windows(2) {
        assert!(w[1].s_ab > w[0].s_ab, "{deg}: s_ab not increasing");
        assert!(w[1].s_ac <= w[0].s_ac + 1e-12, "{deg}: s_ac increasing");
    }
    assert!(curve.max_concavity_violation() <= 1e-8);

    // Vertices are deterministic strategies; chord midpoints are mixtures.
    let state = prepare(&StateSpec::pure(phi).unwrap()).unwrap();
    for p in pts {
        let s = evaluate_case(&state, &p.case).unwrap();
        assert!((s.s_ab - p.s_ab).abs() < 1e-8 && (s.s_ac - p.s_ac).abs() < 1e-8);
        assert!(s.within_tsirelson());
    }
    for w in pts.windows(2).filter(|w| w[0].case.lambda != w[1].case.lambda) {
        let m = MixedStrategy::pair(w[0].case, w[1].case, 0.5).unwrap().evaluate(&state).unwrap();
        let want = curve.s_ac_at(m.s_ab).unwrap();
        assert!((m.s_ac - want).abs() < 1e-8);
    }
}

#[test]
fn frontier_invariants() {
    for deg in [45.0, 41.48, 34.08, 20.0, 5.0] {
        check_curve_invariants(deg);
    }
}

#[test]
fn maximally_entangled_frontier_shape() {
    let curve = full_frontier(FRAC_PI_4, 20_000).unwrap();
    let first = curve.points.first().unwrap();
    let last = curve.points.last().unwrap();
    assert!(first.s_ab.abs() < 1e-12 && (first.s_ac - TSIRELSON).abs() < 1e-12);
    assert!((last.s_ab - TSIRELSON).abs() < 1e-9 && (last.s_ac - SQRT_2).abs() < 1e-6);
    assert_eq!(
        curve.segment_order(),
        vec![Segment::Mix23, Segment::Det3, Segment::Mix13, Segment::Det1]
    );
    let at = curve.s_ac_at(2.1).unwrap();
    assert!(at > 2.0);
    assert!(curve.s_ac_at(-0.1).is_none());
}

#[test]
fn region_maps() {
    let grid = GridSpec::default();
    let me = region_map(FRAC_PI_4, (BP, IM), &grid).unwrap();
    assert_eq!(me.mask.len(), me.angles_deg.len() * me.ps.len());
    let i = me.angles_deg.iter().position(|&a| (a - 75.0).abs() < 1e-9).unwrap();
    let j = me.ps.iter().position(|&p| (p - 0.845).abs() < 1e-9).unwrap();
    assert!(me.get(i, j));
    assert!((me.fixed_setting_deg - 45.0).abs() < 1e-9);

    let product = region_map(0.0, (BP, IM), &grid).unwrap();
    assert_eq!(product.area_fraction(), 0.0);

    let pe = region_map(34.08f64.to_radians(), (BP, IM), &grid).unwrap();
    assert!(pe.area_fraction() > me.area_fraction());

    let me13 = region_map(FRAC_PI_4, (BP, MX), &grid).unwrap();
    let pe13 = region_map(41.48f64.to_radians(), (BP, MX), &grid).unwrap();
    assert!(pe13.area_fraction() > me13.area_fraction());
}

#[test]
fn region_map_is_reproducible() {
    let grid = GridSpec { angle_step_deg: 1.0, p_step: 0.01, ..GridSpec::default() };
    let a = region_map(0.6, (BP, IM), &grid).unwrap();
    let b = region_map(0.6, (BP, IM), &grid).unwrap();
    assert_eq!(a, b);
}

#[test]
fn deterministic_identity_point_exceeds_maximal_entanglement() {
    let phi = 34.08f64.to_radians();
    let state = prepare(&StateSpec::pure(phi).unwrap()).unwrap();
    let chi = bell_recycle::strategies::optimal_chi(phi).unwrap().chi;
    let p = evaluate_case(&state, &StrategyCase::identity_measurement(chi)).unwrap();
    let me = full_frontier(FRAC_PI_4, 20_000).unwrap();
    assert!(p.s_ac > me.s_ac_at(p.s_ab).unwrap());
}
