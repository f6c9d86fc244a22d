//! Shared-randomness optimisation over pairs of deterministic strategies.
//!
//! Mixing two deterministic points traces the chord between them, so the
//! best simultaneous violation a pair can reach is where that chord crosses
//! the diagonal `S_AB = S_AC`. [`equal_point`] maximises the crossing value
//! over the free measurement angles; [`full_frontier`] takes the upper
//! concave envelope of all three deterministic curves at once.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chsh::{evaluate_case, parametric_pair, ChshPair, CLASSICAL_BOUND};
use crate::error::{Error, Result};
use crate::states::{check_phi_state, prepare, StateSpec};
use crate::strategies::{optimal_chi, Lambda, Settings, StrategyCase};

/// Chord through two deterministic points, `S_AC = k·S_AB + S₀`.
///
/// When both points share the same `S_AB` the roles are swapped and the line
/// reads `S_AB = k·S_AC + S₀`; the diagonal crossing `S₀/(1 − k)` is the same
/// expression either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentLine {
    pub k: f64,
    pub s0: f64,
    pub swapped: bool,
}

impl TangentLine {
    /// `None` when the two points coincide.
    pub fn through(a: ChshPair, b: ChshPair) -> Option<Self> {
        let dab = b.s_ab - a.s_ab;
        let dac = b.s_ac - a.s_ac;
        if dab != 0.0 {
            let k = dac / dab;
            Some(Self { k, s0: a.s_ac - k * a.s_ab, swapped: false })
        } else if dac != 0.0 {
            let k = dab / dac;
            Some(Self { k, s0: a.s_ab - k * a.s_ac, swapped: true })
        } else {
            None
        }
    }

    /// Value where the line meets `S_AB = S_AC`; `None` for a line parallel
    /// to the diagonal.
    pub fn equal_value(&self) -> Option<f64> {
        (self.k != 1.0).then(|| self.s0 / (1.0 - self.k))
    }
}

/// Best `min{S_AB, S_AC}` reachable by mixing two points, and the weight on
/// `a` that reaches it. The second element is `true` when the optimum is an
/// actual diagonal crossing inside `p ∈ [0, 1]`.
pub fn best_mixture(a: ChshPair, b: ChshPair) -> (f64, f64, bool) {
    let da = a.s_ab - a.s_ac;
    let db = b.s_ab - b.s_ac;
    let (ma, mb) = (a.min(), b.min());
    let mut best = if ma >= mb { (ma, 1.0, da == 0.0) } else { (mb, 0.0, db == 0.0) };
    // The minimum of two lines in p peaks either at an end or where they cross.
    if da * db < 0.0 {
        let p = db / (db - da);
        let value = a.lerp(&b, p).s_ab;
        if value >= best.0 {
            best = (value, p, true);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Coarse grid step over each free angle, degrees.
    pub angle_step_deg: f64,
    /// Golden-section bracket width at which refinement stops, radians.
    pub angle_tol: f64,
    /// Maximum number of coordinate-refinement cycles.
    pub max_cycles: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { angle_step_deg: 0.1, angle_tol: 1e-10, max_cycles: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualPointResult {
    pub pair: (Lambda, Lambda),
    pub settings: Settings,
    /// Probability of the first strategy of the pair.
    pub p_star: f64,
    /// Common value `S_AB = S_AC` at `p_star`.
    pub s_star: f64,
    pub first: ChshPair,
    pub second: ChshPair,
}

impl EqualPointResult {
    pub fn double_violation(&self) -> bool {
        self.s_star > CLASSICAL_BOUND
    }

    pub fn first_case(&self) -> StrategyCase {
        StrategyCase { lambda: self.pair.0, settings: self.settings }
    }

    pub fn second_case(&self) -> StrategyCase {
        StrategyCase { lambda: self.pair.1, settings: self.settings }
    }

    pub fn tangent(&self) -> Option<TangentLine> {
        TangentLine::through(self.first, self.second)
    }
}

fn check_pair(pair: (Lambda, Lambda)) -> Result<()> {
    if pair.0 == pair.1 {
        return Err(Error::invalid(format!(
            "a mixture needs two different strategies, got ({}, {})",
            pair.0, pair.1
        )));
    }
    Ok(())
}

/// Maximiser of `f` on `[lo, hi]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

fn grid_angles(step_deg: f64) -> Vec<f64> {
    let n = (360.0 / step_deg).round() as usize;
    (0..n).map(|i| (i as f64 * step_deg).to_radians()).collect()
}

/// The identity-measurement strategy only sees `χ`, which does not influence
/// `S_AB`; its best value is [`optimal_chi`] and a grid search would only
/// rediscover it, but it is kept free so the optimiser recovers it.
fn search_equal_point(
    phi_state: f64,
    pair: (Lambda, Lambda),
    cfg: &OptimizerConfig,
) -> (f64, f64, f64) {
    let angles = grid_angles(cfg.angle_step_deg);
    let curve = |lambda: Lambda| -> Vec<ChshPair> {
        angles
            .iter()
            .map(|&a| parametric_pair(&StrategyCase::new(lambda, a), phi_state))
            .collect()
    };
    let first = curve(pair.0);
    let second = curve(pair.1);

    // Rows are reduced into fixed slots; the final scan picks the first
    // maximum so ties resolve to the smaller angles.
    let rows: Vec<(f64, usize)> = first
        .par_iter()
        .map(|a| {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (j, b) in second.iter().enumerate() {
                let v = best_mixture(*a, *b).0;
                if v > best.0 {
                    best = (v, j);
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, &(v, j)) in rows.iter().enumerate() {
        if v > best.0 {
            best = (v, i, j);
        }
    }

    let objective = |x: f64, y: f64| {
        best_mixture(
            parametric_pair(&StrategyCase::new(pair.0, x), phi_state),
            parametric_pair(&StrategyCase::new(pair.1, y), phi_state),
        )
        .0
    };
    let step = cfg.angle_step_deg.to_radians();
    let (mut x, mut y) = (angles[best.1], angles[best.2]);
    let mut value = objective(x, y);
    for _ in 0..cfg.max_cycles {
        let (nx, fx) = golden_max(|t| objective(t, y), x - step, x + step, cfg.angle_tol);
        let (nx, vx) = if fx > value { (nx, fx) } else { (x, value) };
        let (ny, fy) = golden_max(|t| objective(nx, t), y - step, y + step, cfg.angle_tol);
        let (ny, vy) = if fy > vx { (ny, fy) } else { (y, vx) };
        let moved = (nx - x).abs().max((ny - y).abs());
        x = nx;
        y = ny;
        value = vy;
        if moved < cfg.angle_tol {
            break;
        }
    }
    (x.rem_euclid(TAU), y.rem_euclid(TAU), value)
}

/// Optimal mixture of two strategies on the pure state with angle
/// `phi_state`: maximises the diagonal crossing of the chord between the two
/// deterministic points over both strategies' free angles.
pub fn equal_point(phi_state: f64, pair: (Lambda, Lambda)) -> Result<EqualPointResult> {
    equal_point_with(phi_state, pair, &OptimizerConfig::default())
}

pub fn equal_point_with(
    phi_state: f64,
    pair: (Lambda, Lambda),
    cfg: &OptimizerConfig,
) -> Result<EqualPointResult> {
    check_pair(pair)?;
    check_phi_state(phi_state)?;
    if !(cfg.angle_step_deg > 0.0 && cfg.angle_step_deg <= 10.0) {
        return Err(Error::invalid("optimizer angle step must lie in (0, 10] degrees"));
    }
    let (x, y, _) = search_equal_point(phi_state, pair, cfg);
    let settings = Settings::default().with(pair.0, x).with(pair.1, y);
    let first = parametric_pair(&StrategyCase { lambda: pair.0, settings }, phi_state);
    let second = parametric_pair(&StrategyCase { lambda: pair.1, settings }, phi_state);
    let (s_star, p_star, crossing) = best_mixture(first, second);
    if !crossing {
        return Err(Error::Infeasible(format!(
            "strategies ({}, {}) never reach S_AB = S_AC on this state",
            pair.0, pair.1
        )));
    }
    Ok(EqualPointResult { pair, settings, p_star, s_star, first, second })
}

/// Range of first-strategy probabilities where both mixed CHSH values exceed
/// the classical bound. `None` when no such probability exists.
pub fn violation_interval(
    phi_state: f64,
    pair: (Lambda, Lambda),
    settings: &Settings,
) -> Result<Option<(f64, f64)>> {
    check_pair(pair)?;
    let state = prepare(&StateSpec::pure(phi_state)?)?;
    let a = evaluate_case(&state, &StrategyCase { lambda: pair.0, settings: *settings })?;
    let b = evaluate_case(&state, &StrategyCase { lambda: pair.1, settings: *settings })?;
    Ok(interval_from_points(a, b))
}

/// Solves `p·a + (1 − p)·b > 2` in both coordinates.
pub fn interval_from_points(a: ChshPair, b: ChshPair) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    for (va, vb) in [(a.s_ab, b.s_ab), (a.s_ac, b.s_ac)] {
        // vb + p·(va − vb) > 2
        let slope = va - vb;
        if slope == 0.0 {
            if vb <= CLASSICAL_BOUND {
                return None;
            }
            continue;
        }
        let root = (CLASSICAL_BOUND - vb) / slope;
        if slope > 0.0 {
            lo = lo.max(root);
        } else {
            hi = hi.min(root);
        }
    }
    (lo < hi).then_some((lo, hi))
}

/// Which generator supports a stretch of the frontier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Segment {
    Mix12,
    Mix13,
    Mix23,
    Det1,
    Det2,
    Det3,
}

impl Segment {
    fn between(a: Lambda, b: Lambda) -> Segment {
        use Lambda::*;
        match (a.min(b), a.max(b)) {
            (BasisProjection, BasisProjection) => Segment::Det1,
            (IdentityMeasurement, IdentityMeasurement) => Segment::Det2,
            (Mixed, Mixed) => Segment::Det3,
            (BasisProjection, IdentityMeasurement) => Segment::Mix12,
            (BasisProjection, Mixed) => Segment::Mix13,
            (IdentityMeasurement, Mixed) => Segment::Mix23,
            _ => unreachable!("ordered pair"),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Segment::Mix12 => "mix12",
            Segment::Mix13 => "mix13",
            Segment::Mix23 => "mix23",
            Segment::Det1 => "det1",
            Segment::Det2 => "det2",
            Segment::Det3 => "det3",
        }
    }
}

impl std::str::FromStr for Segment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mix12" => Segment::Mix12,
            "mix13" => Segment::Mix13,
            "mix23" => Segment::Mix23,
            "det1" => Segment::Det1,
            "det2" => Segment::Det2,
            "det3" => Segment::Det3,
            other => return Err(Error::invalid(format!("unknown segment label '{other}'"))),
        })
    }
}

/// Hull vertex: a deterministic point, labelled with the segment that
/// arrives at it (the first vertex carries the label of the first segment).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub s_ab: f64,
    pub s_ac: f64,
    pub segment: Segment,
    pub case: StrategyCase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierCurve {
    pub phi_state: f64,
    pub points: Vec<FrontierPoint>,
}

impl FrontierCurve {
    /// Linear interpolation of the envelope; `None` outside its `S_AB` span.
    pub fn s_ac_at(&self, s_ab: f64) -> Option<f64> {
        let pts = &self.points;
        let first = pts.first()?;
        let last = pts.last()?;
        if s_ab < first.s_ab || s_ab > last.s_ab {
            return None;
        }
        let idx = pts.partition_point(|p| p.s_ab < s_ab);
        if idx == 0 {
            return Some(first.s_ac);
        }
        let (a, b) = (&pts[idx - 1], &pts[idx]);
        let t = (s_ab - a.s_ab) / (b.s_ab - a.s_ab);
        Some(a.s_ac + t * (b.s_ac - a.s_ac))
    }

    /// Segment labels in order of increasing `S_AB`, repeats collapsed.
    pub fn segment_order(&self) -> Vec<Segment> {
        let mut out: Vec<Segment> = Vec::new();
        for p in &self.points {
            if out.last() != Some(&p.segment) {
                out.push(p.segment);
            }
        }
        out
    }

    /// Largest amount by which a vertex rises above the chord of its
    /// neighbours; non-positive for a concave curve.
    pub fn max_concavity_violation(&self) -> f64 {
        self.points
            .windows(3)
            .map(|w| {
                let (a, b, c) = (&w[0], &w[1], &w[2]);
                let t = (b.s_ab - a.s_ab) / (c.s_ab - a.s_ab);
                let chord = a.s_ac + t * (c.s_ac - a.s_ac);
                chord - b.s_ac
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Minimum number of samples per deterministic curve.
pub const MIN_FRONTIER_SAMPLES: usize = 16;
pub const DEFAULT_FRONTIER_SAMPLES: usize = 20_000;

fn cross(o: &(ChshPair, StrategyCase), a: &(ChshPair, StrategyCase), b: &(ChshPair, StrategyCase)) -> f64 {
    (a.0.s_ab - o.0.s_ab) * (b.0.s_ac - o.0.s_ac) - (a.0.s_ac - o.0.s_ac) * (b.0.s_ab - o.0.s_ab)
}

/// Upper concave envelope of every achievable `(S_AB, S_AC)` under shared
/// randomness, from the point of largest `S_AC` to the point of largest
/// `S_AB`.
///
/// The basis-projection and mixed curves are each sampled at `n_points`
/// angles spread over a full turn; the identity strategy contributes its
/// single optimal point.
pub fn full_frontier(phi_state: f64, n_points: usize) -> Result<FrontierCurve> {
    check_phi_state(phi_state)?;
    if n_points < MIN_FRONTIER_SAMPLES {
        return Err(Error::invalid(format!(
            "frontier needs at least {MIN_FRONTIER_SAMPLES} samples per curve, got {n_points}"
        )));
    }
    let chi = optimal_chi(phi_state)?.chi;
    let mut samples: Vec<(ChshPair, StrategyCase)> = [Lambda::BasisProjection, Lambda::Mixed]
        .into_par_iter()
        .flat_map_iter(|lambda| {
            (0..n_points).map(move |k| {
                let case = StrategyCase::new(lambda, TAU * k as f64 / n_points as f64);
                (parametric_pair(&case, phi_state), case)
            })
        })
        .collect();
    let identity = StrategyCase::identity_measurement(chi);
    samples.push((parametric_pair(&identity, phi_state), identity));

    samples.sort_by(|a, b| {
        a.0.s_ab
            .total_cmp(&b.0.s_ab)
            .then(a.0.s_ac.total_cmp(&b.0.s_ac))
    });
    // Equal abscissae: keep the highest point only.
    let mut dedup: Vec<(ChshPair, StrategyCase)> = Vec::with_capacity(samples.len());
    for s in samples {
        match dedup.last_mut() {
            Some(last) if last.0.s_ab == s.0.s_ab => *last = s,
            _ => dedup.push(s),
        }
    }

    let mut hull: Vec<(ChshPair, StrategyCase)> = Vec::new();
    for s in dedup {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &s) >= 0.0 {
            hull.pop();
        }
        hull.push(s);
    }

    let apex = hull
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.s_ac.partial_cmp(&b.1 .0.s_ac).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let hull = &hull[apex..];

    let points = hull
        .iter()
        .enumerate()
        .map(|(i, (v, case))| {
            let segment = if hull.len() == 1 {
                Segment::between(case.lambda, case.lambda)
            } else {
                let (a, b) = if i == 0 { (0, 1) } else { (i - 1, i) };
                Segment::between(hull[a].1.lambda, hull[b].1.lambda)
            };
            FrontierPoint { s_ab: v.s_ab, s_ac: v.s_ac, segment, case: *case }
        })
        .collect();
    Ok(FrontierCurve { phi_state, points })
}

/// Cell grid for double-violation maps: swept angle in degrees, and the
/// probability of the first strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub angle_min_deg: f64,
    pub angle_max_deg: f64,
    pub angle_step_deg: f64,
    pub p_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { angle_min_deg: 0.0, angle_max_deg: 180.0, angle_step_deg: 0.1, p_step: 0.001 }
    }
}

/// Minimum number of grid lines along each axis.
pub const MIN_GRID_LINES: usize = 50;

fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::invalid(format!("invalid grid axis [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if n < MIN_GRID_LINES {
        return Err(Error::invalid(format!(
            "grid axis has {n} lines, at least {MIN_GRID_LINES} required"
        )));
    }
    if n > 10_000_000 {
        return Err(Error::invalid("grid axis is too fine"));
    }
    Ok((0..n).map(|i| lo + i as f64 * step).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap {
    pub pair: (Lambda, Lambda),
    /// Swept angle of the first strategy, degrees.
    pub angles_deg: Vec<f64>,
    /// Probability of the first strategy.
    pub ps: Vec<f64>,
    /// Angle held fixed for the second strategy, degrees.
    pub fixed_setting_deg: f64,
    /// Row-major: `mask[i * ps.len() + j]` for angle `i`, probability `j`.
    pub mask: Vec<bool>,
}

impl RegionMap {
    pub fn get(&self, angle_idx: usize, p_idx: usize) -> bool {
        self.mask[angle_idx * self.ps.len() + p_idx]
    }

    pub fn area_fraction(&self) -> f64 {
        if self.mask.is_empty() {
            return 0.0;
        }
        self.mask.iter().filter(|&&m| m).count() as f64 / self.mask.len() as f64
    }
}

/// Angle held fixed for the second strategy of a region map: the optimal
/// `χ` for identity measurement, otherwise the equal-point optimum.
pub fn region_fixed_setting(phi_state: f64, pair: (Lambda, Lambda)) -> Result<f64> {
    match pair.1 {
        Lambda::IdentityMeasurement => Ok(optimal_chi(phi_state)?.chi),
        lambda => Ok(equal_point(phi_state, pair)?.settings.get(lambda)),
    }
}

/// Double-violation map over the first strategy's angle and its probability.
pub fn region_map(phi_state: f64, pair: (Lambda, Lambda), grid: &GridSpec) -> Result<RegionMap> {
    check_pair(pair)?;
    check_phi_state(phi_state)?;
    let fixed = region_fixed_setting(phi_state, pair)?;
    region_map_with_fixed(phi_state, pair, fixed, grid)
}

pub fn region_map_with_fixed(
    phi_state: f64,
    pair: (Lambda, Lambda),
    fixed_setting: f64,
    grid: &GridSpec,
) -> Result<RegionMap> {
    check_pair(pair)?;
    check_phi_state(phi_state)?;
    let angles_deg = axis(grid.angle_min_deg, grid.angle_max_deg, grid.angle_step_deg)?;
    let ps = axis(0.0, 1.0, grid.p_step)?;
    let second = parametric_pair(&StrategyCase::new(pair.1, fixed_setting), phi_state);
    let mask: Vec<bool> = angles_deg
        .par_iter()
        .flat_map_iter(|&deg| {
            let first = parametric_pair(&StrategyCase::new(pair.0, deg.to_radians()), phi_state);
            ps.iter().map(move |&p| first.lerp(&second, p).violates_both())
        })
        .collect();
    Ok(RegionMap {
        pair,
        angles_deg,
        ps,
        fixed_setting_deg: fixed_setting.to_degrees(),
        mask,
    })
}

/// State angle maximising the equal-point value of a pair: a coarse sweep
/// over `[0, 45°]` followed by golden-section refinement to `tol_deg`.
pub fn optimal_phi_state(pair: (Lambda, Lambda), coarse_step_deg: f64, tol_deg: f64) -> Result<(f64, EqualPointResult)> {
    check_pair(pair)?;
    let cfg = OptimizerConfig { angle_step_deg: 0.5, ..OptimizerConfig::default() };
    let value = |deg: f64| {
        equal_point_with(deg.to_radians(), pair, &cfg)
            .map(|r| r.s_star)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let n = (45.0 / coarse_step_deg).round() as usize;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=n {
        let deg = (i as f64 * coarse_step_deg).min(45.0);
        let v = value(deg);
        if v > best.0 {
            best = (v, deg);
        }
    }
    let lo = (best.1 - coarse_step_deg).max(0.0);
    let hi = (best.1 + coarse_step_deg).min(45.0);
    let (deg, _) = golden_max(value, lo, hi, tol_deg);
    let result = equal_point_with(deg.to_radians(), pair, &cfg)?;
    Ok((deg, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    #[test]
    fn tangent_line_and_swap() {
        let a = ChshPair::new(0.0, 2.0 * SQRT_2);
        let b = ChshPair::new(6f64.sqrt(), 2.0 * 75f64.to_radians().sin());
        let t = TangentLine::through(a, b).unwrap();
        assert!(!t.swapped);
        let expected = 2.0 * SQRT_2 * (3f64.sqrt() - 1.0);
        assert!((t.equal_value().unwrap() - expected).abs() < 1e-12);

        let c = ChshPair::new(1.0, 3.0);
        let d = ChshPair::new(1.0, 0.5);
        let t = TangentLine::through(c, d).unwrap();
        assert!(t.swapped);
        assert!((t.equal_value().unwrap() - 1.0).abs() < 1e-15);
        assert!(TangentLine::through(c, c).is_none());
    }

    #[test]
    fn best_mixture_crossing_and_endpoints() {
        let (v, p, crossing) = best_mixture(ChshPair::new(3.0, 1.0), ChshPair::new(1.0, 3.0));
        assert!(crossing);
        assert!((v - 2.0).abs() < 1e-15 && (p - 0.5).abs() < 1e-15);
        let (v, p, crossing) = best_mixture(ChshPair::new(3.0, 1.0), ChshPair::new(2.5, 0.2));
        assert!(!crossing);
        assert_eq!((v, p), (1.0, 1.0));
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn equal_pair_rejected() {
        assert!(equal_point(FRAC_PI_4, (Lambda::Mixed, Lambda::Mixed)).is_err());
    }

    #[test]
    fn interval_from_points_cases() {
        let a = ChshPair::new(6f64.sqrt(), 2.0 * 75f64.to_radians().sin());
        let b = ChshPair::new(0.0, 2.0 * SQRT_2);
        let (lo, hi) = interval_from_points(a, b).unwrap();
        assert!((lo - 2.0 / 6f64.sqrt()).abs() < 1e-12);
        assert!((hi - (4.0 - 2.0 * SQRT_2) / (3.0 - 3f64.sqrt())).abs() < 1e-12);
        assert!(interval_from_points(ChshPair::new(1.0, 1.0), ChshPair::new(1.5, 1.5)).is_none());
        assert!(interval_from_points(ChshPair::new(2.5, 2.5), ChshPair::new(2.5, 2.5)) == Some((0.0, 1.0)));
    }

    #[test]
    fn product_state_interval_is_empty() {
        for pair in [(Lambda::BasisProjection, Lambda::IdentityMeasurement), (Lambda::BasisProjection, Lambda::Mixed)] {
            for deg in [0.0, 30.0, 75.0, 120.0] {
                let s = Settings { phi_meas: f64::to_radians(deg), chi: f64::to_radians(90.0 - deg), theta: f64::to_radians(deg / 2.0) };
                assert_eq!(violation_interval(0.0, pair, &s).unwrap(), None);
            }
        }
    }

    #[test]
    fn frontier_rejects_too_few_samples() {
        assert!(full_frontier(FRAC_PI_4, 8).is_err());
    }

    #[test]
    fn grid_rejects_coarse_axes() {
        let grid = GridSpec { angle_step_deg: 10.0, ..GridSpec::default() };
        assert!(region_map(FRAC_PI_4, (Lambda::BasisProjection, Lambda::IdentityMeasurement), &grid).is_err());
    }

    #[test]
    fn segment_labels_round_trip() {
        for s in [Segment::Mix12, Segment::Mix13, Segment::Mix23, Segment::Det1, Segment::Det2, Segment::Det3] {
            assert_eq!(s.as_str().parse::<Segment>().unwrap(), s);
        }
        assert!("mix".parse::<Segment>().is_err());
    }
}
