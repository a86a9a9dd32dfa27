//! Discrete-time simple-motion simulation used to corroborate or falsify
//! verdicts with one-sided certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coalition::{
    classify_initial_state_with_band, GameConfig, Verdict, VerdictKind, DEFAULT_BAND,
};
use crate::error::{Error, Result};
use crate::evasion::{auto_extent, escape_margin_supremum, MarginReport, OracleParams};
use crate::geometry::Point3;

const UNIT_TOL: f64 = 1e-12;

pub fn capture_tolerance(dt: f64) -> f64 {
    (2.0 * dt).max(1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimStatus {
    Running,
    Captured { time: f64, pursuer: usize },
    Escaped { time: f64, crossing: Point3 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub pursuers: Vec<Point3>,
    pub evader: Point3,
    pub status: SimStatus,
}

impl SimState {
    pub fn new(config: &GameConfig) -> Result<Self> {
        let evader = config.evader.ok_or(Error::MissingEvader)?;
        Ok(SimState {
            time: 0.0,
            pursuers: config.pursuers.clone(),
            evader,
            status: SimStatus::Running,
        })
    }

    /// Closest pursuer and its distance to the evader.
    pub fn nearest_pursuer(&self) -> (usize, f64) {
        self.pursuers
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.distance(self.evader)))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Distance from the evader to the closest pursuer.
    pub fn clearance(&self) -> f64 {
        self.nearest_pursuer().1
    }

    pub fn is_running(&self) -> bool {
        self.status == SimStatus::Running
    }
}

fn check_unit(h: Point3, index: usize) -> Result<()> {
    if !h.is_finite() || (h.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::NonUnitHeading(index));
    }
    Ok(())
}

/// One forward-Euler step. Heading index 0 is the evader, `i + 1` pursuer `i`
/// in `NonUnitHeading` errors. A finished state is returned unchanged.
pub fn step(
    state: &SimState,
    evader_heading: Point3,
    pursuer_headings: &[Point3],
    dt: f64,
) -> Result<SimState> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositiveDt(dt));
    }
    if pursuer_headings.len() != state.pursuers.len() {
        return Err(Error::HeadingCount {
            expected: state.pursuers.len(),
            got: pursuer_headings.len(),
        });
    }
    check_unit(evader_heading, 0)?;
    for (i, h) in pursuer_headings.iter().enumerate() {
        check_unit(*h, i + 1)?;
    }
    let mut next = state.clone();
    advance(&mut next, evader_heading, pursuer_headings, dt);
    Ok(next)
}

fn nearest_sq(pursuers: &[Point3], evader: Point3) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, p) in pursuers.iter().enumerate() {
        let d = (*p - evader).norm_sq();
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// In-place step with validated inputs; no-op once the run has ended.
fn advance(state: &mut SimState, evader_heading: Point3, pursuer_headings: &[Point3], dt: f64) {
    if !state.is_running() {
        return;
    }
    let tol = capture_tolerance(dt);
    let tol_sq = tol * tol;
    let (who, d) = nearest_sq(&state.pursuers, state.evader);
    if d <= tol_sq {
        state.status = SimStatus::Captured {
            time: state.time,
            pursuer: who,
        };
        return;
    }

    let e1 = state.evader + evader_heading * dt;
    // a crossing inside this step moves everybody to the crossing instant
    let h = if e1.z <= 0.0 {
        state.evader.z / (state.evader.z - e1.z) * dt
    } else {
        dt
    };
    state.time += h;
    state.evader = if e1.z <= 0.0 {
        let mut c = state.evader + evader_heading * h;
        c.z = 0.0;
        c
    } else {
        e1
    };
    for (p, dir) in state.pursuers.iter_mut().zip(pursuer_headings) {
        *p = *p + *dir * h;
    }
    let (who, d) = nearest_sq(&state.pursuers, state.evader);
    if d <= tol_sq {
        state.status = SimStatus::Captured {
            time: state.time,
            pursuer: who,
        };
    } else if e1.z <= 0.0 {
        state.status = SimStatus::Escaped {
            time: state.time,
            crossing: state.evader,
        };
    }
}

/// Where an equal-speed pursuer starting at `pursuer` meets an evader running
/// from `evader` along unit `dir`, if it can.
pub fn intercept_point(pursuer: Point3, evader: Point3, dir: Point3) -> Option<Point3> {
    // |e + τu - p| = τ  ⇒  |d|² + 2τ u·d = 0
    let d = evader - pursuer;
    let ud = dir.dot(d);
    if ud >= 0.0 {
        return None;
    }
    let tau = -d.norm_sq() / (2.0 * ud);
    Some(evader + dir * tau)
}

fn heading_to(from: Point3, to: Point3) -> Option<Point3> {
    (to - from).normalized()
}

/// Straight run of the evader at `target` against constant-bearing pursuers.
pub fn run_straight_line_escape(config: &GameConfig, target: Point3, dt: f64) -> Result<SimState> {
    run_straight_line_escape_observed(config, target, dt, |_| {})
}

/// As [`run_straight_line_escape`], calling `observe` on the initial state
/// and after every step.
pub fn run_straight_line_escape_observed<F>(
    config: &GameConfig,
    target: Point3,
    dt: f64,
    mut observe: F,
) -> Result<SimState>
where
    F: FnMut(&SimState),
{
    if target.z != 0.0 {
        return Err(Error::TargetNotOnPlane);
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::NonPositiveDt(dt));
    }
    let mut state = SimState::new(config)?;
    let run = state.evader.distance(target);
    let dir = heading_to(state.evader, target).ok_or(Error::EvaderNotInPlay)?;
    let aims: Vec<Option<Point3>> = state
        .pursuers
        .iter()
        .map(|p| intercept_point(*p, state.evader, dir))
        .collect();
    // constant bearing toward the intercept, pure pursuit without one or once there
    let mut headings: Vec<Option<Point3>> = state
        .pursuers
        .iter()
        .zip(&aims)
        .map(|(p, aim)| aim.and_then(|a| heading_to(*p, a)))
        .collect();
    let mut buf = vec![dir; headings.len()];
    let t_max = 10.0 * run;

    observe(&state);
    while state.is_running() && state.time <= t_max {
        for (i, p) in state.pursuers.iter().enumerate() {
            if let (Some(h), Some(aim)) = (headings[i], aims[i]) {
                if (*p - aim).norm_sq() > 0.25 * dt * dt {
                    buf[i] = h;
                    continue;
                }
                headings[i] = None;
            }
            buf[i] = heading_to(*p, state.evader).unwrap_or(dir);
        }
        advance(&mut state, dir, &buf, dt);
        observe(&state);
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidationOutcome {
    Pass,
    /// An escape the verdict says cannot happen, or a failed escape the
    /// verdict says must succeed.
    Fail {
        target: Point3,
        clearance: f64,
    },
    /// No falsifiable claim: on the barrier, or too close to it for `dt`.
    Informational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub oracle: MarginReport,
    pub outcome: ValidationOutcome,
    pub trials: usize,
    pub escapes: usize,
    /// Largest crossing clearance among escapes (`None` without escapes).
    pub max_escape_clearance: Option<f64>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !matches!(self.outcome, ValidationOutcome::Fail { .. })
    }
}

fn escape_clearance(state: &SimState) -> Option<f64> {
    match state.status {
        SimStatus::Escaped { .. } => Some(state.clearance()),
        _ => None,
    }
}

/// Simulate straight-line escapes to corroborate the analytic verdict.
///
/// Evader-win configurations run toward the oracle witness and must escape
/// with clearance at least `supremum - 10·dt`; when the supremum is below
/// `10·dt` nothing is simulated and the report is informational. Pursuer-win configurations try the
/// witness (when inside the base oracle square) plus `trials` uniform random
/// targets in that square and must never escape with clearance above `10·dt`.
pub fn validate_verdict(
    config: &GameConfig,
    trials: usize,
    dt: f64,
    seed: u64,
    oracle: &OracleParams,
) -> Result<ValidationReport> {
    let evader = config.evader.ok_or(Error::MissingEvader)?;
    let verdict = classify_initial_state_with_band(config, DEFAULT_BAND)?;
    let report = escape_margin_supremum(evader, &config.pursuers, oracle)?;
    validate_with(config, verdict, report, trials, dt, seed, oracle)
}

/// [`validate_verdict`] with a precomputed verdict and oracle report.
pub fn validate_with(
    config: &GameConfig,
    verdict: Verdict,
    oracle_report: MarginReport,
    trials: usize,
    dt: f64,
    seed: u64,
    oracle: &OracleParams,
) -> Result<ValidationReport> {
    let slack = 10.0 * dt;
    let mut out = ValidationReport {
        verdict,
        oracle: oracle_report,
        outcome: ValidationOutcome::Informational,
        trials: 0,
        escapes: 0,
        max_escape_clearance: None,
    };
    match verdict.kind {
        VerdictKind::OnBarrier => {}
        VerdictKind::EvaderWin if oracle_report.supremum > slack => {
            let target = oracle_report.witness;
            let end = run_straight_line_escape(config, target, dt)?;
            out.trials = 1;
            let clearance = escape_clearance(&end);
            if let Some(c) = clearance {
                out.escapes = 1;
                out.max_escape_clearance = Some(c);
            }
            out.outcome = match clearance {
                Some(c) if c > 0.0 && c >= oracle_report.supremum - slack => {
                    ValidationOutcome::Pass
                }
                c => ValidationOutcome::Fail {
                    target,
                    clearance: c.unwrap_or(0.0),
                },
            };
        }
        VerdictKind::EvaderWin => {}
        VerdictKind::PursuerWin => {
            let evader = config.evader.ok_or(Error::MissingEvader)?;
            let half = oracle
                .extent
                .unwrap_or_else(|| auto_extent(evader, &config.pursuers));
            let w = oracle_report.witness;
            let witness_inside = (w.x - evader.x).abs() <= half && (w.y - evader.y).abs() <= half;
            let targets: Vec<Point3> = witness_inside
                .then_some(w)
                .into_iter()
                .chain((0..trials).map(|k| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(k as u64);
                    Point3::new(
                        evader.x + rng.random_range(-half..half),
                        evader.y + rng.random_range(-half..half),
                        0.0,
                    )
                }))
                .collect();
            let ends = oracle.exec.map(targets.len(), |k| {
                run_straight_line_escape(config, targets[k], dt)
            });
            out.trials = targets.len();
            out.outcome = ValidationOutcome::Pass;
            for (target, end) in targets.iter().zip(ends) {
                let Some(c) = escape_clearance(&end?) else {
                    continue;
                };
                out.escapes += 1;
                out.max_escape_clearance =
                    Some(out.max_escape_clearance.map_or(c, |m: f64| m.max(c)));
                if c > slack && out.passed() {
                    out.outcome = ValidationOutcome::Fail {
                        target: *target,
                        clearance: c,
                    };
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn state(e: Point3, ps: Vec<Point3>) -> SimState {
        SimState {
            time: 0.0,
            pursuers: ps,
            evader: e,
            status: SimStatus::Running,
        }
    }

    const DOWN: Point3 = Point3::new(0.0, 0.0, -1.0);

    #[test]
    fn euler_step() {
        let s = state(p(0., 0., 1.), vec![p(50., 0., 1.)]);
        let n = step(&s, DOWN, &[p(1., 0., 0.)], 0.5).unwrap();
        assert_eq!(n.evader, p(0., 0., 0.5));
        assert_eq!(n.pursuers[0], p(50.5, 0., 1.));
        assert_eq!(n.time, 0.5);
        assert!(n.is_running());
    }

    #[test]
    fn interpolated_crossing() {
        let s = state(p(0., 0., 0.1), vec![p(50., 0., 1.)]);
        let n = step(&s, DOWN, &[p(1., 0., 0.)], 0.2).unwrap();
        let SimStatus::Escaped { time, crossing } = n.status else {
            panic!("{:?}", n.status)
        };
        assert_abs_diff_eq!(time, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(crossing.distance(Point3::ORIGIN), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn capture_at_tiny_distance() {
        let s = state(p(0., 0., 1.), vec![p(1e-10, 0., 1.)]);
        let n = step(&s, DOWN, &[DOWN], 1e-12).unwrap();
        assert!(matches!(n.status, SimStatus::Captured { pursuer: 0, .. }));
    }

    #[test]
    fn step_errors() {
        let s = state(p(0., 0., 1.), vec![p(5., 0., 1.)]);
        assert_eq!(
            step(&s, p(0., 0., -2.), &[DOWN], 0.1),
            Err(Error::NonUnitHeading(0))
        );
        assert_eq!(
            step(&s, DOWN, &[p(1., 1., 0.)], 0.1),
            Err(Error::NonUnitHeading(1))
        );
        assert_eq!(step(&s, DOWN, &[DOWN], 0.0), Err(Error::NonPositiveDt(0.0)));
        assert_eq!(
            step(&s, DOWN, &[], 0.1),
            Err(Error::HeadingCount {
                expected: 1,
                got: 0
            })
        );
    }

    #[test]
    fn collinear_chase_keeps_gap() {
        let cfg = GameConfig::new(vec![p(0., 0., 3.)], Some(p(0., 0., 1.))).unwrap();
        let end = run_straight_line_escape(&cfg, Point3::ORIGIN, 1e-3).unwrap();
        let SimStatus::Escaped { time, .. } = end.status else {
            panic!("{:?}", end.status)
        };
        assert_abs_diff_eq!(time, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(end.clearance(), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn mirror_pursuer_captures_every_run() {
        let cfg = GameConfig::new(vec![p(0., 0., -1.)], Some(p(0., 0., 2.))).unwrap();
        for target in [p(0., 0., 0.), p(3., -1., 0.), p(-20., 7., 0.)] {
            let end = run_straight_line_escape(&cfg, target, 1e-3).unwrap();
            assert!(
                matches!(end.status, SimStatus::Captured { .. }),
                "{target:?}"
            );
        }
        assert_eq!(
            run_straight_line_escape(&cfg, p(0., 0., 1.), 1e-3),
            Err(Error::TargetNotOnPlane)
        );
    }

    #[test]
    fn validation_examples() {
        let params = OracleParams::default();
        let cfg = GameConfig::new(vec![p(0., 0., 3.)], Some(p(0., 0., 1.))).unwrap();
        let r = validate_verdict(&cfg, 10, 1e-3, 1, &params).unwrap();
        assert_eq!(r.verdict.kind, VerdictKind::EvaderWin);
        assert_eq!(r.outcome, ValidationOutcome::Pass);
        assert!(r.max_escape_clearance.unwrap() > 1.9);

        let cfg = GameConfig::new(vec![p(0., 0., -1.)], Some(p(0., 0., 2.))).unwrap();
        let r = validate_verdict(&cfg, 100, 1e-3, 1, &params).unwrap();
        assert_eq!(r.verdict.kind, VerdictKind::PursuerWin);
        assert_eq!(r.outcome, ValidationOutcome::Pass);
        assert_eq!(r.escapes, 0);

        let cfg = GameConfig::new(vec![p(0., 0., -1.)], Some(p(0., 0., 1.))).unwrap();
        let r = validate_verdict(&cfg, 10, 1e-3, 1, &params).unwrap();
        assert_eq!(r.outcome, ValidationOutcome::Informational);
    }

    #[test]
    fn runs_are_deterministic() {
        let cfg =
            GameConfig::new(vec![p(1., 2., 0.5), p(-1., 0., 2.)], Some(p(0.2, 0.1, 1.5))).unwrap();
        let record = || {
            let mut trace = Vec::new();
            run_straight_line_escape_observed(&cfg, p(4., -3., 0.), 1e-3, |s| {
                trace.push(s.clone())
            })
            .unwrap();
            trace
        };
        assert_eq!(record(), record());
    }
}
