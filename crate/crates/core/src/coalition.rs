//! Any number of pursuers: active-pursuer detection, active coalitions, the
//! assembled barrier and the winner verdict.
//!
//! On the target plane every pursuer `k` has an arrival-time "cell"
//! `{t : |t - p_k| < |t - p_m| for all m ≠ k}`. Squaring cancels the
//! quadratic term, so each comparison is an open half-plane and a cell is an
//! intersection of half-planes. Pursuers with empty cells never matter.
//! Among the rest, a triple whose equal-time point is reached by no other
//! active pursuer first is an active coalition; its spherical cap is one
//! piece of the barrier, and the coalition triangles tile the convex hull of
//! the active projections.

use crate::barrier::{push_unique, ArcPiece, BarrierPiece, CapPiece};
use crate::error::{Error, Result};
use crate::geometry::{
    orient2d, planar_hull, planar_segment_distance, polygon_area, Point3, EPS_GEO,
};
use crate::pair::{arc_unchecked, pair_barrier};
use crate::par::Exec;
use crate::triple::{cap_unchecked, single_barrier};

/// Default verdict band on analytic signed distances.
pub const DEFAULT_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    pub pursuers: Vec<Point3>,
    pub evader: Option<Point3>,
}

impl GameConfig {
    /// Validated configuration in the canonical frame.
    pub fn new(pursuers: Vec<Point3>, evader: Option<Point3>) -> Result<Self> {
        if pursuers.is_empty() {
            return Err(Error::EmptyPursuerSet);
        }
        for (i, p) in pursuers.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::NonFinite(format!("pursuers[{i}]")));
            }
        }
        for i in 0..pursuers.len() {
            for j in (i + 1)..pursuers.len() {
                if pursuers[i].distance(pursuers[j]) <= EPS_GEO {
                    return Err(Error::DuplicatePlayers(
                        format!("pursuers[{i}]"),
                        format!("pursuers[{j}]"),
                    ));
                }
            }
        }
        if let Some(e) = evader {
            if !e.is_finite() {
                return Err(Error::NonFinite("evader".into()));
            }
            if !(e.z > 0.0) {
                return Err(Error::EvaderNotInPlay);
            }
            if let Some(i) = pursuers.iter().position(|p| p.distance(e) <= EPS_GEO) {
                return Err(Error::DuplicatePlayers(
                    "evader".into(),
                    format!("pursuers[{i}]"),
                ));
            }
        }
        Ok(GameConfig { pursuers, evader })
    }
}

/// Active coalitions. All indices refer to the original pursuer list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoalitionSet {
    pub active: Vec<usize>,
    pub triples: Vec<[usize; 3]>,
    pub pairs: Vec<[usize; 2]>,
    pub singles: Vec<usize>,
}

fn check_distinct(pursuers: &[Point3]) -> Result<()> {
    if pursuers.is_empty() {
        return Err(Error::EmptyPursuerSet);
    }
    for i in 0..pursuers.len() {
        for j in (i + 1)..pursuers.len() {
            if pursuers[i].distance(pursuers[j]) <= EPS_GEO {
                return Err(Error::CoincidentPursuers(i, j));
            }
        }
    }
    Ok(())
}

/// Mirror-image pursuers (same column, same |z|) reach every point of the
/// target plane together; only the one in the play subspace is kept.
fn shadowing_twin(pursuers: &[Point3], k: usize) -> Option<usize> {
    let pk = pursuers[k];
    (0..pursuers.len()).find(|&m| {
        m != k
            && pk.planar_distance_sq(pursuers[m]) <= EPS_GEO * EPS_GEO
            && (pk.z.abs() - pursuers[m].z.abs()).abs() <= EPS_GEO
    })
}

/// Clip the convex polygon `poly` to `n·u <= c`.
fn clip(poly: &[(f64, f64)], n: (f64, f64), c: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for idx in 0..poly.len() {
        let a = poly[idx];
        let b = poly[(idx + 1) % poly.len()];
        let da = n.0 * a.0 + n.1 * a.1 - c;
        let db = n.0 * b.0 + n.1 * b.1 - c;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let s = da / (da - db);
            out.push((a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1)));
        }
    }
    out
}

/// Does pursuer `k` reach some target-plane point strictly first, with an
/// `EPS_GEO` disc of slack around it?
fn has_open_cell(pursuers: &[Point3], k: usize, twin: Option<usize>) -> bool {
    let pk = pursuers[k];
    let scale = pursuers
        .iter()
        .map(|p| (p.x - pk.x).abs().max((p.y - pk.y).abs()).max(p.z.abs()))
        .fold(1.0, f64::max);
    let m = 1e6 * scale;
    let mut poly = vec![(-m, -m), (m, -m), (m, m), (-m, m)];
    for (j, pj) in pursuers.iter().enumerate() {
        if j == k || Some(j) == twin {
            continue;
        }
        // with u = t - proj(p_k): 2 d·u < |d|² + z_j² - z_k²
        let (dx, dy) = (pj.x - pk.x, pj.y - pk.y);
        let len = (dx * dx + dy * dy).sqrt();
        let rhs = dx * dx + dy * dy + pj.z * pj.z - pk.z * pk.z;
        if len <= EPS_GEO {
            if rhs <= 0.0 {
                return false;
            }
            continue;
        }
        poly = clip(&poly, (dx / len, dy / len), rhs / (2.0 * len) - EPS_GEO);
        if poly.is_empty() {
            return false;
        }
    }
    true
}

pub fn active_pursuers(pursuers: &[Point3]) -> Result<Vec<usize>> {
    active_pursuers_with(pursuers, Exec::default())
}

pub fn active_pursuers_with(pursuers: &[Point3], exec: Exec) -> Result<Vec<usize>> {
    check_distinct(pursuers)?;
    let flags = exec.map(pursuers.len(), |k| {
        let twin = shadowing_twin(pursuers, k);
        if let Some(t) = twin {
            // keep the twin with z > 0
            if pursuers[t].z > pursuers[k].z {
                return false;
            }
        }
        has_open_cell(pursuers, k, twin)
    });
    Ok(flags
        .into_iter()
        .enumerate()
        .filter_map(|(k, a)| a.then_some(k))
        .collect())
}

enum TripleOutcome {
    Coalition,
    Rejected,
    Tie(usize),
}

fn test_triple(pursuers: &[Point3], active: &[usize], t: [usize; 3]) -> TripleOutcome {
    let [a, b, c] = t.map(|i| pursuers[i]);
    if 0.5 * orient2d(a, b, c).abs() <= EPS_GEO {
        return TripleOutcome::Rejected;
    }
    let cap = cap_unchecked(a, b, c);
    let mut tie = None;
    for &m in active {
        if t.contains(&m) {
            continue;
        }
        let gap = pursuers[m].distance(cap.center) - cap.radius;
        if gap < -EPS_GEO {
            return TripleOutcome::Rejected;
        }
        if gap <= EPS_GEO && tie.is_none() {
            tie = Some(m);
        }
    }
    match tie {
        Some(m) => TripleOutcome::Tie(m),
        None => TripleOutcome::Coalition,
    }
}

pub fn active_triples(pursuers: &[Point3], active: &[usize]) -> Result<CoalitionSet> {
    active_triples_with(pursuers, active, Exec::default())
}

pub fn active_triples_with(
    pursuers: &[Point3],
    active: &[usize],
    exec: Exec,
) -> Result<CoalitionSet> {
    let mut set = CoalitionSet {
        active: active.to_vec(),
        ..Default::default()
    };
    match active.len() {
        0 => return Err(Error::EmptyPursuerSet),
        1 => {
            set.singles.push(active[0]);
            return Ok(set);
        }
        _ => {}
    }

    if let Some(order) = collinear_order(pursuers, active) {
        set.pairs = order.windows(2).map(|w| [w[0], w[1]]).collect();
        return Ok(set);
    }

    let mut candidates = Vec::new();
    for (x, &i) in active.iter().enumerate() {
        for (y, &j) in active.iter().enumerate().skip(x + 1) {
            for &k in active.iter().skip(y + 1) {
                candidates.push([i, j, k]);
            }
        }
    }
    let outcomes = exec.map(candidates.len(), |n| {
        test_triple(pursuers, active, candidates[n])
    });
    for (t, outcome) in candidates.iter().zip(outcomes) {
        match outcome {
            TripleOutcome::Coalition => set.triples.push(*t),
            TripleOutcome::Rejected => {}
            TripleOutcome::Tie(m) => {
                return Err(Error::DegenerateConfiguration(format!(
                    "pursuers {}, {}, {} and {} are equidistant from one target-plane point",
                    t[0], t[1], t[2], m
                )))
            }
        }
    }

    // the coalition triangles must tile the hull of the active projections
    let hull = planar_hull(pursuers, active);
    let hull_area = polygon_area(pursuers, &hull);
    let tiled: f64 = set
        .triples
        .iter()
        .map(|t| 0.5 * orient2d(pursuers[t[0]], pursuers[t[1]], pursuers[t[2]]).abs())
        .sum();
    if (tiled - hull_area).abs() > 1e-9 * hull_area.max(1.0) {
        return Err(Error::DegenerateConfiguration(format!(
            "coalition triangles cover area {tiled} of hull area {hull_area}"
        )));
    }
    Ok(set)
}

/// Active indices sorted along their common line, or `None` if the
/// projections span a triangle.
fn collinear_order(pursuers: &[Point3], active: &[usize]) -> Option<Vec<usize>> {
    let (mut a, mut b, mut far) = (active[0], active[1], -1.0);
    for (x, &i) in active.iter().enumerate() {
        for &j in active.iter().skip(x + 1) {
            let d = pursuers[i].planar_distance_sq(pursuers[j]);
            if d > far {
                (a, b, far) = (i, j, d);
            }
        }
    }
    let len = far.sqrt();
    let (pa, pb) = (pursuers[a], pursuers[b]);
    if active
        .iter()
        .any(|&k| (orient2d(pa, pb, pursuers[k]) / len).abs() > EPS_GEO)
    {
        return None;
    }
    let dir = ((pb.x - pa.x) / len, (pb.y - pa.y) / len);
    let mut order = active.to_vec();
    order.sort_by(|&i, &j| {
        let si = (pursuers[i].x - pa.x) * dir.0 + (pursuers[i].y - pa.y) * dir.1;
        let sj = (pursuers[j].x - pa.x) * dir.0 + (pursuers[j].y - pa.y) * dir.1;
        si.total_cmp(&sj)
    });
    Some(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coalition {
    Single(usize),
    Pair(usize, usize),
    Triple(usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    PursuerWin,
    EvaderWin,
    OnBarrier,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::PursuerWin => "pursuer_win",
            VerdictKind::EvaderWin => "evader_win",
            VerdictKind::OnBarrier => "on_barrier",
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Signed analytic distance, positive on the evader's side: the barrier
    /// radius minus the evader's distance to the piece centre inside a
    /// coalition footprint, or the planar distance to the footprints outside.
    pub margin: f64,
    /// Coalition whose region decided the verdict; `None` outside all footprints.
    pub source: Option<Coalition>,
}

#[derive(Debug, Clone, Copy)]
enum Region {
    Single(usize, Point3),
    Pair([usize; 2], ArcPiece),
    Cap([usize; 3], CapPiece),
}

impl Region {
    fn coalition(&self) -> Coalition {
        match *self {
            Region::Single(i, _) => Coalition::Single(i),
            Region::Pair([i, j], _) => Coalition::Pair(i, j),
            Region::Cap([i, j, k], _) => Coalition::Triple(i, j, k),
        }
    }

    fn evader_margin(&self, q: Point3) -> Option<f64> {
        match self {
            Region::Single(_, p) => {
                (p.planar_distance_sq(q) <= EPS_GEO * EPS_GEO).then(|| p.z.abs() - q.z)
            }
            Region::Pair(_, arc) => arc.evader_margin(q),
            Region::Cap(_, cap) => cap
                .contains_projection(q, EPS_GEO)
                .then(|| cap.radius - q.distance(cap.center)),
        }
    }

    fn footprint_distance(&self, q: Point3) -> f64 {
        match self {
            Region::Single(_, p) => p.planar_distance_sq(q).sqrt(),
            Region::Pair(_, arc) => planar_segment_distance(q, arc.ends[0], arc.ends[1]),
            Region::Cap(_, cap) => cap.footprint_distance(q),
        }
    }
}

/// Barrier structure of a fixed pursuer set, reusable across evader positions.
#[derive(Debug, Clone)]
pub struct Analysis {
    pursuers: Vec<Point3>,
    coalitions: CoalitionSet,
    regions: Vec<Region>,
}

impl Analysis {
    pub fn new(pursuers: &[Point3]) -> Result<Self> {
        Self::with_exec(pursuers, Exec::default())
    }

    pub fn with_exec(pursuers: &[Point3], exec: Exec) -> Result<Self> {
        let active = active_pursuers_with(pursuers, exec)?;
        let coalitions = active_triples_with(pursuers, &active, exec)?;
        let mut regions = Vec::new();
        for &i in &coalitions.singles {
            regions.push(Region::Single(i, pursuers[i]));
        }
        for &[i, j] in &coalitions.pairs {
            regions.push(Region::Pair(
                [i, j],
                arc_unchecked(pursuers[i], pursuers[j]),
            ));
        }
        for &[i, j, k] in &coalitions.triples {
            regions.push(Region::Cap(
                [i, j, k],
                cap_unchecked(pursuers[i], pursuers[j], pursuers[k]),
            ));
        }
        Ok(Analysis {
            pursuers: pursuers.to_vec(),
            coalitions,
            regions,
        })
    }

    pub fn pursuers(&self) -> &[Point3] {
        &self.pursuers
    }

    pub fn coalitions(&self) -> &CoalitionSet {
        &self.coalitions
    }

    /// Union of all barrier pieces, duplicates merged.
    pub fn pieces(&self) -> Result<Vec<BarrierPiece>> {
        let p = &self.pursuers;
        let mut out = Vec::new();
        for &i in &self.coalitions.singles {
            push_unique(&mut out, single_barrier(p[i]));
        }
        for &[i, j] in &self.coalitions.pairs {
            for piece in pair_barrier(p[i], p[j])? {
                push_unique(&mut out, piece);
            }
        }
        for region in &self.regions {
            if let Region::Cap(_, cap) = region {
                push_unique(&mut out, BarrierPiece::Cap(*cap));
            }
        }
        Ok(out)
    }

    pub fn verdict(&self, evader: Point3, band: f64) -> Result<Verdict> {
        if !evader.is_finite() {
            return Err(Error::NonFinite("evader".into()));
        }
        if !(evader.z > 0.0) {
            return Err(Error::EvaderNotInPlay);
        }
        // union of pursuer regions: the most pursuer-favourable covering piece decides
        let mut best: Option<(f64, Coalition)> = None;
        for r in &self.regions {
            if let Some(m) = r.evader_margin(evader) {
                if best.is_none_or(|(b, _)| m < b) {
                    best = Some((m, r.coalition()));
                }
            }
        }
        Ok(match best {
            Some((margin, c)) => {
                let kind = if margin < -band {
                    VerdictKind::PursuerWin
                } else if margin > band {
                    VerdictKind::EvaderWin
                } else {
                    VerdictKind::OnBarrier
                };
                Verdict {
                    kind,
                    margin,
                    source: Some(c),
                }
            }
            None => {
                let dist = self
                    .regions
                    .iter()
                    .map(|r| r.footprint_distance(evader))
                    .fold(f64::INFINITY, f64::min);
                Verdict {
                    kind: VerdictKind::EvaderWin,
                    margin: dist,
                    source: None,
                }
            }
        })
    }
}

pub fn multi_barrier(config: &GameConfig) -> Result<Vec<BarrierPiece>> {
    Analysis::new(&config.pursuers)?.pieces()
}

pub fn classify_initial_state(config: &GameConfig) -> Result<Verdict> {
    classify_initial_state_with_band(config, DEFAULT_BAND)
}

pub fn classify_initial_state_with_band(config: &GameConfig, band: f64) -> Result<Verdict> {
    let evader = config.evader.ok_or(Error::MissingEvader)?;
    Analysis::new(&config.pursuers)?.verdict(evader, band)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn verdict(ps: &[Point3], e: Point3) -> VerdictKind {
        let cfg = GameConfig::new(ps.to_vec(), Some(e)).unwrap();
        classify_initial_state(&cfg).unwrap().kind
    }

    #[test]
    fn active_examples() {
        assert_eq!(
            active_pursuers(&[p(0., 0., 1.), p(0., 0., 2.)]).unwrap(),
            vec![0]
        );
        let ring = [
            p(1., 0., 1.),
            p(-1., 0., 1.),
            p(0., 1., 1.),
            p(0., -1., 1.),
            p(0., 0., 10.),
        ];
        assert_eq!(active_pursuers(&ring).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(active_pursuers(&[p(0., 0., 1.)]).unwrap(), vec![0]);
        assert!(matches!(
            active_pursuers(&[p(0., 0., 1.), p(0., 0., 1.)]),
            Err(Error::CoincidentPursuers(0, 1))
        ));
    }

    #[test]
    fn mirror_twins_keep_the_one_in_play() {
        assert_eq!(
            active_pursuers(&[p(0., 0., -1.), p(0., 0., 1.)]).unwrap(),
            vec![1]
        );
        assert_eq!(
            active_pursuers(&[p(0., 0., -1.), p(0., 0., 1.), p(3., 0., 1.)]).unwrap(),
            vec![1, 2]
        );
    }

    #[test]
    fn triples_examples() {
        let ps = [p(0., 0., 1.), p(4., 0., 1.), p(0., 4., 1.), p(5., 5., 1.)];
        let act = active_pursuers(&ps).unwrap();
        assert_eq!(act, vec![0, 1, 2, 3]);
        let set = active_triples(&ps, &act).unwrap();
        assert_eq!(set.triples, vec![[0, 1, 2], [1, 2, 3]]);

        let ps = [p(1., 0., 0.5), p(-1., 1., 0.2), p(0., -1., 1.)];
        let set = active_triples(&ps, &[0, 1, 2]).unwrap();
        assert_eq!(set.triples, vec![[0, 1, 2]]);
    }

    #[test]
    fn collinear_actives_become_pairs() {
        let ps = [p(0., 0., 1.), p(2., 0., 1.), p(1., 0., 1.)];
        let act = active_pursuers(&ps).unwrap();
        assert_eq!(act, vec![0, 1, 2]);
        let set = active_triples(&ps, &act).unwrap();
        assert_eq!(set.pairs, vec![[0, 2], [2, 1]]);
        assert!(set.triples.is_empty());
    }

    #[test]
    fn cospherical_quadruple_is_degenerate() {
        let ps = [p(1., 0., 1.), p(0., 1., 1.), p(-1., 0., 1.), p(0., -1., 1.)];
        let act = active_pursuers(&ps).unwrap();
        assert!(matches!(
            active_triples(&ps, &act),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn barrier_examples() {
        let cfg = GameConfig::new(vec![p(0., 0., -2.)], None).unwrap();
        let pieces = multi_barrier(&cfg).unwrap();
        assert_eq!(pieces.len(), 1);
        assert!(pieces[0].approx_eq(
            &BarrierPiece::Point(crate::barrier::PointPiece {
                location: p(0., 0., 2.)
            }),
            1e-12
        ));

        let cfg = GameConfig::new(
            vec![p(0., 0., 1.), p(4., 0., 1.), p(0., 4., 1.), p(5., 5., 1.)],
            None,
        )
        .unwrap();
        let pieces = multi_barrier(&cfg).unwrap();
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|q| matches!(q, BarrierPiece::Cap(_))));
    }

    #[test]
    fn verdict_examples() {
        assert_eq!(
            verdict(&[p(0., 0., -1.)], p(0., 0., 1.)),
            VerdictKind::OnBarrier
        );
        assert_eq!(
            verdict(&[p(0., 0., -1.)], p(0., 0., 2.)),
            VerdictKind::PursuerWin
        );
        assert_eq!(
            verdict(&[p(0., 0., -1.)], p(1., 0., 1.)),
            VerdictKind::EvaderWin
        );
        let cfg = GameConfig::new(vec![p(0., 0., -1.)], None).unwrap();
        assert_eq!(classify_initial_state(&cfg), Err(Error::MissingEvader));
    }

    #[test]
    fn config_validation() {
        assert_eq!(GameConfig::new(vec![], None), Err(Error::EmptyPursuerSet));
        assert_eq!(
            GameConfig::new(vec![p(0., 0., 1.)], Some(p(0., 0., -1.))),
            Err(Error::EvaderNotInPlay)
        );
        assert!(matches!(
            GameConfig::new(vec![p(0., 0., 1.)], Some(p(0., 0., 1.))),
            Err(Error::DuplicatePlayers(..))
        ));
    }
}
