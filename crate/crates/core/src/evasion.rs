//! Evasion spaces and the numeric escape-margin oracle.
//!
//! The evasion space against pursuer `p` is the open half-space of points the
//! evader reaches strictly first; its boundary is the perpendicular bisector
//! plane of the two players. The escape margin of a target-plane point `t` is
//!
//! ```text
//! g(t) = min_k |t - p_k| - |t - e|
//! ```
//!
//! and the evader wins iff `sup_{t ∈ T} g(t) > 0`. The oracle estimates that
//! supremum by brute-force grid search, independently of any closed-form
//! barrier, so it can arbitrate them.

use crate::error::{Error, Result};
use crate::geometry::{Point3, EPS_GEO};
use crate::par::Exec;

/// Sign band applied to oracle suprema.
pub const EPS_MARGIN: f64 = 1e-6;

/// Plane `{q : normal·q = offset}` equidistant from an evader and a pursuer.
/// `normal` points from the evader toward the pursuer, so the evasion space is
/// `normal·q < offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectorPlane {
    pub normal: Point3,
    pub offset: f64,
}

impl BisectorPlane {
    pub fn signed_distance(&self, q: Point3) -> f64 {
        self.normal.dot(q) - self.offset
    }

    /// Strictly on the evader's side.
    pub fn in_evasion_space(&self, q: Point3) -> bool {
        self.signed_distance(q) < 0.0
    }
}

pub fn bisector_plane(evader: Point3, pursuer: Point3) -> Result<BisectorPlane> {
    let d = pursuer - evader;
    if d.norm() <= EPS_GEO {
        return Err(Error::CoincidentPlayers);
    }
    let normal = d.normalized().ok_or(Error::CoincidentPlayers)?;
    let mid = (evader + pursuer) * 0.5;
    Ok(BisectorPlane {
        normal,
        offset: normal.dot(mid),
    })
}

pub fn escape_margin(t: Point3, evader: Point3, pursuers: &[Point3]) -> Result<f64> {
    if pursuers.is_empty() {
        return Err(Error::EmptyPursuerSet);
    }
    Ok(margin_unchecked(t, evader, pursuers))
}

fn margin_unchecked(t: Point3, evader: Point3, pursuers: &[Point3]) -> f64 {
    let nearest = pursuers
        .iter()
        .map(|p| t.distance(*p))
        .fold(f64::INFINITY, f64::min);
    nearest - t.distance(evader)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleParams {
    /// Grid points per side of the coarse pass.
    pub grid: usize,
    /// Grid points per side of every refinement window.
    pub refine_grid: usize,
    /// Refinement levels after the coarse pass.
    pub levels: usize,
    /// Window shrink factor per level.
    pub shrink: f64,
    /// Half-width of the coarse square; `None` means `10·(max pursuer distance + 1)`.
    pub extent: Option<f64>,
    /// Number of distinct coarse local maxima that get refined.
    pub starts: usize,
    pub exec: Exec,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            grid: 201,
            refine_grid: 41,
            levels: 6,
            shrink: 0.1,
            extent: None,
            starts: 4,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    pub supremum: f64,
    /// Arg-max on the target plane (`z = 0`).
    pub witness: Point3,
    /// False when the maximiser sits on the edge of the final search window,
    /// e.g. because the supremum is only approached at infinity.
    pub resolved: bool,
    /// Coarse half-width that was searched.
    pub extent: f64,
}

impl MarginReport {
    /// Oracle sign with a dead band: `Some(true)` evader wins, `Some(false)`
    /// pursuers win, `None` inside the band.
    pub fn evader_wins(&self, band: f64) -> Option<bool> {
        if self.supremum > band {
            Some(true)
        } else if self.supremum < -band {
            Some(false)
        } else {
            None
        }
    }
}

pub fn auto_extent(evader: Point3, pursuers: &[Point3]) -> f64 {
    let far = pursuers
        .iter()
        .map(|p| p.distance(evader))
        .fold(0.0, f64::max);
    10.0 * (far + 1.0)
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    x: f64,
    y: f64,
    value: f64,
}

impl Sample {
    /// Larger value wins; ties go to the lexicographically smaller point.
    fn beats(&self, o: &Sample) -> bool {
        match self.value.total_cmp(&o.value) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => (self.x, self.y) < (o.x, o.y),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Window {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Window {
    fn around(cx: f64, cy: f64, half: f64, clip: &Window) -> Window {
        Window {
            x0: (cx - half).max(clip.x0),
            x1: (cx + half).min(clip.x1),
            y0: (cy - half).max(clip.y0),
            y1: (cy + half).min(clip.y1),
        }
    }

    fn coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
        }
    }
}

/// Line through a point with a unit direction, both in the target plane.
type TieLine = ((f64, f64), (f64, f64));

struct Oracle<'a> {
    evader: Point3,
    extent: f64,
    pursuers: &'a [Point3],
    params: &'a OracleParams,
}

impl Oracle<'_> {
    fn eval(&self, x: f64, y: f64) -> Sample {
        let value = margin_unchecked(Point3::new(x, y, 0.0), self.evader, self.pursuers);
        Sample { x, y, value }
    }

    /// Row-major grid values over `w`.
    fn scan(&self, w: &Window, n: usize) -> Vec<Sample> {
        let rows = self.params.exec.map(n, |j| {
            let y = Window::coord(w.y0, w.y1, j, n);
            (0..n)
                .map(|i| self.eval(Window::coord(w.x0, w.x1, i, n), y))
                .collect::<Vec<_>>()
        });
        rows.into_iter().flatten().collect()
    }

    fn best(samples: &[Sample]) -> Sample {
        let mut best = samples[0];
        for s in &samples[1..] {
            if s.beats(&best) {
                best = *s;
            }
        }
        best
    }

    /// Tie structure of the three pursuers nearest to `(x, y)`: candidate
    /// points where a maximiser of `g` can sit (see [`Oracle::polish`]).
    fn tie_candidates(&self, x: f64, y: f64) -> (Vec<TieLine>, Vec<(f64, f64)>) {
        let e = self.evader;
        let t = Point3::new(x, y, 0.0);
        let mut order: Vec<(f64, usize)> = self
            .pursuers
            .iter()
            .enumerate()
            .map(|(k, p)| (t.distance(*p), k))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let near: Vec<usize> = order.iter().take(3).map(|&(_, k)| k).collect();

        let mut lines = Vec::new();
        let mut points = Vec::new();
        // tie line of pursuers i, j: t·n = c
        let tie = |i: usize, j: usize| {
            let (pi, pj) = (self.pursuers[i], self.pursuers[j]);
            (
                (pj.x - pi.x, pj.y - pi.y),
                0.5 * (pj.norm_sq() - pi.norm_sq()),
            )
        };
        for &k in &near {
            let p = self.pursuers[k];
            let d = (e.x - p.x, e.y - p.y);
            let len = d.0.hypot(d.1);
            if len > 1e-12 {
                lines.push(((p.x, p.y), (d.0 / len, d.1 / len)));
            } else {
                points.push((e.x, e.y));
            }
        }
        for a in 0..near.len() {
            for b in (a + 1)..near.len() {
                let (n, c) = tie(near[a], near[b]);
                let len = n.0.hypot(n.1);
                if len > 1e-12 {
                    let foot = (c - (n.0 * x + n.1 * y)) / (len * len);
                    lines.push(((x + foot * n.0, y + foot * n.1), (-n.1 / len, n.0 / len)));
                }
            }
        }
        if near.len() == 3 {
            let (n1, c1) = tie(near[0], near[1]);
            let (n2, c2) = tie(near[0], near[2]);
            let det = n1.0 * n2.1 - n1.1 * n2.0;
            if det.abs() > 1e-12 {
                points.push(((c1 * n2.1 - c2 * n1.1) / det, (n1.0 * c2 - n2.0 * c1) / det));
            }
        }
        (lines, points)
    }

    /// Best of a coarse sample and the tie candidates of its nearest
    /// pursuers (feet on the lines, tie points), all kept near the sample.
    fn screen(&self, s: Sample) -> Sample {
        let reach = 4.0 * self.extent / (self.params.grid - 1) as f64;
        let (lines, points) = self.tie_candidates(s.x, s.y);
        let mut best = s;
        let feet = lines.iter().map(|&(o, d)| {
            let k = (s.x - o.0) * d.0 + (s.y - o.1) * d.1;
            (o.0 + k * d.0, o.1 + k * d.1)
        });
        for (x, y) in points.iter().copied().chain(feet) {
            let inside = (x - self.evader.x).abs().max((y - self.evader.y).abs()) <= self.extent;
            if inside && (x - s.x).abs().max((y - s.y).abs()) <= reach {
                let c = self.eval(x, y);
                if c.beats(&best) {
                    best = c;
                }
            }
        }
        best
    }

    /// Screened coarse-grid local maxima, best first, at least `min_gap` apart.
    fn seeds(&self, samples: &[Sample], min_gap: f64) -> Vec<Sample> {
        let n = self.params.grid;
        let mut cands = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let s = samples[j * n + i];
                let mut is_max = true;
                'nbr: for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        let (ii, jj) = (i as i64 + di, j as i64 + dj);
                        if (di, dj) == (0, 0)
                            || ii < 0
                            || jj < 0
                            || ii >= n as i64
                            || jj >= n as i64
                        {
                            continue;
                        }
                        let v = samples[jj as usize * n + ii as usize].value;
                        // on a plateau only the first point in scan order counts
                        let earlier = (jj, ii) < (j as i64, i as i64);
                        if v > s.value || (v == s.value && earlier) {
                            is_max = false;
                            break 'nbr;
                        }
                    }
                }
                if is_max {
                    cands.push(self.screen(s));
                }
            }
        }
        cands.sort_by(|a, b| {
            if a.beats(b) {
                std::cmp::Ordering::Less
            } else if b.beats(a) {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        });
        let mut chosen: Vec<Sample> = Vec::new();
        for c in cands {
            if chosen.len() >= self.params.starts.max(1) {
                break;
            }
            let far = chosen
                .iter()
                .all(|s| (s.x - c.x).abs().max((s.y - c.y).abs()) > min_gap);
            if far {
                chosen.push(c);
            }
        }
        chosen
    }

    fn refine(&self, start: Sample, extent: f64, outer: &Window) -> (Sample, bool) {
        let n = self.params.refine_grid;
        let mut inc = start;
        let mut half = extent;
        for _ in 0..self.params.levels {
            half *= self.params.shrink;
            let w = Window::around(inc.x, inc.y, half, outer);
            let cand = Self::best(&self.scan(&w, n));
            if cand.beats(&inc) {
                inc = cand;
            }
        }
        let spacing = 2.0 * half / (n - 1) as f64;
        let coarse = 2.0 * extent / (self.params.grid - 1) as f64;
        inc = self.polish(inc, &[coarse, 10.0 * half], outer);

        // a maximiser pinned to the search square, or beaten next door, is not resolved
        let slack = 0.5 * coarse;
        let on_edge = inc.x - outer.x0 <= slack
            || outer.x1 - inc.x <= slack
            || inc.y - outer.y0 <= slack
            || outer.y1 - inc.y <= slack;
        let beaten = (0..8).any(|k| {
            let a = k as f64 * std::f64::consts::FRAC_PI_4;
            self.eval(inc.x + spacing * a.cos(), inc.y + spacing * a.sin())
                .value
                > inc.value
        });
        (inc, !on_edge && !beaten)
    }

    /// Golden-section search for the best point on the line through `origin`
    /// along unit `dir`, within `half` of `origin` and inside `outer`.
    fn line_search(
        &self,
        origin: (f64, f64),
        dir: (f64, f64),
        half: f64,
        outer: &Window,
    ) -> Option<Sample> {
        let (mut lo, mut hi) = (-half, half);
        for (o, d, a, b) in [
            (origin.0, dir.0, outer.x0, outer.x1),
            (origin.1, dir.1, outer.y0, outer.y1),
        ] {
            if d.abs() > 1e-300 {
                let (s0, s1) = ((a - o) / d, (b - o) / d);
                lo = lo.max(s0.min(s1));
                hi = hi.min(s0.max(s1));
            } else if o < a || o > b {
                return None;
            }
        }
        if !(lo <= hi) {
            return None;
        }
        let at = |s: f64| self.eval(origin.0 + s * dir.0, origin.1 + s * dir.1);
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut best = at(lo);
        let end = at(hi);
        if end.beats(&best) {
            best = end;
        }
        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut fd) = (at(c), at(d));
        for _ in 0..90 {
            if fc.value >= fd.value {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                fc = at(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                fd = at(d);
            }
            for s in [fc, fd] {
                if s.beats(&best) {
                    best = s;
                }
            }
            if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
                break;
            }
        }
        Some(best)
    }

    /// Local improvement around a grid maximiser. Near a maximiser of `g` at
    /// most three pursuers tie for the minimum; the maximiser then lies on the
    /// line through the evader's and the single pursuer's projections, on the
    /// line where two pursuers tie, or at the point where three tie. Each such
    /// candidate is searched and only strict improvements are kept.
    fn polish(&self, mut inc: Sample, brackets: &[f64], outer: &Window) -> Sample {
        for _ in 0..12 {
            let (lines, points) = self.tie_candidates(inc.x, inc.y);
            let mut next = inc;
            for (origin, dir) in lines {
                // recentre the line parameter at the incumbent's foot point
                let s = (inc.x - origin.0) * dir.0 + (inc.y - origin.1) * dir.1;
                let o = (origin.0 + s * dir.0, origin.1 + s * dir.1);
                for &h in brackets {
                    if let Some(c) = self.line_search(o, dir, h, outer) {
                        if c.beats(&next) {
                            next = c;
                        }
                    }
                }
            }
            for (x, y) in points {
                if x >= outer.x0 && x <= outer.x1 && y >= outer.y0 && y <= outer.y1 {
                    let c = self.eval(x, y);
                    if c.beats(&next) {
                        next = c;
                    }
                }
            }
            if next.value > inc.value {
                inc = next;
            } else {
                if next.beats(&inc) {
                    inc = next;
                }
                break;
            }
        }
        inc
    }
}

fn search(evader: Point3, pursuers: &[Point3], params: &OracleParams, extent: f64) -> MarginReport {
    let oracle = Oracle {
        evader,
        extent,
        pursuers,
        params,
    };
    let outer = Window {
        x0: evader.x - extent,
        x1: evader.x + extent,
        y0: evader.y - extent,
        y1: evader.y + extent,
    };
    let coarse = oracle.scan(&outer, params.grid);
    let seeds = oracle.seeds(&coarse, extent * params.shrink);

    let mut best: Option<(Sample, bool)> = None;
    for seed in seeds {
        let (s, resolved) = oracle.refine(seed, extent, &outer);
        if best.is_none_or(|(b, _)| s.beats(&b)) {
            best = Some((s, resolved));
        }
    }
    let (s, resolved) = best.expect("coarse grid is never empty");
    let witness = Point3::new(s.x, s.y, 0.0);
    MarginReport {
        supremum: margin_unchecked(witness, evader, pursuers),
        witness,
        resolved,
        extent,
    }
}

/// Grid-plus-refinement estimate of `sup_{t ∈ T} g(t)`.
///
/// A coarse square grid of half-width `extent` centred under the evader is
/// scanned, then up to `starts` well-separated coarse local maxima are each
/// refined through `levels` windows shrinking by `shrink` around the running
/// incumbent and finally polished by line searches along the tie lines of
/// the nearest pursuers. Approximate to roughly `1e-6` on unit-scale inputs.
///
/// With automatic extent, an unresolved non-positive result is retried on
/// squares 10, 100 and 1000 times wider and the best report is kept.
pub fn escape_margin_supremum(
    evader: Point3,
    pursuers: &[Point3],
    params: &OracleParams,
) -> Result<MarginReport> {
    if pursuers.is_empty() {
        return Err(Error::EmptyPursuerSet);
    }
    if !(evader.z > 0.0) {
        return Err(Error::EvaderNotInPlay);
    }
    if params.grid < 3 || params.refine_grid < 3 {
        return Err(Error::GridTooSmall(params.grid.min(params.refine_grid)));
    }
    let extent = match params.extent {
        Some(e) if e > 0.0 && e.is_finite() => return Ok(search(evader, pursuers, params, e)),
        Some(e) => return Err(Error::NonPositiveExtent(e)),
        None => auto_extent(evader, pursuers),
    };
    let mut report = search(evader, pursuers, params, extent);
    let mut wider = extent;
    for _ in 0..3 {
        if report.resolved || report.supremum > 0.0 {
            break;
        }
        wider *= 10.0;
        let r = search(evader, pursuers, params, wider);
        if r.supremum > report.supremum {
            report = r;
        }
    }
    Ok(report)
}
