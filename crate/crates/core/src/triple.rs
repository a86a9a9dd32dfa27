//! One and three pursuers.
//!
//! A single pursuer below the target plane guards exactly one point (its
//! mirror image) and wins on the vertical ray above it. Three pursuers are
//! classified by which of them actually shape the barrier; when all three do
//! and their projections span a triangle, the barrier is the patch of the
//! sphere through their mirror heights lying over that triangle.

use crate::barrier::{push_unique, BarrierPiece, CapPiece, PointPiece};
use crate::error::{Error, Result};
use crate::geometry::{orient2d, project_to_target, reflect_across_target, Point3, EPS_GEO};
use crate::pair::{arc_unchecked, classify_pair, pair_barrier, PairClass, PairMember};

pub fn single_barrier(p: Point3) -> BarrierPiece {
    if p.z < 0.0 {
        BarrierPiece::Point(PointPiece {
            location: reflect_across_target(p),
        })
    } else {
        BarrierPiece::Empty
    }
}

pub fn single_pursuer_region_contains(p: Point3, q: Point3) -> Result<bool> {
    if !(q.z > 0.0) {
        return Err(Error::EvaderNotInPlay);
    }
    Ok(in_single_region(p, q))
}

fn in_single_region(p: Point3, q: Point3) -> bool {
    same_column(p, q) && q.z > p.z.abs()
}

fn same_column(a: Point3, b: Point3) -> bool {
    a.planar_distance_sq(b) <= EPS_GEO * EPS_GEO
}

/// Which pursuers of a triple shape the barrier. Indices are 0-based
/// positions in the argument list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleClass {
    One(usize),
    Two(usize, usize),
    Three,
    ThreeCollinear { middle: usize },
}

/// Membership in the winning region of the pair `(a, b)`, whatever its class.
fn in_pair_region(a: Point3, b: Point3, q: Point3) -> Result<bool> {
    if !(q.z > 0.0) {
        return Ok(false);
    }
    Ok(match classify_pair(a, b)? {
        PairClass::BothActive => arc_unchecked(a, b)
            .evader_margin(q)
            .is_some_and(|m| m < 0.0),
        PairClass::SingleActive(PairMember::First) | PairClass::EmptyBarrier => {
            in_single_region(a, q)
        }
        PairClass::SingleActive(PairMember::Second) => in_single_region(b, q),
    })
}

fn projections_collinear(p: [Point3; 3]) -> bool {
    0.5 * orient2d(p[0], p[1], p[2]).abs() <= EPS_GEO
}

pub fn classify_triple(p1: Point3, p2: Point3, p3: Point3) -> Result<TripleClass> {
    let p = [p1, p2, p3];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if p[i].distance(p[j]) <= EPS_GEO {
            return Err(Error::CoincidentPursuers(i, j));
        }
    }

    for i in 0..3 {
        let dominant = (0..3)
            .filter(|&k| k != i)
            .all(|k| same_column(p[i], p[k]) && p[i].z.abs() < p[k].z.abs() - EPS_GEO);
        if dominant {
            return Ok(TripleClass::One(i));
        }
    }

    let both_active = |i: usize, j: usize| !same_column(p[i], p[j]);

    for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        if both_active(i, j)
            && (in_pair_region(p[i], p[j], p[k])?
                || in_pair_region(p[i], p[j], reflect_across_target(p[k]))?)
        {
            return Ok(TripleClass::Two(i, j));
        }
        // mirror-image fallback: one of the pair is shadowed by the third pursuer
        for (m, other) in [(i, j), (j, i)] {
            let mirrored =
                same_column(p[m], p[k]) && (p[m].z + p[k].z).abs() <= EPS_GEO && p[m].z > EPS_GEO;
            if mirrored && !in_single_region(p[other], p[m]) {
                return Ok(TripleClass::Two(i, j));
            }
        }
    }

    let all_pairs_active = both_active(0, 1) && both_active(0, 2) && both_active(1, 2);
    if all_pairs_active {
        let mut excluded = false;
        for (i, j, k) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
            if in_pair_region(p[i], p[j], p[k])?
                || in_pair_region(p[i], p[j], reflect_across_target(p[k]))?
            {
                excluded = true;
            }
        }
        if !excluded {
            if projections_collinear(p) {
                return Ok(TripleClass::ThreeCollinear {
                    middle: middle_of_collinear(p),
                });
            }
            return Ok(TripleClass::Three);
        }
    }

    Err(Error::DegenerateConfiguration(format!(
        "no classification branch matches pursuers {p1:?}, {p2:?}, {p3:?}"
    )))
}

/// Index whose projection lies between the other two on their common line.
fn middle_of_collinear(p: [Point3; 3]) -> usize {
    let (mut a, mut b, mut far) = (0, 1, -1.0);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = p[i].planar_distance_sq(p[j]);
        if d > far {
            (a, b, far) = (i, j, d);
        }
    }
    3 - a - b
}

/// Point of the target plane equidistant from all three pursuers.
pub fn equidistant_point(p1: Point3, p2: Point3, p3: Point3) -> Result<Point3> {
    if projections_collinear([p1, p2, p3]) {
        return Err(Error::CollinearProjections);
    }
    Ok(equidistant_point_unchecked(p1, p2, p3))
}

pub(crate) fn equidistant_point_unchecked(p1: Point3, p2: Point3, p3: Point3) -> Point3 {
    // relative to p1's projection: 2 d_k·u = |d_k|² + z_k² - z_1²
    let d2 = project_to_target(p2 - p1);
    let d3 = project_to_target(p3 - p1);
    let r2 = 0.5 * (d2.norm_sq() + p2.z * p2.z - p1.z * p1.z);
    let r3 = 0.5 * (d3.norm_sq() + p3.z * p3.z - p1.z * p1.z);
    let det = d2.x * d3.y - d2.y * d3.x;
    let ux = (r2 * d3.y - r3 * d2.y) / det;
    let uy = (d2.x * r3 - d3.x * r2) / det;
    Point3::new(p1.x + ux, p1.y + uy, 0.0)
}

/// Cap over the projected triangle; the projections must not be collinear.
pub(crate) fn cap_unchecked(p1: Point3, p2: Point3, p3: Point3) -> CapPiece {
    let center = equidistant_point_unchecked(p1, p2, p3);
    let radii = [
        p1.distance(center),
        p2.distance(center),
        p3.distance(center),
    ];
    let spread = radii.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - radii.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    debug_assert!(
        spread <= 1e-9 * (1.0 + radii[0]),
        "equidistant point radii disagree by {spread}"
    );
    CapPiece {
        center,
        radius: radii[0],
        triangle: [
            project_to_target(p1),
            project_to_target(p2),
            project_to_target(p3),
        ],
    }
}

pub fn triple_barrier_noncollinear(p1: Point3, p2: Point3, p3: Point3) -> Result<CapPiece> {
    match classify_triple(p1, p2, p3)? {
        TripleClass::Three => Ok(cap_unchecked(p1, p2, p3)),
        TripleClass::ThreeCollinear { .. } => Err(Error::CollinearProjections),
        _ => Err(Error::NotThreeActive),
    }
}

pub fn triple_barrier_collinear(
    p1: Point3,
    p2: Point3,
    p3: Point3,
    middle: usize,
) -> Result<Vec<BarrierPiece>> {
    if classify_triple(p1, p2, p3)? != (TripleClass::ThreeCollinear { middle }) {
        return Err(Error::NotCollinearCase);
    }
    let p = [p1, p2, p3];
    let mut out = Vec::new();
    for k in (0..3).filter(|&k| k != middle) {
        for piece in pair_barrier(p[middle], p[k])? {
            push_unique(&mut out, piece);
        }
    }
    Ok(out)
}

pub fn triple_pursuer_region_contains(
    p1: Point3,
    p2: Point3,
    p3: Point3,
    q: Point3,
) -> Result<bool> {
    if !(q.z > 0.0) {
        return Err(Error::EvaderNotInPlay);
    }
    let p = [p1, p2, p3];
    match classify_triple(p1, p2, p3)? {
        TripleClass::One(i) => Ok(in_single_region(p[i], q)),
        TripleClass::Two(i, j) => in_pair_region(p[i], p[j], q),
        TripleClass::ThreeCollinear { middle } => {
            let mut hit = false;
            for k in (0..3).filter(|&k| k != middle) {
                hit |= in_pair_region(p[middle], p[k], q)?;
            }
            Ok(hit)
        }
        TripleClass::Three => {
            let cap = cap_unchecked(p1, p2, p3);
            Ok(cap.contains_projection(q, EPS_GEO) && q.distance(cap.center) > cap.radius)
        }
    }
}
