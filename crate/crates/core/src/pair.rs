//! Two pursuers: classification, the equal-time point on the target plane,
//! the arc barrier and the pursuer winning region (a piece of vertical plane
//! above the arc).

use crate::barrier::{push_unique, ArcPiece, BarrierPiece};
use crate::error::{Error, Result};
use crate::geometry::{planar_segment_distance, project_to_target, Point3, EPS_GEO};
use crate::triple::single_barrier;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMember {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    /// Projections differ, both pursuers shape the barrier.
    BothActive,
    /// Same projection; only the pursuer closer to the target plane matters.
    SingleActive(PairMember),
    /// Mirror images across the target plane: the barrier is empty.
    EmptyBarrier,
}

pub fn classify_pair(p_i: Point3, p_j: Point3) -> Result<PairClass> {
    if p_i.distance(p_j) <= EPS_GEO {
        return Err(Error::CoincidentPursuers(0, 1));
    }
    if p_i.planar_distance_sq(p_j) > EPS_GEO * EPS_GEO {
        return Ok(PairClass::BothActive);
    }
    let (zi, zj) = (p_i.z.abs(), p_j.z.abs());
    if (zi - zj).abs() <= EPS_GEO {
        // same column, same |z|, not coincident: z_i = -z_j
        Ok(PairClass::EmptyBarrier)
    } else if zi < zj {
        Ok(PairClass::SingleActive(PairMember::First))
    } else {
        Ok(PairClass::SingleActive(PairMember::Second))
    }
}

/// Point of the target plane on the line through both projections that the
/// two pursuers reach at the same time.
pub fn equal_time_point(p_i: Point3, p_j: Point3) -> Result<Point3> {
    if classify_pair(p_i, p_j)? != PairClass::BothActive {
        return Err(Error::NotBothActive);
    }
    Ok(equal_time_point_unchecked(p_i, p_j))
}

pub(crate) fn equal_time_point_unchecked(p_i: Point3, p_j: Point3) -> Point3 {
    let a = project_to_target(p_i);
    let d = project_to_target(p_j) - a;
    let len_sq = d.norm_sq();
    // c = a + s·d with s²L² + z_i² = (1-s)²L² + z_j²
    let s = (len_sq + p_j.z * p_j.z - p_i.z * p_i.z) / (2.0 * len_sq);
    a + d * s
}

/// Arc piece of the two-pursuer barrier; the pair must be jointly active.
pub(crate) fn arc_unchecked(p_i: Point3, p_j: Point3) -> ArcPiece {
    let center = equal_time_point_unchecked(p_i, p_j);
    let r_i = p_i.distance(center);
    let r_j = p_j.distance(center);
    debug_assert!(
        (r_i - r_j).abs() <= 1e-9 * (1.0 + r_i),
        "equal-time point is not equidistant: {r_i} vs {r_j}"
    );
    ArcPiece {
        center,
        radius: r_i,
        ends: [project_to_target(p_i), project_to_target(p_j)],
    }
}

pub fn pair_barrier(p_i: Point3, p_j: Point3) -> Result<Vec<BarrierPiece>> {
    if classify_pair(p_i, p_j)? != PairClass::BothActive {
        return Err(Error::NotBothActive);
    }
    let mut out = Vec::new();
    push_unique(&mut out, single_barrier(p_i));
    push_unique(&mut out, single_barrier(p_j));
    out.push(BarrierPiece::Arc(arc_unchecked(p_i, p_j)));
    Ok(out)
}

impl ArcPiece {
    /// Signed distance of `q`'s projection from the closed strip footprint:
    /// zero on it, positive outside.
    pub fn footprint_distance(&self, q: Point3) -> f64 {
        planar_segment_distance(q, self.ends[0], self.ends[1])
    }

    /// `radius - |q - center|` when `q` lies over the closed strip (within
    /// `EPS_GEO`), otherwise `None`. Negative means pursuer side.
    pub fn evader_margin(&self, q: Point3) -> Option<f64> {
        (self.footprint_distance(q) <= EPS_GEO).then(|| self.radius - q.distance(self.center))
    }
}

pub fn pair_pursuer_region_contains(p_i: Point3, p_j: Point3, q: Point3) -> Result<bool> {
    if classify_pair(p_i, p_j)? != PairClass::BothActive {
        return Err(Error::NotBothActive);
    }
    if !(q.z > 0.0) {
        return Err(Error::EvaderNotInPlay);
    }
    let arc = arc_unchecked(p_i, p_j);
    Ok(arc.evader_margin(q).is_some_and(|m| m < 0.0))
}
