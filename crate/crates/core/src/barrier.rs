//! Barrier pieces: the building blocks every closed-form barrier is made of.

use serde::Serialize;

use crate::geometry::{orient2d, planar_segment_distance, Point3, EPS_GEO};

/// Isolated barrier point (mirror image of a pursuer below the target plane).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointPiece {
    pub location: Point3,
}

/// Arc of the circle of radius `radius` about `center` in the vertical plane
/// through `ends`, restricted to the open strip strictly between the two
/// projected pursuers and to `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcPiece {
    pub center: Point3,
    pub radius: f64,
    /// Projections of the two pursuers onto the target plane.
    pub ends: [Point3; 2],
}

impl ArcPiece {
    /// Unit in-plane direction from `ends[0]` toward `ends[1]`.
    pub fn plane_dir(&self) -> Point3 {
        (self.ends[1] - self.ends[0])
            .normalized()
            .expect("arc ends are distinct")
    }

    /// Height of the circle above planar point `(x, y)`; zero outside the disc.
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let d2 = (x - self.center.x).powi(2) + (y - self.center.y).powi(2);
        (self.radius * self.radius - d2).max(0.0).sqrt()
    }

    /// Arc point whose projection is `β·ends[0] + (1-β)·ends[1]`.
    pub fn point_at(&self, beta: f64) -> Point3 {
        let base = self.ends[0] * beta + self.ends[1] * (1.0 - beta);
        Point3::new(base.x, base.y, self.height_at(base.x, base.y))
    }

    /// `n` points at evenly spaced interior parameters.
    pub fn sample(&self, n: usize) -> Vec<Point3> {
        (1..=n)
            .map(|k| self.point_at(k as f64 / (n + 1) as f64))
            .collect()
    }
}

/// Patch of the sphere of radius `radius` about `center` lying over the
/// closed projected triangle `triangle`, with `z > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapPiece {
    pub center: Point3,
    pub radius: f64,
    pub triangle: [Point3; 3],
}

impl CapPiece {
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        let d2 = (x - self.center.x).powi(2) + (y - self.center.y).powi(2);
        (self.radius * self.radius - d2).max(0.0).sqrt()
    }

    pub fn area(&self) -> f64 {
        0.5 * orient2d(self.triangle[0], self.triangle[1], self.triangle[2]).abs()
    }

    /// Barycentric coordinates of the projection of `q`.
    pub fn barycentric(&self, q: Point3) -> [f64; 3] {
        let [a, b, c] = self.triangle;
        let total = orient2d(a, b, c);
        [
            orient2d(q, b, c) / total,
            orient2d(a, q, c) / total,
            orient2d(a, b, q) / total,
        ]
    }

    /// Smallest signed distance from the projection of `q` to the three edge
    /// lines, positive inside.
    pub fn edge_clearance(&self, q: Point3) -> f64 {
        let t = self.triangle;
        let total = orient2d(t[0], t[1], t[2]);
        let mut worst = f64::INFINITY;
        for k in 0..3 {
            let a = t[(k + 1) % 3];
            let b = t[(k + 2) % 3];
            let len = a.planar_distance_sq(b).sqrt();
            let signed = orient2d(a, b, q) * total.signum() / len;
            worst = worst.min(signed);
        }
        worst
    }

    /// Closed-triangle membership with tolerance `tol` on edge distance.
    pub fn contains_projection(&self, q: Point3, tol: f64) -> bool {
        self.edge_clearance(q) >= -tol
    }

    /// Planar distance from the projection of `q` to the closed triangle.
    pub fn footprint_distance(&self, q: Point3) -> f64 {
        if self.edge_clearance(q) >= 0.0 {
            return 0.0;
        }
        let t = self.triangle;
        (0..3)
            .map(|k| planar_segment_distance(q, t[k], t[(k + 1) % 3]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point_at(&self, bary: [f64; 3]) -> Point3 {
        let t = self.triangle;
        let base = t[0] * bary[0] + t[1] * bary[1] + t[2] * bary[2];
        Point3::new(base.x, base.y, self.height_at(base.x, base.y))
    }

    /// Interior sample points from a barycentric lattice, at least `n` of them.
    pub fn sample(&self, n: usize) -> Vec<Point3> {
        let mut m = 3;
        while (m - 1) * (m - 2) / 2 < n {
            m += 1;
        }
        let mut out = Vec::new();
        for i in 1..m {
            for j in 1..(m - i) {
                let k = m - i - j;
                let b = [
                    i as f64 / m as f64,
                    j as f64 / m as f64,
                    k as f64 / m as f64,
                ];
                out.push(self.point_at(b));
            }
        }
        out.truncate(n);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierPiece {
    Empty,
    Point(PointPiece),
    Arc(ArcPiece),
    Cap(CapPiece),
}

fn close(a: Point3, b: Point3, tol: f64) -> bool {
    a.distance(b) <= tol
}

fn same_vertex_set(a: &[Point3], b: &[Point3], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| close(*p, *q, tol)))
        && b.iter().all(|p| a.iter().any(|q| close(*p, *q, tol)))
}

impl BarrierPiece {
    pub fn is_empty(&self) -> bool {
        matches!(self, BarrierPiece::Empty)
    }

    /// Same point set up to `tol`; endpoint order of arcs and vertex order of
    /// caps do not matter.
    pub fn approx_eq(&self, other: &BarrierPiece, tol: f64) -> bool {
        use BarrierPiece::*;
        match (self, other) {
            (Empty, Empty) => true,
            (Point(a), Point(b)) => close(a.location, b.location, tol),
            (Arc(a), Arc(b)) => {
                close(a.center, b.center, tol)
                    && (a.radius - b.radius).abs() <= tol
                    && same_vertex_set(&a.ends, &b.ends, tol)
            }
            (Cap(a), Cap(b)) => {
                close(a.center, b.center, tol)
                    && (a.radius - b.radius).abs() <= tol
                    && same_vertex_set(&a.triangle, &b.triangle, tol)
            }
            _ => false,
        }
    }

    /// Sample points on the piece (empty for `Empty`).
    pub fn sample(&self, n: usize) -> Vec<Point3> {
        match self {
            BarrierPiece::Empty => Vec::new(),
            BarrierPiece::Point(p) => vec![p.location],
            BarrierPiece::Arc(a) => a.sample(n),
            BarrierPiece::Cap(c) => c.sample(n),
        }
    }

    /// Distance from `q` to the surface (or curve, or point) carrying the piece.
    pub fn carrier_residual(&self, q: Point3) -> f64 {
        match self {
            BarrierPiece::Empty => f64::INFINITY,
            BarrierPiece::Point(p) => q.distance(p.location),
            BarrierPiece::Arc(a) => {
                let d = a.plane_dir();
                let off = (q - a.ends[0]).cross(d).z.abs();
                (q.distance(a.center) - a.radius).abs().max(off)
            }
            BarrierPiece::Cap(c) => (q.distance(c.center) - c.radius).abs(),
        }
    }
}

/// Append `piece` unless an equal piece (within `EPS_GEO`) is already present.
pub(crate) fn push_unique(out: &mut Vec<BarrierPiece>, piece: BarrierPiece) {
    if piece.is_empty() {
        return;
    }
    if !out.iter().any(|p| p.approx_eq(&piece, EPS_GEO)) {
        out.push(piece);
    }
}

/// Order-insensitive piece-set equality.
pub fn same_piece_set(a: &[BarrierPiece], b: &[BarrierPiece], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| p.approx_eq(q, tol)))
        && b.iter().all(|p| a.iter().any(|q| p.approx_eq(q, tol)))
}
