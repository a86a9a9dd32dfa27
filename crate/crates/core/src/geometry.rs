//! Vector algebra and the reduction of a general target plane `K·p = b` to
//! the canonical plane `z = 0` with the play subspace at `z > 0`.
//!
//! Everything downstream of ingestion works in the canonical frame.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for "equal coordinate" style tests on unit-scale inputs.
pub const EPS_GEO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3::new(0.0, 0.0, 0.0);

    /// Unchecked constructor. Use [`Point3::try_new`] for untrusted input.
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Point3 { x, y, z })
        } else {
            Err(Error::NonFinite(format!("({x}, {y}, {z})")))
        }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, o: Point3) -> f64 {
        (self - o).norm()
    }

    /// Squared distance between the projections onto the target plane.
    pub fn planar_distance_sq(self, o: Point3) -> f64 {
        let dx = self.x - o.x;
        let dy = self.y - o.y;
        dx * dx + dy * dy
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Raw target plane `{p : normal·p = offset}`; play subspace is `normal·p > offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetPlaneSpec {
    pub normal: Point3,
    pub offset: f64,
}

impl TargetPlaneSpec {
    pub fn new(normal: Point3, offset: f64) -> Self {
        TargetPlaneSpec { normal, offset }
    }

    /// `normal·p - offset`; positive in the play subspace.
    pub fn side(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

/// Rigid motion `p ↦ R·p + t` taking the raw target plane to `z = 0`.
///
/// The rows of `rotation` are an orthonormal right-handed basis whose third
/// row is the unit plane normal, so the canonical z-coordinate of a point is
/// its signed distance to the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalFrame {
    pub rotation: [[f64; 3]; 3],
    pub translation: Point3,
}

impl CanonicalFrame {
    pub const IDENTITY: CanonicalFrame = CanonicalFrame {
        rotation: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        translation: Point3::ORIGIN,
    };

    fn row(&self, i: usize) -> Point3 {
        Point3::from_array(self.rotation[i])
    }

    pub fn to_canonical(&self, p: Point3) -> Point3 {
        Point3::new(self.row(0).dot(p), self.row(1).dot(p), self.row(2).dot(p)) + self.translation
    }

    pub fn from_canonical(&self, p: Point3) -> Point3 {
        let q = p - self.translation;
        self.row(0) * q.x + self.row(1) * q.y + self.row(2) * q.z
    }

    pub fn determinant(&self) -> f64 {
        self.row(0).cross(self.row(1)).dot(self.row(2))
    }
}

pub fn canonical_frame(spec: TargetPlaneSpec) -> Result<CanonicalFrame> {
    if !spec.normal.is_finite() || !spec.offset.is_finite() {
        return Err(Error::NonFinite("target plane".into()));
    }
    let len = spec.normal.norm();
    if len <= 1e-12 {
        return Err(Error::ZeroNormal);
    }
    let k = spec.normal * (1.0 / len);

    // seed the in-plane basis with the coordinate axis least aligned with k
    let abs = [k.x.abs(), k.y.abs(), k.z.abs()];
    let mut axis = 0;
    for i in 1..3 {
        if abs[i] < abs[axis] {
            axis = i;
        }
    }
    let mut seed = [0.0; 3];
    seed[axis] = 1.0;
    let seed = Point3::from_array(seed);
    let e1 = (seed - k * seed.dot(k))
        .normalized()
        .expect("seed axis is never parallel to the normal");
    let e2 = k.cross(e1);

    Ok(CanonicalFrame {
        rotation: [e1.to_array(), e2.to_array(), k.to_array()],
        translation: Point3::new(0.0, 0.0, -spec.offset / len),
    })
}

/// Orthogonal projection onto the target plane.
pub fn project_to_target(p: Point3) -> Point3 {
    Point3::new(p.x, p.y, 0.0)
}

/// Mirror image across the target plane.
pub fn reflect_across_target(p: Point3) -> Point3 {
    Point3::new(p.x, p.y, -p.z)
}

/// Twice the signed area of the projected triangle `abc` (counter-clockwise positive).
pub(crate) fn orient2d(a: Point3, b: Point3, c: Point3) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Distance from the projection of `q` to the projected segment `ab`.
pub(crate) fn planar_segment_distance(q: Point3, a: Point3, b: Point3) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len_sq = dx * dx + dy * dy;
    let s = if len_sq > 0.0 {
        (((q.x - a.x) * dx + (q.y - a.y) * dy) / len_sq).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (px, py) = (a.x + s * dx - q.x, a.y + s * dy - q.y);
    (px * px + py * py).sqrt()
}

/// Convex hull of the projections (counter-clockwise, no collinear points),
/// returned as indices into `pts`.
pub(crate) fn planar_hull(pts: &[Point3], idx: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = idx.to_vec();
    order.sort_by(|&a, &b| {
        pts[a]
            .x
            .total_cmp(&pts[b].x)
            .then(pts[a].y.total_cmp(&pts[b].y))
    });
    order.dedup_by(|a, b| pts[*a].planar_distance_sq(pts[*b]) == 0.0);
    if order.len() < 3 {
        return order;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(order.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(order.iter())
        } else {
            Box::new(order.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && orient2d(pts[hull[hull.len() - 2]], pts[hull[hull.len() - 1]], pts[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

pub(crate) fn polygon_area(pts: &[Point3], ring: &[usize]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for k in 0..n {
        let a = pts[ring[k]];
        let b = pts[ring[(k + 1) % n]];
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice.abs()
}
