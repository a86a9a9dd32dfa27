//! Triangle/polyline meshes of barrier pieces for plotting.

use std::fmt::Write as _;

use serde::Serialize;

use crate::barrier::BarrierPiece;
use crate::error::{Error, Result};
use crate::geometry::{orient2d, CanonicalFrame, Point3};

const WELD_TOL: f64 = 1e-7;
const MIN_FACE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshFrame {
    Raw,
    Canonical,
}

impl std::str::FromStr for MeshFrame {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "raw" => Ok(MeshFrame::Raw),
            "canonical" => Ok(MeshFrame::Canonical),
            other => Err(format!(
                "unknown frame {other:?}, expected raw or canonical"
            )),
        }
    }
}

/// Caps become triangles, arcs polylines, isolated points marked vertices.
/// Every tag is the index of the source piece in the exported list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierMesh {
    pub frame: MeshFrame,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub piece_tags: Vec<usize>,
    pub lines: Vec<[usize; 2]>,
    pub line_tags: Vec<usize>,
    pub points: Vec<usize>,
    pub point_tags: Vec<usize>,
}

struct Builder {
    vertices: Vec<Point3>,
    /// Vertices on cap boundaries, the only ones shared between pieces.
    seams: Vec<usize>,
}

impl Builder {
    fn add(&mut self, p: Point3) -> usize {
        self.vertices.push(p);
        self.vertices.len() - 1
    }

    fn add_seam(&mut self, p: Point3) -> usize {
        if let Some(&i) = self
            .seams
            .iter()
            .find(|&&i| self.vertices[i].distance(p) <= WELD_TOL)
        {
            return i;
        }
        let i = self.add(p);
        self.seams.push(i);
        i
    }
}

pub fn export_mesh(
    pieces: &[BarrierPiece],
    resolution: usize,
    frame: MeshFrame,
    to_raw: &CanonicalFrame,
) -> Result<BarrierMesh> {
    if resolution < 8 {
        return Err(Error::ResolutionTooLow(resolution));
    }
    let mut b = Builder {
        vertices: Vec::new(),
        seams: Vec::new(),
    };
    let mut mesh = BarrierMesh {
        frame,
        vertices: Vec::new(),
        faces: Vec::new(),
        piece_tags: Vec::new(),
        lines: Vec::new(),
        line_tags: Vec::new(),
        points: Vec::new(),
        point_tags: Vec::new(),
    };
    let n = resolution;
    for (tag, piece) in pieces.iter().enumerate() {
        match piece {
            BarrierPiece::Empty => {}
            BarrierPiece::Point(p) => {
                let v = b.add(p.location);
                mesh.points.push(v);
                mesh.point_tags.push(tag);
            }
            BarrierPiece::Arc(arc) => {
                let ids: Vec<usize> = (0..n)
                    .map(|k| b.add(arc.point_at(1.0 - k as f64 / (n - 1) as f64)))
                    .collect();
                for w in ids.windows(2) {
                    mesh.lines.push([w[0], w[1]]);
                    mesh.line_tags.push(tag);
                }
            }
            BarrierPiece::Cap(cap) => {
                // barycentric lattice (i, j, n - i - j)
                let mut index = vec![vec![0usize; n + 1]; n + 1];
                for i in 0..=n {
                    for j in 0..=(n - i) {
                        let k = n - i - j;
                        let bary = [
                            i as f64 / n as f64,
                            j as f64 / n as f64,
                            k as f64 / n as f64,
                        ];
                        let q = cap.point_at(bary);
                        index[i][j] = if i == 0 || j == 0 || k == 0 {
                            b.add_seam(q)
                        } else {
                            b.add(q)
                        };
                    }
                }
                let mut push = |a: usize, c: usize, d: usize, verts: &[Point3]| {
                    let twice = orient2d(verts[a], verts[c], verts[d]).abs();
                    let area3 = (verts[c] - verts[a]).cross(verts[d] - verts[a]).norm();
                    if 0.5 * twice.max(area3) > MIN_FACE_AREA {
                        mesh.faces.push([a, c, d]);
                        mesh.piece_tags.push(tag);
                    }
                };
                for i in 0..n {
                    for j in 0..(n - i) {
                        push(index[i][j], index[i + 1][j], index[i][j + 1], &b.vertices);
                        if i + j + 1 < n {
                            push(
                                index[i + 1][j],
                                index[i + 1][j + 1],
                                index[i][j + 1],
                                &b.vertices,
                            );
                        }
                    }
                }
            }
        }
    }
    mesh.vertices = b
        .vertices
        .iter()
        .map(|v| match frame {
            MeshFrame::Canonical => v.to_array(),
            MeshFrame::Raw => to_raw.from_canonical(*v).to_array(),
        })
        .collect();
    Ok(mesh)
}

impl BarrierMesh {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serialization cannot fail")
    }

    /// Wavefront OBJ with `v`, `f`, `l` and `p` records.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            let _ = writeln!(out, "v {:?} {:?} {:?}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        for l in &self.lines {
            let _ = writeln!(out, "l {} {}", l[0] + 1, l[1] + 1);
        }
        for p in &self.points {
            let _ = writeln!(out, "p {}", p + 1);
        }
        out
    }

    /// Number of connected components of the triangle part (faces sharing a
    /// vertex are connected).
    pub fn face_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for f in &self.faces {
            let a = find(&mut parent, f[0]);
            for &v in &f[1..] {
                let r = find(&mut parent, v);
                parent[r] = a;
            }
        }
        let mut roots: Vec<usize> = self.faces.iter().map(|f| find(&mut parent, f[0])).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}
