//! Input surface meshes: triangle meshes in 3D, closed segment loops in 2D.

use crate::grid::Dim;
use nalgebra::Point3;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::fmt;

/// A closed, consistently oriented surface mesh. Vertices live in a flat
/// array; elements are stored as a flat index vector with 3 ids per triangle
/// (2 per segment in planar mode). `incident(i)` lists the mesh-index
/// positions `j` with `elem_index[j] == i`.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    dim: Dim,
    verts: Vec<Point3<f64>>,
    elems: Vec<u32>,
    incident: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceDefect {
    /// An edge (a vertex in planar mode) without exactly two incident
    /// elements.
    NonClosed { edge: (u32, u32), incident: usize },
    /// An edge whose two incident elements traverse it in the same
    /// direction.
    InconsistentOrientation { edge: (u32, u32) },
}

impl fmt::Display for SurfaceDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceDefect::NonClosed { edge, incident } => {
                write!(f, "edge ({}, {}) has {} incident elements, expected 2", edge.0, edge.1, incident)
            }
            SurfaceDefect::InconsistentOrientation { edge } => {
                write!(f, "edge ({}, {}) is traversed twice in the same direction", edge.0, edge.1)
            }
        }
    }
}

/// Outcome of `SurfaceMesh::validate`.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub defects: Vec<SurfaceDefect>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.defects.is_empty()
    }
}

impl SurfaceMesh {
    pub fn new_3d(verts: Vec<Point3<f64>>, tris: Vec<[u32; 3]>) -> Self {
        let mut elems = Vec::with_capacity(tris.len() * 3);
        for t in &tris {
            elems.extend_from_slice(t);
        }
        Self::build(Dim::Three, verts, elems)
    }

    pub fn new_2d(verts: Vec<[f64; 2]>, segs: Vec<[u32; 2]>) -> Self {
        let verts = verts.into_iter().map(|v| Point3::new(v[0], v[1], 0.0)).collect();
        let mut elems = Vec::with_capacity(segs.len() * 2);
        for s in &segs {
            elems.extend_from_slice(s);
        }
        Self::build(Dim::Two, verts, elems)
    }

    fn build(dim: Dim, verts: Vec<Point3<f64>>, elems: Vec<u32>) -> Self {
        let k = dim.verts_per_elem();
        assert!(elems.len() % k == 0, "element array length must be a multiple of {k}");
        assert!(
            elems.iter().all(|&i| (i as usize) < verts.len()),
            "element index out of range"
        );
        let mut incident = vec![Vec::new(); verts.len()];
        for (j, &i) in elems.iter().enumerate() {
            incident[i as usize].push(j as u32);
        }
        SurfaceMesh { dim, verts, elems, incident }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn vert_count(&self) -> usize {
        self.verts.len()
    }

    pub fn elem_count(&self) -> usize {
        self.elems.len() / self.dim.verts_per_elem()
    }

    pub fn vert(&self, i: u32) -> Point3<f64> {
        self.verts[i as usize]
    }

    pub fn elem(&self, e: u32) -> &[u32] {
        let k = self.dim.verts_per_elem();
        &self.elems[e as usize * k..(e as usize + 1) * k]
    }

    pub fn elem_points(&self, e: u32) -> SmallVec<[Point3<f64>; 3]> {
        self.elem(e).iter().map(|&i| self.vert(i)).collect()
    }

    /// Mesh-index positions incident to vertex `i`.
    pub fn incident(&self, i: u32) -> &[u32] {
        &self.incident[i as usize]
    }

    /// Element ids incident to vertex `i` (deduplicated, ascending).
    pub fn elems_of_vertex(&self, i: u32) -> SmallVec<[u32; 8]> {
        let k = self.dim.verts_per_elem() as u32;
        let mut out: SmallVec<[u32; 8]> = self.incident[i as usize].iter().map(|&j| j / k).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Vertices adjacent to `i` through a mesh edge, ascending.
    pub fn vertex_neighbors(&self, i: u32) -> SmallVec<[u32; 8]> {
        let mut out = SmallVec::new();
        for &e in self.elems_of_vertex(i).iter() {
            for &v in self.elem(e) {
                if v != i {
                    out.push(v);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Elements containing both endpoints of the edge (a, b), ascending.
    pub fn elems_of_edge(&self, a: u32, b: u32) -> SmallVec<[u32; 2]> {
        let mut out = SmallVec::new();
        for &e in self.elems_of_vertex(a).iter() {
            if self.elem(e).contains(&b) {
                out.push(e);
            }
        }
        out
    }

    pub fn bbox(&self) -> (Point3<f64>, Point3<f64>) {
        let mut mn = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut mx = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.verts {
            for a in 0..3 {
                mn[a] = mn[a].min(p[a]);
                mx[a] = mx[a].max(p[a]);
            }
        }
        (mn, mx)
    }

    /// Check that the mesh is closed (every edge has exactly two incident
    /// elements) and consistently oriented (each edge appears with opposite
    /// orientations in its two incident elements). In planar mode the role
    /// of an edge is played by a vertex shared by two segments.
    pub fn validate(&self) -> ValidationReport {
        assert!(self.elem_count() > 0, "empty surface mesh");
        let mut report = ValidationReport::default();
        match self.dim {
            Dim::Three => {
                // Directed edge census: +1 for (a, b), -1 for (b, a).
                let mut edges: HashMap<(u32, u32), (usize, i32)> = HashMap::new();
                for e in 0..self.elem_count() as u32 {
                    let t = self.elem(e);
                    for k in 0..3 {
                        let (a, b) = (t[k], t[(k + 1) % 3]);
                        let key = if a < b { (a, b) } else { (b, a) };
                        let entry = edges.entry(key).or_insert((0, 0));
                        entry.0 += 1;
                        entry.1 += if a < b { 1 } else { -1 };
                    }
                }
                let mut keys: Vec<_> = edges.keys().copied().collect();
                keys.sort_unstable();
                for key in keys {
                    let (count, orient) = edges[&key];
                    if count != 2 {
                        report.defects.push(SurfaceDefect::NonClosed { edge: key, incident: count });
                    } else if orient != 0 {
                        report
                            .defects
                            .push(SurfaceDefect::InconsistentOrientation { edge: key });
                    }
                }
            }
            Dim::Two => {
                for i in 0..self.vert_count() as u32 {
                    let mut outgoing = 0usize;
                    let mut incoming = 0usize;
                    for &j in self.incident(i) {
                        if j % 2 == 0 {
                            outgoing += 1;
                        } else {
                            incoming += 1;
                        }
                    }
                    let total = outgoing + incoming;
                    if total != 2 {
                        report.defects.push(SurfaceDefect::NonClosed { edge: (i, i), incident: total });
                    } else if outgoing != 1 {
                        report.defects.push(SurfaceDefect::InconsistentOrientation { edge: (i, i) });
                    }
                }
            }
        }
        report
    }
}

/// The 12-triangle unit cube `[0,1]^3` with outward orientation.
pub fn unit_cube() -> SurfaceMesh {
    cube_at(Point3::origin(), 1.0)
}

/// An axis-aligned cube with minimum corner `min` and edge length `size`.
pub fn cube_at(min: Point3<f64>, size: f64) -> SurfaceMesh {
    let s = size;
    let verts: Vec<Point3<f64>> = (0..8)
        .map(|k| {
            Point3::new(
                min.x + ((k & 1) as f64) * s,
                min.y + (((k >> 1) & 1) as f64) * s,
                min.z + (((k >> 2) & 1) as f64) * s,
            )
        })
        .collect();
    // Each face split into two triangles, outward-oriented.
    let tris = vec![
        [0, 2, 1],
        [1, 2, 3], // z = min (normal -z)
        [4, 5, 6],
        [5, 7, 6], // z = max (+z)
        [0, 1, 4],
        [1, 5, 4], // y = min (-y)
        [2, 6, 3],
        [3, 6, 7], // y = max (+y)
        [0, 4, 2],
        [2, 4, 6], // x = min (-x)
        [1, 3, 5],
        [3, 7, 5], // x = max (+x)
    ];
    SurfaceMesh::new_3d(verts, tris)
}
