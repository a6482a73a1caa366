//! Topology-aware BCC-style conversion of the hexahedron mesh to a
//! tetrahedron mesh.
//!
//! Tetrahedra are generated per face of the hexahedron mesh from two face
//! vertices plus cell centers (interior faces) or a face center standing in
//! for the missing neighbor (boundary faces). Because the mesh may contain
//! geometrically coincident hexahedra, faces fall into four classes; pairs
//! of distinct-cell hexes at one face are matched one-to-one and any
//! unmatched incidence is sealed like a boundary face, so every hexahedron
//! contributes exactly its own volume and coincident sheets stay unglued.

use crate::grid::GridSpec;
use crate::hexmesh::HexMesh;
use crate::pool::VertexPool;
use nalgebra::Point3;
use smallvec::SmallVec;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceClass {
    /// One incident hexahedron.
    StandardBoundary,
    /// Two incident hexahedra on distinct cells.
    StandardInterior,
    /// More than two incident hexahedra, some coincident and some not.
    NonStandardInterior,
    /// More than one incident hexahedron, all geometrically coincident.
    NonStandardBoundary,
}

#[derive(Clone, Debug)]
pub struct FaceRecord {
    /// Sorted corner ids keying the face.
    pub verts: [u32; 4],
    /// Incident (hex index, side) pairs, ascending by hex index.
    pub hexes: SmallVec<[(u32, u8); 2]>,
    pub class: FaceClass,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TetError {
    /// A produced tetrahedron has zero volume; the input mesh is corrupt.
    DegenerateTet { face: [u32; 4] },
}

impl fmt::Display for TetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TetError::DegenerateTet { face } => {
                write!(f, "degenerate tetrahedron at face {face:?}")
            }
        }
    }
}

impl std::error::Error for TetError {}

/// Group the mesh's faces by sorted corner ids and classify them by
/// incidence count and coincidence of the incident hexahedra.
pub fn classify_faces(mesh: &HexMesh) -> Vec<FaceRecord> {
    assert_eq!(mesh.arity(), 8, "tetrahedralization applies to hexahedron meshes");
    let dim = crate::grid::Dim::Three;
    let mut buckets: HashMap<[u32; 4], SmallVec<[(u32, u8); 2]>> = HashMap::new();
    for (i, _, h) in mesh.iter() {
        for side in 0..6 {
            let slots = dim.face_slots(side);
            let mut key = [h[slots[0]], h[slots[1]], h[slots[2]], h[slots[3]]];
            key.sort_unstable();
            buckets.entry(key).or_default().push((i as u32, side as u8));
        }
    }
    let mut records: Vec<FaceRecord> = buckets
        .into_iter()
        .map(|(verts, mut hexes)| {
            hexes.sort_unstable();
            let class = if hexes.len() == 1 {
                FaceClass::StandardBoundary
            } else {
                let first_cell = mesh.cell(hexes[0].0 as usize);
                let all_coincident =
                    hexes.iter().all(|&(h, _)| mesh.cell(h as usize) == first_cell);
                if all_coincident {
                    FaceClass::NonStandardBoundary
                } else if hexes.len() == 2 {
                    FaceClass::StandardInterior
                } else {
                    FaceClass::NonStandardInterior
                }
            };
            FaceRecord { verts, hexes, class }
        })
        .collect();
    records.sort_unstable_by_key(|r| r.verts);
    records
}

/// A tetrahedron mesh: explicit vertex positions (pool vertices first, then
/// hex centers, then face centers) and positively oriented 4-tuples.
#[derive(Clone, Debug, Default)]
pub struct TetMesh {
    pub verts: Vec<Point3<f64>>,
    pub tets: Vec<[u32; 4]>,
}

impl TetMesh {
    pub fn tet_volume(&self, t: usize) -> f64 {
        let [a, b, c, d] = self.tets[t];
        signed_volume(
            self.verts[a as usize],
            self.verts[b as usize],
            self.verts[c as usize],
            self.verts[d as usize],
        )
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|t| self.tet_volume(t)).sum()
    }
}

fn signed_volume(a: Point3<f64>, b: Point3<f64>, c: Point3<f64>, d: Point3<f64>) -> f64 {
    (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0
}

/// Convert the hexahedron mesh to tetrahedra. Every face contributes four
/// tetrahedra per matched incidence: standard interior faces span the two
/// cell centers, boundary-style incidences use a face center in place of
/// the missing neighbor center. Face centers are never shared between
/// coincident hexahedra.
pub fn hex_to_tet(mesh: &HexMesh, pool: &VertexPool, grid: &GridSpec) -> Result<TetMesh, TetError> {
    let records = classify_faces(mesh);
    let mut out = TetMesh::default();
    for v in pool.iter_ids() {
        out.verts.push(pool.position(v, grid));
    }
    let center_base = out.verts.len() as u32;
    for (_, cell, _) in mesh.iter() {
        out.verts.push(grid.cell_center(cell));
    }
    let hex_center = |h: u32| center_base + h;

    let face_cycle = |record: &FaceRecord, hex: u32, side: u8| -> [u32; 4] {
        let _ = record;
        let slots = crate::grid::Dim::Three.face_slots(side as usize);
        let h = mesh.hex(hex as usize);
        // Slot order is lexicographic in two bits; the cycle is 0, 1, 3, 2.
        [h[slots[0]], h[slots[1]], h[slots[3]], h[slots[2]]]
    };

    let emit = |out: &mut TetMesh,
                    cycle: [u32; 4],
                    apex0: u32,
                    apex1: u32,
                    key: [u32; 4]|
     -> Result<(), TetError> {
        for k in 0..4 {
            let (u, v) = (cycle[k], cycle[(k + 1) % 4]);
            let mut tet = [u, v, apex0, apex1];
            let vol = signed_volume(
                out.verts[tet[0] as usize],
                out.verts[tet[1] as usize],
                out.verts[tet[2] as usize],
                out.verts[tet[3] as usize],
            );
            if vol == 0.0 {
                return Err(TetError::DegenerateTet { face: key });
            }
            if vol < 0.0 {
                tet.swap(2, 3);
            }
            out.tets.push(tet);
        }
        Ok(())
    };

    for record in &records {
        match record.class {
            FaceClass::StandardBoundary => {
                let (h, side) = record.hexes[0];
                let cycle = face_cycle(record, h, side);
                let f = push_face_center(&mut out, cycle);
                emit(&mut out, cycle, f, hex_center(h), record.verts)?;
            }
            FaceClass::StandardInterior => {
                let (h0, s0) = record.hexes[0];
                let (h1, _) = record.hexes[1];
                let cycle = face_cycle(record, h0, s0);
                emit(&mut out, cycle, hex_center(h0), hex_center(h1), record.verts)?;
            }
            FaceClass::NonStandardBoundary => {
                for &(h, side) in &record.hexes {
                    let cycle = face_cycle(record, h, side);
                    let f = push_face_center(&mut out, cycle);
                    emit(&mut out, cycle, f, hex_center(h), record.verts)?;
                }
            }
            FaceClass::NonStandardInterior => {
                // Split incidences by cell (exactly two cells adjoin a
                // face), match them one-to-one in index order, and seal any
                // leftover incidence like a boundary face.
                let first_cell = mesh.cell(record.hexes[0].0 as usize);
                let (side_a, side_b): (Vec<(u32, u8)>, Vec<(u32, u8)>) = record
                    .hexes
                    .iter()
                    .partition(|&&(h, _)| mesh.cell(h as usize) == first_cell);
                let matched = side_a.len().min(side_b.len());
                for k in 0..matched {
                    let (h0, s0) = side_a[k];
                    let (h1, _) = side_b[k];
                    let cycle = face_cycle(record, h0, s0);
                    emit(&mut out, cycle, hex_center(h0), hex_center(h1), record.verts)?;
                }
                for &(h, side) in side_a.iter().skip(matched).chain(side_b.iter().skip(matched)) {
                    let cycle = face_cycle(record, h, side);
                    let f = push_face_center(&mut out, cycle);
                    emit(&mut out, cycle, f, hex_center(h), record.verts)?;
                }
            }
        }
    }
    Ok(out)
}

fn push_face_center(out: &mut TetMesh, cycle: [u32; 4]) -> u32 {
    let mut c = Point3::origin();
    for &v in &cycle {
        c.coords += out.verts[v as usize].coords;
    }
    c.coords /= 4.0;
    out.verts.push(c);
    (out.verts.len() - 1) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dim;
    use crate::pool::Sign;

    fn grid() -> GridSpec {
        GridSpec::new_3d(Point3::origin(), 1.0, [8, 8, 8])
    }

    fn push_hex(
        mesh: &mut HexMesh,
        pool: &mut VertexPool,
        g: &GridSpec,
        cell: [i32; 3],
        share: &HashMap<[i32; 3], u32>,
    ) -> Vec<u32> {
        let mut ids = Vec::new();
        let mut corners = [0u32; 8];
        for (k, slot) in corners.iter_mut().enumerate() {
            let n = g.cell_corner_node(cell, k);
            *slot = match share.get(&n) {
                Some(&v) => v,
                None => pool.push(n, Sign::Unset),
            };
            ids.push(*slot);
        }
        mesh.push(cell, &corners);
        ids
    }

    #[test]
    fn lone_hex_gives_24_tets_of_exact_volume() {
        let g = grid();
        let mut pool = VertexPool::new();
        let mut mesh = HexMesh::new(Dim::Three);
        push_hex(&mut mesh, &mut pool, &g, [2, 2, 2], &HashMap::new());
        let records = classify_faces(&mesh);
        assert_eq!(records.len(), 6);
        assert!(records.iter().all(|r| r.class == FaceClass::StandardBoundary));
        let tets = hex_to_tet(&mesh, &pool, &g).unwrap();
        assert_eq!(tets.tets.len(), 24);
        // 8 corners + 1 hex center + 6 face centers.
        assert_eq!(tets.verts.len(), 15);
        assert!((tets.total_volume() - 1.0).abs() < 1e-12);
        assert!((0..24).all(|t| tets.tet_volume(t) > 0.0));
    }

    #[test]
    fn two_adjacent_hexes_share_one_interior_face() {
        let g = grid();
        let mut pool = VertexPool::new();
        let mut mesh = HexMesh::new(Dim::Three);
        let ids = push_hex(&mut mesh, &mut pool, &g, [2, 2, 2], &HashMap::new());
        // Share the +x face vertices with the next cell.
        let mut share = HashMap::new();
        for (k, &v) in ids.iter().enumerate() {
            let n = g.cell_corner_node([2, 2, 2], k);
            if n[0] == 3 {
                share.insert(n, v);
            }
        }
        push_hex(&mut mesh, &mut pool, &g, [3, 2, 2], &share);
        let records = classify_faces(&mesh);
        let interior: Vec<_> =
            records.iter().filter(|r| r.class == FaceClass::StandardInterior).collect();
        let boundary: Vec<_> =
            records.iter().filter(|r| r.class == FaceClass::StandardBoundary).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(boundary.len(), 10);
        let tets = hex_to_tet(&mesh, &pool, &g).unwrap();
        assert_eq!(tets.tets.len(), 44);
        assert!((tets.total_volume() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_pair_is_non_standard_boundary() {
        let g = grid();
        let mut pool = VertexPool::new();
        let mut mesh = HexMesh::new(Dim::Three);
        let a = push_hex(&mut mesh, &mut pool, &g, [2, 2, 2], &HashMap::new());
        // A coincident duplicate sharing only the -x face vertices.
        let mut share = HashMap::new();
        for (k, &v) in a.iter().enumerate() {
            let n = g.cell_corner_node([2, 2, 2], k);
            if n[0] == 2 {
                share.insert(n, v);
            }
        }
        push_hex(&mut mesh, &mut pool, &g, [2, 2, 2], &share);
        let records = classify_faces(&mesh);
        let nsb: Vec<_> =
            records.iter().filter(|r| r.class == FaceClass::NonStandardBoundary).collect();
        assert_eq!(nsb.len(), 1);
        assert_eq!(nsb[0].hexes.len(), 2);
        let tets = hex_to_tet(&mesh, &pool, &g).unwrap();
        // Each hex contributes its full cell volume.
        assert!((tets.total_volume() - 2.0).abs() < 1e-12);
        // The shared face got two distinct face centers (one per sheet).
        assert_eq!(tets.verts.len() as u32, {
            let pool_n = pool.len() as u32;
            // 2 hex centers + 10 standard-boundary centers + 2 sealed
            // centers on the shared face.
            pool_n + 2 + 10 + 2
        });
    }

    #[test]
    fn mixed_face_matches_pairs_and_seals_the_leftover() {
        let g = grid();
        let mut pool = VertexPool::new();
        let mut mesh = HexMesh::new(Dim::Three);
        let a = push_hex(&mut mesh, &mut pool, &g, [2, 2, 2], &HashMap::new());
        // Two coincident hexes in the next cell, both sharing hex 0's +x
        // face vertices.
        let mut share = HashMap::new();
        for (k, &v) in a.iter().enumerate() {
            let n = g.cell_corner_node([2, 2, 2], k);
            if n[0] == 3 {
                share.insert(n, v);
            }
        }
        push_hex(&mut mesh, &mut pool, &g, [3, 2, 2], &share);
        push_hex(&mut mesh, &mut pool, &g, [3, 2, 2], &share);
        let records = classify_faces(&mesh);
        let nsi: Vec<_> =
            records.iter().filter(|r| r.class == FaceClass::NonStandardInterior).collect();
        assert_eq!(nsi.len(), 1);
        assert_eq!(nsi[0].hexes.len(), 3);
        let tets = hex_to_tet(&mesh, &pool, &g).unwrap();
        // One matched interior pair (4 tets) + one sealed leftover (4 tets)
        // at the mixed face; volume identity holds for all 3 hexes.
        assert!((tets.total_volume() - 3.0).abs() < 1e-12);
        assert!((0..tets.tets.len()).all(|t| tets.tet_volume(t) > 0.0));
    }
}
