//! Cell-aligned element meshes over a shared vertex pool.
//!
//! Each element is geometrically coincident with one background grid cell and
//! stores its corner vertex ids in the fixed corner order. In planar mode an
//! "hex" is a 4-corner quadrilateral; the element arity follows the grid
//! dimension.

use crate::grid::Dim;
use std::collections::HashMap;

/// A hexahedron (or quadrilateral) mesh: a flat corner-id array with a grid
/// cell multi-index per element.
#[derive(Clone, Debug)]
pub struct HexMesh {
    arity: usize,
    verts: Vec<u32>,
    cells: Vec<[i32; 3]>,
}

impl HexMesh {
    pub fn new(dim: Dim) -> Self {
        HexMesh { arity: dim.corners_per_cell(), verts: Vec::new(), cells: Vec::new() }
    }

    pub fn with_capacity(dim: Dim, hexes: usize) -> Self {
        let arity = dim.corners_per_cell();
        HexMesh {
            arity,
            verts: Vec::with_capacity(hexes * arity),
            cells: Vec::with_capacity(hexes),
        }
    }

    /// Corner ids per element (4 in 2D, 8 in 3D).
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn push(&mut self, cell: [i32; 3], corners: &[u32]) -> usize {
        debug_assert_eq!(corners.len(), self.arity);
        self.verts.extend_from_slice(corners);
        self.cells.push(cell);
        self.cells.len() - 1
    }

    pub fn hex(&self, i: usize) -> &[u32] {
        &self.verts[i * self.arity..(i + 1) * self.arity]
    }

    pub fn cell(&self, i: usize) -> [i32; 3] {
        self.cells[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, [i32; 3], &[u32])> {
        self.cells
            .iter()
            .enumerate()
            .map(move |(i, c)| (i, *c, &self.verts[i * self.arity..(i + 1) * self.arity]))
    }

    pub fn vert_ids(&self) -> &[u32] {
        &self.verts
    }

    pub fn max_vert_id(&self) -> Option<u32> {
        self.verts.iter().copied().max()
    }

    /// Rewrite every corner id through `map`.
    pub fn rewrite_verts(&mut self, map: impl Fn(u32) -> u32) {
        for v in &mut self.verts {
            *v = map(*v);
        }
    }

    /// Remove elements with identical corner tuples, keeping the first
    /// occurrence in array order. Returns the old-index -> kept-index map.
    pub fn dedupe(&mut self) -> Vec<u32> {
        let n = self.len();
        let mut remap = vec![0u32; n];
        let mut keep = Vec::with_capacity(n);
        {
            let mut seen: HashMap<&[u32], u32> = HashMap::with_capacity(n);
            for i in 0..n {
                let tuple = &self.verts[i * self.arity..(i + 1) * self.arity];
                match seen.get(tuple) {
                    Some(&k) => remap[i] = k,
                    None => {
                        let k = keep.len() as u32;
                        seen.insert(tuple, k);
                        keep.push(i);
                        remap[i] = k;
                    }
                }
            }
        }
        if keep.len() != n {
            let mut verts = Vec::with_capacity(keep.len() * self.arity);
            let mut cells = Vec::with_capacity(keep.len());
            for &i in &keep {
                verts.extend_from_slice(&self.verts[i * self.arity..(i + 1) * self.arity]);
                cells.push(self.cells[i]);
            }
            self.verts = verts;
            self.cells = cells;
        }
        remap
    }

    /// Keep only the elements whose indices are flagged, preserving order.
    /// Returns old-index -> new-index (`u32::MAX` for removed elements).
    pub fn retain(&mut self, keep: &[bool]) -> Vec<u32> {
        assert_eq!(keep.len(), self.len());
        let mut remap = vec![u32::MAX; keep.len()];
        let mut next = 0usize;
        for i in 0..keep.len() {
            if keep[i] {
                remap[i] = next as u32;
                if next != i {
                    let (src, dst) = (i * self.arity, next * self.arity);
                    for k in 0..self.arity {
                        self.verts[dst + k] = self.verts[src + k];
                    }
                    self.cells[next] = self.cells[i];
                }
                next += 1;
            }
        }
        self.verts.truncate(next * self.arity);
        self.cells.truncate(next);
        remap
    }

    /// Append all elements of `other`, returning the index offset.
    pub fn append(&mut self, other: &HexMesh) -> usize {
        assert_eq!(self.arity, other.arity);
        let off = self.len();
        self.verts.extend_from_slice(&other.verts);
        self.cells.extend_from_slice(&other.cells);
        off
    }

    pub fn push_from(&mut self, other: &HexMesh, idx: usize) -> usize {
        let cell = other.cell(idx);
        let corners: Vec<u32> = other.hex(idx).to_vec();
        self.push(cell, &corners)
    }

    /// Extract the sub-mesh of the flagged elements (same pool ids).
    pub fn submesh(&self, keep: impl Fn(usize) -> bool) -> HexMesh {
        let mut out = HexMesh { arity: self.arity, verts: Vec::new(), cells: Vec::new() };
        for (i, c, h) in self.iter() {
            if keep(i) {
                out.verts.extend_from_slice(h);
                out.cells.push(c);
            }
        }
        out
    }

    /// Per-vertex incidence: pool id -> element indices that use it.
    pub fn vertex_incidence(&self) -> HashMap<u32, Vec<u32>> {
        let mut map: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, _, h) in self.iter() {
            for &v in h {
                let e = map.entry(v).or_default();
                if e.last() != Some(&(i as u32)) {
                    e.push(i as u32);
                }
            }
        }
        map
    }
}

/// Label elements by connectivity through shared vertex ids.
/// Returns (labels, component count); labels are dense and assigned in order
/// of first appearance.
pub fn connected_components(mesh: &HexMesh) -> (Vec<u32>, usize) {
    let n = mesh.len();
    let mut labels = vec![u32::MAX; n];
    if n == 0 {
        return (labels, 0);
    }
    let incidence = mesh.vertex_incidence();
    let mut count = 0u32;
    let mut stack = Vec::new();
    for start in 0..n {
        if labels[start] != u32::MAX {
            continue;
        }
        labels[start] = count;
        stack.push(start);
        while let Some(i) = stack.pop() {
            for &v in mesh.hex(i) {
                for &j in &incidence[&v] {
                    let j = j as usize;
                    if labels[j] == u32::MAX {
                        labels[j] = count;
                        stack.push(j);
                    }
                }
            }
        }
        count += 1;
    }
    (labels, count as usize)
}

/// An order- and numbering-independent form of a mesh for comparisons in
/// tests: elements sorted by (cell, corner tuple), vertex ids relabeled in
/// first-use order, and each vertex identified by its grid node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMesh {
    pub hexes: Vec<([i32; 3], Vec<u32>)>,
    pub vert_nodes: Vec<[i32; 3]>,
}

pub fn canonicalize(mesh: &HexMesh, pool: &crate::pool::VertexPool) -> CanonicalMesh {
    let mut order: Vec<usize> = (0..mesh.len()).collect();
    order.sort_by(|&a, &b| {
        let ka = (mesh.cell(a), mesh.hex(a));
        let kb = (mesh.cell(b), mesh.hex(b));
        ka.cmp(&kb)
    });
    let mut relabel: HashMap<u32, u32> = HashMap::new();
    let mut vert_nodes = Vec::new();
    let mut hexes = Vec::with_capacity(mesh.len());
    for &i in &order {
        let tuple: Vec<u32> = mesh
            .hex(i)
            .iter()
            .map(|&v| {
                *relabel.entry(v).or_insert_with(|| {
                    vert_nodes.push(pool.node(v));
                    (vert_nodes.len() - 1) as u32
                })
            })
            .collect();
        hexes.push((mesh.cell(i), tuple));
    }
    CanonicalMesh { hexes, vert_nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dim;
    use crate::pool::{Sign, VertexPool};

    fn cube_corners(pool: &mut VertexPool, cell: [i32; 3]) -> Vec<u32> {
        Dim::Three
            .corner_offsets()
            .iter()
            .map(|o| pool.push(crate::grid::idx_add(cell, *o), Sign::Unset))
            .collect()
    }

    #[test]
    fn single_hex_is_one_component() {
        let mut pool = VertexPool::new();
        let mut m = HexMesh::new(Dim::Three);
        let c = cube_corners(&mut pool, [0, 0, 0]);
        m.push([0, 0, 0], &c);
        let (_, n) = connected_components(&m);
        assert_eq!(n, 1);
    }

    #[test]
    fn coincident_hexes_with_disjoint_vertices_are_two_components() {
        let mut pool = VertexPool::new();
        let mut m = HexMesh::new(Dim::Three);
        let a = cube_corners(&mut pool, [0, 0, 0]);
        let b = cube_corners(&mut pool, [0, 0, 0]);
        m.push([0, 0, 0], &a);
        m.push([0, 0, 0], &b);
        let (labels, n) = connected_components(&m);
        assert_eq!(n, 2);
        assert_ne!(labels[0], labels[1]);
    }

    #[test]
    fn dedupe_keeps_first_occurrence() {
        let mut pool = VertexPool::new();
        let mut m = HexMesh::new(Dim::Three);
        let a = cube_corners(&mut pool, [0, 0, 0]);
        let b = cube_corners(&mut pool, [1, 0, 0]);
        m.push([0, 0, 0], &a);
        m.push([1, 0, 0], &b);
        m.push([0, 0, 0], &a);
        let remap = m.dedupe();
        assert_eq!(m.len(), 2);
        assert_eq!(remap, vec![0, 1, 0]);
        assert_eq!(m.cell(0), [0, 0, 0]);
        assert_eq!(m.cell(1), [1, 0, 0]);
    }

    #[test]
    fn canonical_form_ignores_order_and_numbering() {
        let mut pool1 = VertexPool::new();
        let mut m1 = HexMesh::new(Dim::Three);
        let a1 = cube_corners(&mut pool1, [0, 0, 0]);
        let b1 = cube_corners(&mut pool1, [1, 0, 0]);
        m1.push([0, 0, 0], &a1);
        m1.push([1, 0, 0], &b1);

        let mut pool2 = VertexPool::new();
        let mut m2 = HexMesh::new(Dim::Three);
        let b2 = cube_corners(&mut pool2, [1, 0, 0]);
        let a2 = cube_corners(&mut pool2, [0, 0, 0]);
        m2.push([1, 0, 0], &b2);
        m2.push([0, 0, 0], &a2);

        assert_eq!(canonicalize(&m1, &pool1), canonicalize(&m2, &pool2));
    }
}
