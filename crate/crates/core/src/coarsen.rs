//! Topology-aware coarsening by grid-spacing doubling.
//!
//! Every fine hexahedron becomes a maximal coarse hexahedron on the doubled
//! grid with its own fresh vertices. Fine hexes that share a face connect
//! their coarse counterparts: totally (all corners) when they land in the
//! same coarse cell without being geometrically coincident, partially (the
//! analogous face only) otherwise. This keeps duplicated sheets separate
//! while fusing ordinary neighbors.

use crate::grid::{idx_add, GridSpec};
use crate::hexmesh::HexMesh;
use crate::merge::{merge_vertices, MergeGraph, SignPolicy};
use crate::pool::{Sign, VertexPool};
use smallvec::SmallVec;
use std::collections::HashMap;

/// One coarsening level: returns the coarse mesh over a fresh pool and the
/// doubled grid.
pub fn coarsen_once(mesh: &HexMesh, grid: &GridSpec) -> (HexMesh, VertexPool, GridSpec) {
    let dim = grid.dim();
    let dims = grid.dims();
    let cdims = [
        (dims[0] + 1) / 2,
        (dims[1] + 1) / 2,
        if dim.axes() == 3 { (dims[2] + 1) / 2 } else { 0 },
    ];
    let coarse_grid = match dim.axes() {
        3 => GridSpec::new_3d(grid.origin(), grid.dx() * 2.0, cdims),
        _ => GridSpec::new_2d(grid.origin(), grid.dx() * 2.0, [cdims[0], cdims[1]]),
    };

    // Maximal coarse mesh: one coarse hex per fine hex, fresh corners.
    let arity = dim.corners_per_cell();
    let mut pool = VertexPool::new();
    let mut coarse = HexMesh::with_capacity(dim, mesh.len());
    let mut corners = vec![0u32; arity];
    for (_, cell, _) in mesh.iter() {
        let ccell = [cell[0] >> 1, cell[1] >> 1, cell[2] >> 1];
        for (k, slot) in corners.iter_mut().enumerate() {
            *slot = pool.push(coarse_grid.cell_corner_node(ccell, k), Sign::Unset);
        }
        coarse.push(ccell, &corners);
    }

    // Fine hexes sharing a face, via the face key census.
    let mut buckets: HashMap<SmallVec<[u32; 4]>, SmallVec<[(u32, u8); 2]>> = HashMap::new();
    for (i, _, h) in mesh.iter() {
        for side in 0..dim.faces_per_cell() {
            let mut key: SmallVec<[u32; 4]> =
                dim.face_slots(side).iter().map(|&s| h[s]).collect();
            key.sort_unstable();
            buckets.entry(key).or_default().push((i as u32, side as u8));
        }
    }
    let mut pair_faces: HashMap<(u32, u32), SmallVec<[(u8, u8); 2]>> = HashMap::new();
    for list in buckets.values() {
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let ((ha, sa), (hb, sb)) = (list[i], list[j]);
                let (key, faces) = if ha < hb {
                    ((ha, hb), (sa, sb))
                } else {
                    ((hb, ha), (sb, sa))
                };
                pair_faces.entry(key).or_default().push(faces);
            }
        }
    }

    let mut pairs: Vec<(u32, u32)> = pair_faces.keys().copied().collect();
    pairs.sort_unstable();
    let mut graph = MergeGraph::new();
    for (a, b) in pairs {
        let (ca, cb) = (coarse.cell(a as usize), coarse.cell(b as usize));
        let coincident = mesh.cell(a as usize) == mesh.cell(b as usize);
        if ca == cb && !coincident {
            // Totally connected: all corners fuse.
            for k in 0..arity {
                graph.add(coarse.hex(a as usize)[k], coarse.hex(b as usize)[k]);
            }
            continue;
        }
        // Partially connected: only the analogous faces fuse, with corners
        // matched by coarse node.
        for &(sa, sb) in &pair_faces[&(a, b)] {
            for &ka in dim.face_slots(sa as usize) {
                let node = idx_add(ca, dim.corner_offsets()[ka]);
                for &kb in dim.face_slots(sb as usize) {
                    if idx_add(cb, dim.corner_offsets()[kb]) == node {
                        graph.add(coarse.hex(a as usize)[ka], coarse.hex(b as usize)[kb]);
                    }
                }
            }
        }
    }

    {
        let mut refs: Vec<&mut HexMesh> = vec![&mut coarse];
        merge_vertices(&mut pool, &mut refs, &graph, SignPolicy::KeepRepresentative)
            .expect("coarse adjacencies are coincident by construction");
    }
    (coarse, pool, coarse_grid)
}

/// Apply `levels` rounds of coarsening.
pub fn coarsen(
    mesh: &HexMesh,
    pool: &VertexPool,
    grid: &GridSpec,
    levels: usize,
) -> (HexMesh, VertexPool, GridSpec) {
    if levels == 0 {
        return (mesh.clone(), pool.clone(), grid.clone());
    }
    let (mut m, mut p, mut g) = coarsen_once(mesh, grid);
    for _ in 1..levels {
        let next = coarsen_once(&m, &g);
        m = next.0;
        p = next.1;
        g = next.2;
    }
    (m, p, g)
}
