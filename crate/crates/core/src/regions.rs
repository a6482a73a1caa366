//! Interior extension region creation: partition the background grid by cut
//! edges, classify interior regions, count copies, and build per-region
//! interior meshes.

use crate::extension::VolumetricExtension;
use crate::geometry;
use crate::grid::{idx_add, Dim, GridSpec};
use crate::hexmesh::HexMesh;
use crate::merge::{merge_vertices_local, MergeGraph, SignPolicy};
use crate::pool::{Sign, VertexPool};
use crate::surface::SurfaceMesh;
use rayon::prelude::*;
use smallvec::SmallVec;
use std::collections::{HashMap, HashSet};

/// Which grid edges are cut by the surface. Edges are keyed by their lower
/// node and axis.
pub struct CutEdges {
    cut: Vec<bool>,
    nodes: usize,
}

impl CutEdges {
    pub fn is_cut(&self, grid: &GridSpec, node: [i32; 3], axis: usize) -> bool {
        self.cut[axis * self.nodes + grid.node_linear(node)]
    }

    pub fn cut_count(&self) -> usize {
        self.cut.iter().filter(|&&c| c).count()
    }
}

/// The cells whose closed extent contains part of the edge (node, axis).
fn edge_incident_cells(grid: &GridSpec, node: [i32; 3], axis: usize) -> SmallVec<[[i32; 3]; 4]> {
    let mut out = SmallVec::new();
    let others: SmallVec<[usize; 2]> =
        (0..grid.dim().axes()).filter(|&a| a != axis).collect();
    let combos = 1usize << others.len();
    for bits in 0..combos {
        let mut c = node;
        for (k, &a) in others.iter().enumerate() {
            if bits >> k & 1 == 1 {
                c[a] -= 1;
            }
        }
        if grid.cell_in_bounds(c) {
            out.push(c);
        }
    }
    out
}

/// Test every grid edge against the elements whose cell-aligned bounding box
/// reaches it. Exact predicates; runs in parallel over nodes.
pub fn compute_cut_edges(surface: &SurfaceMesh, grid: &GridSpec) -> Result<CutEdges, geometry::GeomError> {
    // Candidate elements per cell, from closed bounding subgrids.
    let mut cell_candidates: HashMap<usize, Vec<u32>> = HashMap::new();
    for e in 0..surface.elem_count() as u32 {
        let (lo, hi) = geometry::bounding_subgrid(&surface.elem_points(e), grid)?;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    cell_candidates.entry(grid.cell_linear([x, y, z])).or_default().push(e);
                }
            }
        }
    }

    let total = grid.total_nodes();
    let axes = grid.dim().axes();
    let cut: Vec<bool> = (0..axes * total)
        .into_par_iter()
        .map(|slot| {
            let axis = slot / total;
            let node = grid.node_from_linear(slot % total);
            let mut far = node;
            far[axis] += 1;
            if !grid.node_in_bounds(far) {
                return false;
            }
            let mut candidates: SmallVec<[u32; 16]> = SmallVec::new();
            for c in edge_incident_cells(grid, node, axis) {
                if let Some(list) = cell_candidates.get(&grid.cell_linear(c)) {
                    candidates.extend_from_slice(list);
                }
            }
            if candidates.is_empty() {
                return false;
            }
            candidates.sort_unstable();
            candidates.dedup();
            geometry::edge_cut_by_surface(node, axis, surface, &candidates, grid)
        })
        .collect();
    Ok(CutEdges { cut, nodes: total })
}

#[derive(Clone, Debug)]
pub struct Region {
    /// Node multi-indices, in discovery order (ascending start node).
    pub nodes: Vec<[i32; 3]>,
    pub interior: bool,
}

/// Grid nodes partitioned into contiguous regions by cut edges.
pub struct RegionPartition {
    /// Region label per node (linear index).
    pub label: Vec<u32>,
    pub regions: Vec<Region>,
}

impl RegionPartition {
    pub fn interior_regions(&self) -> impl Iterator<Item = (u32, &Region)> {
        self.regions
            .iter()
            .enumerate()
            .filter(|(_, r)| r.interior)
            .map(|(i, r)| (i as u32, r))
    }
}

/// Connected components of grid nodes over uncut edges. A region is interior
/// when one of its nodes carries a geometrically coincident extension vertex
/// with negative sign; all other regions are exterior.
pub fn partition_grid_nodes(grid: &GridSpec, cut: &CutEdges, pool: &VertexPool) -> RegionPartition {
    let total = grid.total_nodes();
    let mut negative_at = vec![false; total];
    for v in pool.iter_ids() {
        if pool.sign(v) == Sign::Negative {
            negative_at[grid.node_linear(pool.node(v))] = true;
        }
    }

    let mut label = vec![u32::MAX; total];
    let mut regions = Vec::new();
    let mut stack = Vec::new();
    let axes = grid.dim().axes();
    for start in 0..total {
        if label[start] != u32::MAX {
            continue;
        }
        let id = regions.len() as u32;
        label[start] = id;
        stack.push(start);
        let mut nodes = Vec::new();
        let mut interior = false;
        while let Some(lin) = stack.pop() {
            let n = grid.node_from_linear(lin);
            nodes.push(n);
            interior |= negative_at[lin];
            for a in 0..axes {
                // Forward neighbor.
                let mut fwd = n;
                fwd[a] += 1;
                if grid.node_in_bounds(fwd) && !cut.is_cut(grid, n, a) {
                    let l = grid.node_linear(fwd);
                    if label[l] == u32::MAX {
                        label[l] = id;
                        stack.push(l);
                    }
                }
                // Backward neighbor.
                let mut back = n;
                back[a] -= 1;
                if grid.node_in_bounds(back) && !cut.is_cut(grid, back, a) {
                    let l = grid.node_linear(back);
                    if label[l] == u32::MAX {
                        label[l] = id;
                        stack.push(l);
                    }
                }
            }
        }
        regions.push(Region { nodes, interior });
    }
    RegionPartition { label, regions }
}

/// The negative-vertex components that drive region copies.
#[derive(Clone, Debug)]
pub struct RegionCopySeeds {
    pub region: u32,
    /// One entry per copy: the negative extension vertices backing it,
    /// ascending. Single-copy regions get all their negatives in one entry
    /// without a connectivity computation.
    pub components: Vec<Vec<u32>>,
}

/// Count copies per interior region. Regions whose nodes each carry at most
/// one coincident negative vertex get a single copy; otherwise one copy per
/// connected component of negative vertices, where two vertices are adjacent
/// when they share a hexahedron of the extension mesh.
pub fn count_copies(
    partition: &RegionPartition,
    ext: &VolumetricExtension,
    pool: &VertexPool,
    grid: &GridSpec,
) -> Vec<RegionCopySeeds> {
    let mut negatives_at: HashMap<usize, SmallVec<[u32; 2]>> = HashMap::new();
    for v in pool.iter_ids() {
        if pool.sign(v) == Sign::Negative {
            negatives_at.entry(grid.node_linear(pool.node(v))).or_default().push(v);
        }
    }
    let incidence = ext.mesh.vertex_incidence();

    let mut out = Vec::new();
    for (region_id, region) in partition.interior_regions() {
        let mut all: Vec<u32> = Vec::new();
        let mut multi = false;
        for &n in &region.nodes {
            if let Some(list) = negatives_at.get(&grid.node_linear(n)) {
                multi |= list.len() > 1;
                all.extend_from_slice(list);
            }
        }
        all.sort_unstable();
        debug_assert!(!all.is_empty(), "interior region without negative vertices");
        let components = if !multi {
            vec![all]
        } else {
            let member: HashSet<u32> = all.iter().copied().collect();
            let mut comp: HashMap<u32, u32> = HashMap::new();
            let mut components: Vec<Vec<u32>> = Vec::new();
            let mut stack = Vec::new();
            for &start in &all {
                if comp.contains_key(&start) {
                    continue;
                }
                let id = components.len() as u32;
                comp.insert(start, id);
                stack.push(start);
                let mut group = Vec::new();
                while let Some(v) = stack.pop() {
                    group.push(v);
                    if let Some(hexes) = incidence.get(&v) {
                        for &h in hexes {
                            for &w in ext.mesh.hex(h as usize) {
                                if member.contains(&w) && !comp.contains_key(&w) {
                                    comp.insert(w, id);
                                    stack.push(w);
                                }
                            }
                        }
                    }
                }
                group.sort_unstable();
                components.push(group);
            }
            components
        };
        out.push(RegionCopySeeds { region: region_id, components });
    }
    out
}

/// The first interior mesh of a region: per-node precursors (the center node
/// and its surrounding nodes copied into the pool, 8 hexahedra on the cells
/// incident to the node) merged across uncut region edges. Coincident
/// entries from nodes separated by a cut edge stay distinct.
///
/// Returns the mesh plus the vertices that arose from a merge component
/// containing some precursor's center vertex.
pub fn build_region_mesh(
    grid: &GridSpec,
    region_nodes: &[[i32; 3]],
    cut: &CutEdges,
    pool: &mut VertexPool,
) -> (HexMesh, Vec<u32>) {
    let dim = grid.dim();
    let neighbor_offsets = dim.node_neighbor_offsets();

    let mut nodes = region_nodes.to_vec();
    nodes.sort_unstable_by_key(|&n| grid.node_linear(n));

    // Per node: a block of fresh entries, center first.
    let mut base: HashMap<[i32; 3], u32> = HashMap::with_capacity(nodes.len());
    let mut centers = Vec::with_capacity(nodes.len());
    for &n in &nodes {
        let b = pool.len() as u32;
        base.insert(n, b);
        centers.push(pool.push(n, Sign::Unset));
        for off in neighbor_offsets {
            let m = idx_add(n, *off);
            assert!(grid.node_in_bounds(m), "interior region node too close to the grid boundary");
            pool.push(m, Sign::Unset);
        }
    }
    let entry_of = |b: u32, center: [i32; 3], node: [i32; 3]| -> u32 {
        if node == center {
            return b;
        }
        let off = [node[0] - center[0], node[1] - center[1], node[2] - center[2]];
        let k = neighbor_offsets.iter().position(|o| *o == off).expect("node within block");
        b + 1 + k as u32
    };

    let mut mesh = HexMesh::with_capacity(dim, nodes.len() * dim.node_cell_offsets().len());
    let arity = dim.corners_per_cell();
    let mut corners = vec![0u32; arity];
    for &n in &nodes {
        let b = base[&n];
        for off in dim.node_cell_offsets() {
            let c = idx_add(n, *off);
            assert!(grid.cell_in_bounds(c), "interior region cell out of bounds");
            for (k, slot) in corners.iter_mut().enumerate() {
                *slot = entry_of(b, n, grid.cell_corner_node(c, k));
            }
            mesh.push(c, &corners);
        }
    }

    // Adjacency across uncut region edges: all coincident corner pairs of
    // the cells incident to both nodes.
    let region_set: HashSet<[i32; 3]> = nodes.iter().copied().collect();
    let mut graph = MergeGraph::new();
    for &n in &nodes {
        for a in 0..dim.axes() {
            let mut m = n;
            m[a] += 1;
            if !region_set.contains(&m) || cut.is_cut(grid, n, a) {
                continue;
            }
            let (bn, bm) = (base[&n], base[&m]);
            // Cells incident to both n and m.
            let others: SmallVec<[usize; 2]> = (0..dim.axes()).filter(|&x| x != a).collect();
            for bits in 0..(1usize << others.len()) {
                let mut c = n;
                for (k, &ax) in others.iter().enumerate() {
                    if bits >> k & 1 == 1 {
                        c[ax] -= 1;
                    }
                }
                if !grid.cell_in_bounds(c) {
                    continue;
                }
                for k in 0..arity {
                    let corner = grid.cell_corner_node(c, k);
                    graph.add(entry_of(bn, n, corner), entry_of(bm, m, corner));
                }
            }
        }
    }

    let centers_set: HashSet<u32> = centers.iter().copied().collect();
    let outcome = {
        let mut refs: Vec<&mut HexMesh> = vec![&mut mesh];
        merge_vertices_local(pool, &mut refs, &graph, SignPolicy::KeepRepresentative)
            .expect("region adjacencies are coincident by construction")
    };

    // A vertex belongs to an interior component when its merge group
    // contains some center vertex.
    let mut interior: Vec<u32> = Vec::new();
    let mut in_group: HashSet<u32> = HashSet::new();
    for group in &outcome.merged_groups {
        for &v in group {
            in_group.insert(v);
        }
        if group.iter().any(|v| centers_set.contains(v)) {
            interior.push(outcome.vertex_remap[group[0] as usize]);
        }
    }
    for &c in &centers {
        if !in_group.contains(&c) {
            interior.push(c);
        }
    }
    interior.sort_unstable();
    interior.dedup();
    (mesh, interior)
}

/// A structurally identical mesh over fresh pool entries, with the interior
/// flags carried over.
pub fn duplicate_region_mesh(
    mesh: &HexMesh,
    interior: &[u32],
    pool: &mut VertexPool,
    dim: Dim,
) -> (HexMesh, Vec<u32>) {
    let mut map: HashMap<u32, u32> = HashMap::new();
    let mut ids: Vec<u32> = mesh.vert_ids().to_vec();
    ids.sort_unstable();
    ids.dedup();
    for v in ids {
        let (node, sign) = (pool.node(v), pool.sign(v));
        map.insert(v, pool.push(node, sign));
    }
    let mut out = HexMesh::with_capacity(dim, mesh.len());
    let mut corners = vec![0u32; mesh.arity()];
    for (_, c, h) in mesh.iter() {
        for (k, slot) in corners.iter_mut().enumerate() {
            *slot = map[&h[k]];
        }
        out.push(c, &corners);
    }
    let mut new_interior: Vec<u32> = interior.iter().map(|v| map[v]).collect();
    new_interior.sort_unstable();
    (out, new_interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension;
    use nalgebra::Point3;

    fn build_ext(
        surface: &SurfaceMesh,
        grid: &GridSpec,
        pool: &mut VertexPool,
    ) -> VolumetricExtension {
        let pre = extension::build_precursors(surface, grid, pool).unwrap();
        let mut ext = extension::merge_surface_precursors(pre, surface, pool);
        extension::resolve_sign_conflicts(&mut ext, surface, grid, pool).unwrap();
        ext
    }

    #[test]
    fn cube_partitions_into_interior_and_exterior() {
        let grid = GridSpec::new_3d(Point3::new(-1.3, -1.3, -1.3), 0.45, [8, 8, 8]);
        let cube = crate::surface::unit_cube();
        let mut pool = VertexPool::new();
        let ext = build_ext(&cube, &grid, &mut pool);
        let cut = compute_cut_edges(&cube, &grid).unwrap();
        let partition = partition_grid_nodes(&grid, &cut, &pool);
        assert_eq!(partition.regions.len(), 2);
        assert_eq!(partition.interior_regions().count(), 1);
        let copies = count_copies(&partition, &ext, &pool, &grid);
        assert_eq!(copies.len(), 1);
        assert_eq!(copies[0].components.len(), 1);
    }

    #[test]
    fn one_node_region_mesh_covers_incident_cells() {
        let grid = GridSpec::new_3d(Point3::origin(), 1.0, [6, 6, 6]);
        let cut = CutEdges { cut: vec![false; 3 * grid.total_nodes()], nodes: grid.total_nodes() };
        let mut pool = VertexPool::new();
        let (mesh, interior) = build_region_mesh(&grid, &[[3, 3, 3]], &cut, &mut pool);
        assert_eq!(mesh.len(), 8);
        assert_eq!(pool.len(), 27);
        // Only the center vertex is interior-flagged.
        assert_eq!(interior.len(), 1);
        assert_eq!(pool.node(interior[0]), [3, 3, 3]);
    }

    #[test]
    fn two_node_region_merges_to_twelve_hexes() {
        let grid = GridSpec::new_3d(Point3::origin(), 1.0, [8, 8, 8]);
        let cut = CutEdges { cut: vec![false; 3 * grid.total_nodes()], nodes: grid.total_nodes() };
        let mut pool = VertexPool::new();
        let (mesh, interior) = build_region_mesh(&grid, &[[3, 3, 3], [4, 3, 3]], &cut, &mut pool);
        assert_eq!(mesh.len(), 12);
        assert_eq!(interior.len(), 2);
        // Every covered cell appears exactly once.
        let mut cells: Vec<[i32; 3]> = mesh.iter().map(|(_, c, _)| c).collect();
        cells.sort_unstable();
        cells.dedup();
        assert_eq!(cells.len(), 12);
    }

    #[test]
    fn cut_edge_blocks_sewing() {
        let grid = GridSpec::new_2d(Point3::origin(), 1.0, [8, 8]);
        let total = grid.total_nodes();
        let mut cut = vec![false; 2 * total];
        // Cut the edge between (3,3) and (4,3): axis 0, node (3,3).
        cut[grid.node_linear([3, 3, 0])] = true;
        let cut = CutEdges { cut, nodes: total };
        let mut pool = VertexPool::new();
        let (mesh, _) = build_region_mesh(&grid, &[[3, 3, 0], [4, 3, 0]], &cut, &mut pool);
        // The shared cells are covered twice: coincident quads stay unsewn.
        let mut cell_counts: HashMap<[i32; 3], usize> = HashMap::new();
        for (_, c, _) in mesh.iter() {
            *cell_counts.entry(c).or_default() += 1;
        }
        assert_eq!(cell_counts[&[3, 2, 0]], 2);
        assert_eq!(cell_counts[&[3, 3, 0]], 2);
        assert_eq!(cell_counts[&[2, 2, 0]], 1);
        assert_eq!(cell_counts[&[4, 3, 0]], 1);
    }

    #[test]
    fn duplicated_region_mesh_is_isomorphic_and_disjoint() {
        let grid = GridSpec::new_3d(Point3::origin(), 1.0, [6, 6, 6]);
        let cut = CutEdges { cut: vec![false; 3 * grid.total_nodes()], nodes: grid.total_nodes() };
        let mut pool = VertexPool::new();
        let (mesh, interior) = build_region_mesh(&grid, &[[2, 2, 2], [3, 3, 3]], &cut, &mut pool);
        let (dup, dup_interior) = duplicate_region_mesh(&mesh, &interior, &mut pool, Dim::Three);
        assert_eq!(dup.len(), mesh.len());
        assert_eq!(dup_interior.len(), interior.len());
        // Vertex-id disjoint but structurally identical under the
        // construction mapping.
        let orig_ids: HashSet<u32> = mesh.vert_ids().iter().copied().collect();
        assert!(dup.vert_ids().iter().all(|v| !orig_ids.contains(v)));
        for i in 0..mesh.len() {
            assert_eq!(mesh.cell(i), dup.cell(i));
            for (a, b) in mesh.hex(i).iter().zip(dup.hex(i)) {
                assert_eq!(pool.node(*a), pool.node(*b));
            }
        }
        // A second duplication is disjoint from both.
        let (dup2, _) = duplicate_region_mesh(&mesh, &interior, &mut pool, Dim::Three);
        let dup_ids: HashSet<u32> = dup.vert_ids().iter().copied().collect();
        assert!(dup2.vert_ids().iter().all(|v| !dup_ids.contains(v) && !orig_ids.contains(v)));
    }
}
