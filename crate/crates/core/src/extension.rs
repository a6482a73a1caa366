//! Volumetric extension of the input surface: per-element precursor meshes,
//! topology-aware merging, and vertex signing.

use crate::geometry::{
    self, plane_side_sign, FacetKind, GeomError, QueryPoint, SurfacePatch,
};
use crate::grid::GridSpec;
use crate::hexmesh::HexMesh;
use crate::merge::{merge_vertices, MergeGraph, SignPolicy, DROPPED};
use crate::pool::{Sign, VertexPool};
use crate::surface::SurfaceMesh;
use rayon::prelude::*;
use std::collections::HashMap;

/// Per-element precursor meshes over the shared pool. Each element covers
/// the grid cells it intersects with fresh copies of the grid nodes; copies
/// are shared between neighboring cells of the same precursor only.
pub struct PrecursorSet {
    pub meshes: Vec<HexMesh>,
    /// Creating element per pool entry.
    pub creator: Vec<u32>,
}

/// The merged extension mesh with signing metadata.
pub struct VolumetricExtension {
    pub mesh: HexMesh,
    /// Contributing surface elements per pool vertex (the local patch seed).
    pub contrib: Vec<Vec<u32>>,
    /// Vertices whose merged contributors disagreed on the sign.
    pub conflicted: Vec<u32>,
}

/// Counters for the signing work done by `resolve_sign_conflicts`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SignStats {
    pub resolved: usize,
    pub face_branch: usize,
    pub edge_branch: usize,
    pub vertex_branch: usize,
    pub patch_expansions: usize,
}

impl SignStats {
    pub fn accumulate(&mut self, o: &SignStats) {
        self.resolved += o.resolved;
        self.face_branch += o.face_branch;
        self.edge_branch += o.edge_branch;
        self.vertex_branch += o.vertex_branch;
        self.patch_expansions += o.patch_expansions;
    }
}

/// Cells intersected by one element plus the preliminary sign of every node
/// incident to an intersected cell. Pure, so it can run in parallel.
fn precursor_layout(
    e: u32,
    surface: &SurfaceMesh,
    grid: &GridSpec,
) -> Result<(Vec<[i32; 3]>, Vec<([i32; 3], Sign)>), GeomError> {
    let pts = surface.elem_points(e);
    let (lo, hi) = geometry::bounding_subgrid(&pts, grid)?;
    let mut cells = Vec::new();
    for z in lo[2]..=hi[2] {
        for y in lo[1]..=hi[1] {
            for x in lo[0]..=hi[0] {
                let c = [x, y, z];
                if geometry::tri_cell_intersects(&pts, grid, c) {
                    cells.push(c);
                }
            }
        }
    }
    let mut nodes = Vec::new();
    let mut seen = HashMap::new();
    for &c in &cells {
        for k in 0..grid.dim().corners_per_cell() {
            let n = grid.cell_corner_node(c, k);
            if seen.insert(n, ()).is_none() {
                let side = plane_side_sign(&QueryPoint::Node(grid, n), &pts)?;
                let sign = if side > 0 { Sign::Positive } else { Sign::Negative };
                nodes.push((n, sign));
            }
        }
    }
    Ok((cells, nodes))
}

/// One hexahedron per grid cell intersected by element `e`, with fresh pool
/// entries for the covered nodes and preliminary plane-side signs.
pub fn build_precursor(
    e: u32,
    surface: &SurfaceMesh,
    grid: &GridSpec,
    pool: &mut VertexPool,
) -> Result<HexMesh, GeomError> {
    let (cells, nodes) = precursor_layout(e, surface, grid)?;
    Ok(instantiate_precursor(grid, pool, &cells, &nodes))
}

fn instantiate_precursor(
    grid: &GridSpec,
    pool: &mut VertexPool,
    cells: &[[i32; 3]],
    nodes: &[([i32; 3], Sign)],
) -> HexMesh {
    let mut ids: HashMap<[i32; 3], u32> = HashMap::with_capacity(nodes.len());
    for &(n, sign) in nodes {
        ids.insert(n, pool.push(n, sign));
    }
    let arity = grid.dim().corners_per_cell();
    let mut mesh = HexMesh::with_capacity(grid.dim(), cells.len());
    let mut corners = vec![0u32; arity];
    for &c in cells {
        for (k, slot) in corners.iter_mut().enumerate() {
            *slot = ids[&grid.cell_corner_node(c, k)];
        }
        mesh.push(c, &corners);
    }
    mesh
}

/// Build every element precursor. Intersection tests run in parallel; pool
/// growth is serialized in element order so results are identical for any
/// worker count.
pub fn build_precursors(
    surface: &SurfaceMesh,
    grid: &GridSpec,
    pool: &mut VertexPool,
) -> Result<PrecursorSet, GeomError> {
    let layouts: Result<Vec<_>, GeomError> = (0..surface.elem_count() as u32)
        .into_par_iter()
        .map(|e| precursor_layout(e, surface, grid))
        .collect();
    let layouts = layouts?;
    let mut meshes = Vec::with_capacity(layouts.len());
    let mut creator = Vec::new();
    for (e, (cells, nodes)) in layouts.iter().enumerate() {
        let base = pool.len();
        meshes.push(instantiate_precursor(grid, pool, cells, nodes));
        creator.resize(pool.len(), 0);
        for c in &mut creator[base..] {
            *c = e as u32;
        }
    }
    Ok(PrecursorSet { meshes, creator })
}

/// Merge geometrically coincident hexahedra of precursors whose elements
/// share a surface vertex, carry signs over where contributors agree, and
/// flag the rest as conflicted.
pub fn merge_surface_precursors(
    pre: PrecursorSet,
    surface: &SurfaceMesh,
    pool: &mut VertexPool,
) -> VolumetricExtension {
    let PrecursorSet { mut meshes, creator } = pre;

    let cell_maps: Vec<HashMap<[i32; 3], u32>> = meshes
        .iter()
        .map(|m| m.iter().map(|(i, c, _)| (c, i as u32)).collect())
        .collect();

    let mut graph = MergeGraph::new();
    let mut seen_pairs = std::collections::HashSet::new();
    for i in 0..surface.vert_count() as u32 {
        let elems = surface.elems_of_vertex(i);
        for a in 0..elems.len() {
            for b in (a + 1)..elems.len() {
                let (e0, e1) = (elems[a] as usize, elems[b] as usize);
                if !seen_pairs.insert((e0, e1)) {
                    continue;
                }
                let (small, big) = if meshes[e0].len() <= meshes[e1].len() {
                    (e0, e1)
                } else {
                    (e1, e0)
                };
                for (h_small, cell, corners) in meshes[small].iter() {
                    let _ = h_small;
                    if let Some(&h_big) = cell_maps[big].get(&cell) {
                        let other = meshes[big].hex(h_big as usize);
                        for k in 0..corners.len() {
                            graph.add(corners[k], other[k]);
                        }
                    }
                }
            }
        }
    }

    let outcome = {
        let mut refs: Vec<&mut HexMesh> = meshes.iter_mut().collect();
        merge_vertices(pool, &mut refs, &graph, SignPolicy::AgreeOrUnset)
            .expect("precursor adjacencies are coincident by construction")
    };

    let mut contrib: Vec<Vec<u32>> = vec![Vec::new(); pool.len()];
    for (old, &e) in creator.iter().enumerate() {
        let new = outcome.vertex_remap[old];
        if new != DROPPED {
            contrib[new as usize].push(e);
        }
    }
    for c in &mut contrib {
        c.sort_unstable();
        c.dedup();
    }

    let mut mesh = HexMesh::new(surface.dim());
    for m in &meshes {
        mesh.append(m);
    }
    mesh.dedupe();

    VolumetricExtension { mesh, contrib, conflicted: outcome.conflicted }
}

/// Sign every conflicted vertex from its local surface patch: find the
/// closest facet, expanding the patch with elements incident to edge or
/// vertex facets until it stabilizes, then apply the plane-side or local
/// convexity rule.
pub fn resolve_sign_conflicts(
    ext: &mut VolumetricExtension,
    surface: &SurfaceMesh,
    grid: &GridSpec,
    pool: &mut VertexPool,
) -> Result<SignStats, GeomError> {
    let conflicted = std::mem::take(&mut ext.conflicted);
    let work: Vec<(u32, [i32; 3])> = conflicted.iter().map(|&v| (v, pool.node(v))).collect();
    let contrib = &ext.contrib;
    let results: Result<Vec<(u32, i8, SignStats)>, GeomError> = work
        .par_iter()
        .map(|&(vid, node)| {
            let (sign, stats) = sign_from_patch(surface, grid, &contrib[vid as usize], node)?;
            Ok((vid, sign, stats))
        })
        .collect();
    let mut total = SignStats::default();
    for (vid, sign, stats) in results? {
        pool.set_sign(vid, if sign > 0 { Sign::Positive } else { Sign::Negative });
        total.accumulate(&stats);
    }
    total.resolved = work.len();
    debug_assert!(pool.iter_ids().all(|v| pool.sign(v) != Sign::Unset));
    Ok(total)
}

fn sign_from_patch(
    surface: &SurfaceMesh,
    grid: &GridSpec,
    seed_elems: &[u32],
    node: [i32; 3],
) -> Result<(i8, SignStats), GeomError> {
    let mut stats = SignStats::default();
    let mut patch = SurfacePatch::new(surface, seed_elems.to_vec());
    let pos = grid.node_pos(node);
    let facet = loop {
        let facet = geometry::closest_facet(&patch, pos);
        if facet.kind == FacetKind::Face {
            break facet;
        }
        let mut extra: Vec<u32> = Vec::new();
        for &v in &facet.verts {
            extra.extend(surface.elems_of_vertex(v));
        }
        if patch.extend(extra) == 0 {
            break facet;
        }
        stats.patch_expansions += 1;
        assert!(
            patch.elems().len() <= surface.elem_count(),
            "patch expansion exceeded the surface size"
        );
    };
    let q = QueryPoint::Node(grid, node);
    let sign = match facet.kind {
        FacetKind::Face => {
            stats.face_branch += 1;
            plane_side_sign(&q, &surface.elem_points(facet.elem))?
        }
        FacetKind::Edge => {
            stats.edge_branch += 1;
            geometry::horn_taylor_sign(surface, &facet, &q)?
        }
        FacetKind::Vertex => {
            stats.vertex_branch += 1;
            geometry::horn_taylor_sign(surface, &facet, &q)?
        }
    };
    Ok((sign, stats))
}
