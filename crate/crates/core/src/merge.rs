//! The vertex-welding engine shared by every pipeline stage.
//!
//! Merging views all pool vertices as nodes of one undirected graph whose
//! edges (called adjacencies here, to distinguish them from mesh edges)
//! connect geometrically coincident vertices. Connected components are
//! computed by depth-first search, every component is replaced by its
//! lowest-id member, element arrays are rewritten, duplicate elements are
//! dropped, and the pool is compacted.

use crate::hexmesh::HexMesh;
use crate::pool::{Sign, VertexPool};
use std::fmt;

/// Sentinel remap value for pool entries dropped during compaction.
pub const DROPPED: u32 = u32::MAX;

/// Undirected adjacency pairs over pool entry ids.
#[derive(Clone, Debug, Default)]
pub struct MergeGraph {
    pairs: Vec<(u32, u32)>,
}

impl MergeGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, a: u32, b: u32) {
        if a == b {
            return;
        }
        self.pairs.push(if a < b { (a, b) } else { (b, a) });
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MergeError {
    /// An adjacency pair references vertices on different grid nodes.
    CoincidenceViolation { a: u32, b: u32 },
}

impl fmt::Display for MergeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MergeError::CoincidenceViolation { a, b } => {
                write!(f, "adjacency between non-coincident vertices {a} and {b}")
            }
        }
    }
}

impl std::error::Error for MergeError {}

/// How a merge combines the signs of a merged group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignPolicy {
    /// The representative keeps its own sign.
    KeepRepresentative,
    /// If all group members agree the representative keeps the shared sign,
    /// otherwise it is reset to `Unset` and reported as conflicted.
    AgreeOrUnset,
}

/// Result of a merge: how pool ids moved and which groups were fused.
#[derive(Clone, Debug)]
pub struct MergeOutcome {
    /// Old pool id -> new pool id after compaction (`DROPPED` if removed).
    pub vertex_remap: Vec<u32>,
    /// Old element index -> kept element index, per input mesh, after
    /// duplicate removal. A removed duplicate maps to the surviving equal
    /// element.
    pub hex_remaps: Vec<Vec<u32>>,
    /// Merged groups of size >= 2, in old (pre-compaction) ids, each sorted
    /// ascending so the first entry is the representative.
    pub merged_groups: Vec<Vec<u32>>,
    /// New ids of representatives whose group had disagreeing signs
    /// (only populated under `SignPolicy::AgreeOrUnset`).
    pub conflicted: Vec<u32>,
}

impl MergeOutcome {
    pub fn map_vertex(&self, old: u32) -> u32 {
        self.vertex_remap[old as usize]
    }

    /// Translate a set of old pool ids, dropping removed ones and deduping.
    pub fn translate_ids(&self, ids: &[u32]) -> Vec<u32> {
        let mut out: Vec<u32> = ids
            .iter()
            .map(|&v| self.vertex_remap[v as usize])
            .filter(|&v| v != DROPPED)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Merge coincident vertices connected by `graph` across `meshes`.
///
/// All meshes that reference the pool must be passed in: compaction keeps
/// exactly the entries still referenced by some mesh, and every index array
/// is rewritten in place. Side structures keyed by pool or element ids must
/// be translated through the returned maps.
/// Connected components of the adjacency graph: representative (lowest id)
/// per vertex plus the non-trivial groups.
fn components(
    pool: &VertexPool,
    graph: &MergeGraph,
) -> Result<(Vec<u32>, Vec<Vec<u32>>), MergeError> {
    let n = pool.len();
    for &(a, b) in graph.pairs() {
        if !pool.coincident(a, b) {
            return Err(MergeError::CoincidenceViolation { a, b });
        }
    }
    let mut rep: Vec<u32> = (0..n as u32).collect();
    let mut merged_groups = Vec::new();
    if !graph.is_empty() {
        let mut pairs = graph.pairs().to_vec();
        pairs.sort_unstable();
        pairs.dedup();
        // CSR adjacency over only the ids that occur in pairs.
        let mut degree = vec![0u32; n];
        for &(a, b) in &pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i] as usize;
        }
        let mut adj = vec![0u32; offsets[n]];
        let mut cursor = offsets.clone();
        for &(a, b) in &pairs {
            adj[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
            adj[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        let mut visited = vec![false; n];
        let mut stack = Vec::new();
        for root in 0..n {
            if visited[root] || degree[root] == 0 {
                continue;
            }
            visited[root] = true;
            stack.push(root as u32);
            let mut group = vec![root as u32];
            while let Some(v) = stack.pop() {
                for &w in &adj[offsets[v as usize]..offsets[v as usize + 1]] {
                    if !visited[w as usize] {
                        visited[w as usize] = true;
                        rep[w as usize] = root as u32;
                        group.push(w);
                        stack.push(w);
                    }
                }
            }
            if group.len() > 1 {
                group.sort_unstable();
                merged_groups.push(group);
            }
        }
    }
    Ok((rep, merged_groups))
}

fn combine_signs(pool: &mut VertexPool, groups: &[Vec<u32>], policy: SignPolicy) -> Vec<u32> {
    let mut conflicted = Vec::new();
    if policy == SignPolicy::AgreeOrUnset {
        for group in groups {
            let first = pool.sign(group[0]);
            if group.iter().any(|&v| pool.sign(v) != first) {
                pool.set_sign(group[0], Sign::Unset);
                conflicted.push(group[0]);
            }
        }
    }
    conflicted
}

/// Merge without compaction: vertex ids stay stable (merged-away entries
/// simply become unreferenced), so structures keyed by untouched ids remain
/// valid. Used for merges whose adjacencies are local to freshly created
/// entries; a later compacting merge reclaims the garbage.
pub(crate) fn merge_vertices_local(
    pool: &mut VertexPool,
    meshes: &mut [&mut HexMesh],
    graph: &MergeGraph,
    policy: SignPolicy,
) -> Result<MergeOutcome, MergeError> {
    let (rep, merged_groups) = components(pool, graph)?;
    let conflicted = combine_signs(pool, &merged_groups, policy);
    let mut hex_remaps = Vec::with_capacity(meshes.len());
    for mesh in meshes.iter_mut() {
        mesh.rewrite_verts(|v| rep[v as usize]);
        hex_remaps.push(mesh.dedupe());
    }
    Ok(MergeOutcome { vertex_remap: rep, hex_remaps, merged_groups, conflicted })
}

/// Merge coincident vertices connected by `graph` across `meshes`.
///
/// All meshes that reference the pool must be passed in: compaction keeps
/// exactly the entries still referenced by some mesh, and every index array
/// is rewritten in place. Side structures keyed by pool or element ids must
/// be translated through the returned maps.
pub fn merge_vertices(
    pool: &mut VertexPool,
    meshes: &mut [&mut HexMesh],
    graph: &MergeGraph,
    policy: SignPolicy,
) -> Result<MergeOutcome, MergeError> {
    let (rep, merged_groups) = components(pool, graph)?;
    let conflicted_old = combine_signs(pool, &merged_groups, policy);

    let mut hex_remaps = Vec::with_capacity(meshes.len());
    for mesh in meshes.iter_mut() {
        mesh.rewrite_verts(|v| rep[v as usize]);
        hex_remaps.push(mesh.dedupe());
    }

    // Drop entries no longer referenced by any mesh.
    let n = pool.len();
    let mut used = vec![false; n];
    for mesh in meshes.iter() {
        for &v in mesh.vert_ids() {
            used[v as usize] = true;
        }
    }
    let compaction = pool.compact(&used);
    let vertex_remap: Vec<u32> = rep.iter().map(|&r| compaction[r as usize]).collect();

    for mesh in meshes.iter_mut() {
        mesh.rewrite_verts(|v| compaction[v as usize]);
        debug_assert!(mesh.vert_ids().iter().all(|&v| (v as usize) < pool.len()));
    }

    let conflicted = conflicted_old
        .into_iter()
        .map(|v| vertex_remap[v as usize])
        .filter(|&v| v != DROPPED)
        .collect();

    Ok(MergeOutcome { vertex_remap, hex_remaps, merged_groups, conflicted })
}
