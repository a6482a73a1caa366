//! Interior extension region merging: sew region copies into the volumetric
//! extension and into each other through overlap lists, deduplicating
//! over-counted copies along the way.

use crate::extension::VolumetricExtension;
use crate::hexmesh::HexMesh;
use crate::merge::{merge_vertices, MergeGraph, MergeOutcome, SignPolicy};
use crate::pool::VertexPool;
use rayon::prelude::*;
use smallvec::SmallVec;
use std::collections::{HashMap, HashSet};

/// One copy of an interior region: its mesh, the negative extension
/// vertices backing it, and bookkeeping for the merge steps.
#[derive(Clone, Debug)]
pub struct RegionCopy {
    pub region: u32,
    pub copy: u32,
    pub mesh: HexMesh,
    /// Backing negative extension vertices, ascending.
    pub c_set: Vec<u32>,
    /// Mesh vertices that arose from an interior merge component.
    pub interior: Vec<u32>,
    /// Extension hexes copied into this mesh (current extension indices).
    pub boundary_hexes: Vec<u32>,
    pub alive: bool,
    /// Set when this copy was deduplicated into a representative.
    pub dup_of: Option<u32>,
}

impl RegionCopy {
    pub fn new(region: u32, copy: u32, mesh: HexMesh, c_set: Vec<u32>, interior: Vec<u32>) -> Self {
        RegionCopy {
            region,
            copy,
            mesh,
            c_set,
            interior,
            boundary_hexes: Vec::new(),
            alive: true,
            dup_of: None,
        }
    }
}

/// A pair of region copies with a common boundary, plus the grown seed list
/// of geometrically coincident hexahedron pairs used to sew them.
#[derive(Clone, Debug)]
pub struct OverlapList {
    pub a: u32,
    pub b: u32,
    /// (hex in copy a's mesh, hex in copy b's mesh); coincident by
    /// construction.
    pub seeds: Vec<(u32, u32)>,
}

/// Merge over the extension mesh and every copy mesh, then translate all
/// id-keyed bookkeeping through the outcome.
fn merge_all(
    pool: &mut VertexPool,
    ext: &mut VolumetricExtension,
    copies: &mut [RegionCopy],
    graph: &MergeGraph,
) -> MergeOutcome {
    let outcome = {
        let mut refs: Vec<&mut HexMesh> = Vec::with_capacity(copies.len() + 1);
        refs.push(&mut ext.mesh);
        for c in copies.iter_mut() {
            refs.push(&mut c.mesh);
        }
        merge_vertices(pool, &mut refs, graph, SignPolicy::KeepRepresentative)
            .expect("merge adjacencies are coincident by construction")
    };
    let ext_hex_remap = &outcome.hex_remaps[0];
    for c in copies.iter_mut() {
        c.c_set = outcome.translate_ids(&c.c_set);
        c.interior = outcome.translate_ids(&c.interior);
        let mut hexes: Vec<u32> =
            c.boundary_hexes.iter().map(|&h| ext_hex_remap[h as usize]).collect();
        hexes.sort_unstable();
        hexes.dedup();
        c.boundary_hexes = hexes;
    }
    outcome
}

/// Merge geometrically coincident vertices that both back the same copy.
/// This closes interior voids of the copy without sewing the exterior:
/// coincident positive vertices are never touched.
pub fn preliminary_coincident_merge(
    target: usize,
    ext: &mut VolumetricExtension,
    copies: &mut [RegionCopy],
    pool: &mut VertexPool,
) {
    let mut by_node: HashMap<[i32; 3], SmallVec<[u32; 2]>> = HashMap::new();
    for &v in &copies[target].c_set {
        by_node.entry(pool.node(v)).or_default().push(v);
    }
    let mut graph = MergeGraph::new();
    for group in by_node.values() {
        for k in 1..group.len() {
            graph.add(group[0], group[k]);
        }
    }
    if graph.is_empty() {
        return;
    }
    merge_all(pool, ext, copies, &graph);
}

/// Sew one region copy onto the extension boundary: merge its interior-
/// component vertices with the coincident backing vertices, collect the
/// extension hexes incident to the backing set, replace the copy's
/// coincident hexes with copies of those extension hexes.
pub fn merge_copy_with_boundary(
    target: usize,
    ext: &mut VolumetricExtension,
    copies: &mut [RegionCopy],
    pool: &mut VertexPool,
) {
    // (a) Backing vertices bind only to interior-component copy vertices.
    let mut interior_at: HashMap<[i32; 3], SmallVec<[u32; 2]>> = HashMap::new();
    for &v in &copies[target].interior {
        interior_at.entry(pool.node(v)).or_default().push(v);
    }
    let mut graph = MergeGraph::new();
    for &cv in &copies[target].c_set {
        if let Some(ivs) = interior_at.get(&pool.node(cv)) {
            for &iv in ivs {
                graph.add(cv, iv);
            }
        }
    }
    merge_all(pool, ext, copies, &graph);

    // (b) Extension hexes incident to the backing set.
    let incidence = ext.mesh.vertex_incidence();
    let mut marked: Vec<u32> = Vec::new();
    for &cv in &copies[target].c_set {
        if let Some(hexes) = incidence.get(&cv) {
            marked.extend_from_slice(hexes);
        }
    }
    marked.sort_unstable();
    marked.dedup();

    // (c) Remove copy hexes coincident with a marked hex and incident to a
    // backing vertex.
    let marked_cells: HashSet<[i32; 3]> =
        marked.iter().map(|&h| ext.mesh.cell(h as usize)).collect();
    let c_set: HashSet<u32> = copies[target].c_set.iter().copied().collect();
    let mesh = &mut copies[target].mesh;
    let keep: Vec<bool> = (0..mesh.len())
        .map(|i| {
            !(marked_cells.contains(&mesh.cell(i))
                && mesh.hex(i).iter().any(|v| c_set.contains(v)))
        })
        .collect();
    mesh.retain(&keep);

    // (d) Copy the marked extension hexes into the copy's mesh.
    for &h in &marked {
        let cell = ext.mesh.cell(h as usize);
        let corners: SmallVec<[u32; 8]> = ext.mesh.hex(h as usize).iter().copied().collect();
        copies[target].mesh.push(cell, &corners);
    }
    copies[target].boundary_hexes = marked;
}

fn tuple_key(hex: &[u32]) -> SmallVec<[u32; 8]> {
    SmallVec::from_slice(hex)
}

fn ext_tuple_map(ext: &VolumetricExtension) -> HashMap<SmallVec<[u32; 8]>, u32> {
    ext.mesh
        .iter()
        .map(|(i, _, h)| (tuple_key(h), i as u32))
        .collect()
}

/// Seed and grow the overlap lists between every pair of live copies that
/// contain a copy of the same extension hexahedron.
pub fn build_overlap_lists(copies: &[RegionCopy], ext: &VolumetricExtension) -> Vec<OverlapList> {
    let ext_tuples = ext_tuple_map(ext);

    // Owners of each extension hex among the copies.
    let mut owners: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for (ci, c) in copies.iter().enumerate() {
        if !c.alive {
            continue;
        }
        for (hi, _, h) in c.mesh.iter() {
            if let Some(&e) = ext_tuples.get(&tuple_key(h)) {
                owners.entry(e).or_default().push((ci as u32, hi as u32));
            }
        }
    }

    let mut lists: HashMap<(u32, u32), Vec<(u32, u32)>> = HashMap::new();
    let mut ext_ids: Vec<u32> = owners.keys().copied().collect();
    ext_ids.sort_unstable();
    for e in ext_ids {
        let mut who = owners.remove(&e).unwrap();
        who.sort_unstable();
        for i in 0..who.len() {
            for j in (i + 1)..who.len() {
                let ((ca, ha), (cb, hb)) = (who[i], who[j]);
                if ca == cb {
                    continue;
                }
                lists.entry((ca, cb)).or_default().push((ha, hb));
            }
        }
    }

    let mut keys: Vec<(u32, u32)> = lists.keys().copied().collect();
    keys.sort_unstable();

    // Per-copy vertex incidence, shared across pair expansions.
    let incidences: Vec<HashMap<u32, Vec<u32>>> = copies
        .par_iter()
        .map(|c| if c.alive { c.mesh.vertex_incidence() } else { HashMap::new() })
        .collect();

    keys.par_iter()
        .map(|&(ca, cb)| {
            let mut seeds = lists[&(ca, cb)].clone();
            let mesh_a = &copies[ca as usize].mesh;
            let mesh_b = &copies[cb as usize].mesh;
            let mut visited: HashSet<[i32; 3]> = seeds
                .iter()
                .map(|&(ha, _)| mesh_a.cell(ha as usize))
                .collect();
            let neighbor_list = |mesh: &HexMesh, inc: &HashMap<u32, Vec<u32>>, h: u32| {
                let mut out: Vec<u32> = Vec::new();
                for &v in mesh.hex(h as usize) {
                    if let Some(hs) = inc.get(&v) {
                        out.extend_from_slice(hs);
                    }
                }
                out.sort_unstable();
                out.dedup();
                out
            };
            let mut idx = 0;
            while idx < seeds.len() {
                let (ha, hb) = seeds[idx];
                idx += 1;
                let na = neighbor_list(mesh_a, &incidences[ca as usize], ha);
                let nb = neighbor_list(mesh_b, &incidences[cb as usize], hb);
                for &x in &na {
                    let cx = mesh_a.cell(x as usize);
                    if visited.contains(&cx) {
                        continue;
                    }
                    for &y in &nb {
                        if mesh_b.cell(y as usize) == cx {
                            seeds.push((x, y));
                            visited.insert(cx);
                            break;
                        }
                    }
                }
            }
            OverlapList { a: ca, b: cb, seeds }
        })
        .collect()
}

/// Find copies of one region revealed as duplicates by the overlap lists,
/// merge each duplicate group into its lowest-index copy, re-run the
/// boundary merge for the representative with the union of backing sets,
/// and rebuild the overlap lists. Iterates to a fixed point; returns the
/// number of copies removed.
pub fn deduplicate_copies(
    overlaps: &mut Vec<OverlapList>,
    copies: &mut Vec<RegionCopy>,
    ext: &mut VolumetricExtension,
    pool: &mut VertexPool,
) -> usize {
    let mut events = 0;
    loop {
        let ext_tuples = ext_tuple_map(ext);
        // For every extension hex: the copies whose seed hexes are copies
        // of it.
        let mut per_ext: HashMap<u32, Vec<u32>> = HashMap::new();
        for list in overlaps.iter() {
            for &(ha, hb) in &list.seeds {
                let ta = tuple_key(copies[list.a as usize].mesh.hex(ha as usize));
                let tb = tuple_key(copies[list.b as usize].mesh.hex(hb as usize));
                let mut hit = |e: u32| {
                    let entry = per_ext.entry(e).or_default();
                    entry.push(list.a);
                    entry.push(list.b);
                };
                if let Some(&e) = ext_tuples.get(&ta) {
                    hit(e);
                }
                if let Some(&e) = ext_tuples.get(&tb) {
                    hit(e);
                }
            }
        }

        // Union copies of the same region that appear on one list.
        let mut dsu: Vec<u32> = (0..copies.len() as u32).collect();
        fn find(dsu: &mut Vec<u32>, x: u32) -> u32 {
            if dsu[x as usize] != x {
                let r = find(dsu, dsu[x as usize]);
                dsu[x as usize] = r;
                r
            } else {
                x
            }
        }
        let mut any = false;
        let mut ext_ids: Vec<u32> = per_ext.keys().copied().collect();
        ext_ids.sort_unstable();
        for e in ext_ids {
            let mut who = per_ext.remove(&e).unwrap();
            who.sort_unstable();
            who.dedup();
            for i in 0..who.len() {
                for j in (i + 1)..who.len() {
                    let (a, b) = (who[i], who[j]);
                    if copies[a as usize].region == copies[b as usize].region {
                        let (ra, rb) = (find(&mut dsu, a), find(&mut dsu, b));
                        if ra != rb {
                            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                            dsu[hi as usize] = lo;
                            any = true;
                        }
                    }
                }
            }
        }
        if !any {
            break;
        }

        // Collapse each duplicate group into its lowest-index copy.
        let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
        for i in 0..copies.len() as u32 {
            let r = find(&mut dsu, i);
            groups.entry(r).or_default().push(i);
        }
        let mut reps: Vec<u32> = groups
            .iter()
            .filter(|(_, g)| g.len() > 1)
            .map(|(&r, _)| r)
            .collect();
        reps.sort_unstable();
        for rep in reps {
            let group = groups[&rep].clone();
            let mut union_c: Vec<u32> = Vec::new();
            for &m in &group {
                union_c.extend_from_slice(&copies[m as usize].c_set);
            }
            union_c.sort_unstable();
            union_c.dedup();
            copies[rep as usize].c_set = union_c;
            for &m in &group {
                if m != rep {
                    copies[m as usize].alive = false;
                    copies[m as usize].dup_of = Some(rep);
                    copies[m as usize].mesh = HexMesh::new(
                        if copies[m as usize].mesh.arity() == 4 {
                            crate::grid::Dim::Two
                        } else {
                            crate::grid::Dim::Three
                        },
                    );
                    copies[m as usize].c_set.clear();
                    copies[m as usize].interior.clear();
                    copies[m as usize].boundary_hexes.clear();
                    events += 1;
                }
            }
            preliminary_coincident_merge(rep as usize, ext, copies, pool);
            merge_copy_with_boundary(rep as usize, ext, copies, pool);
        }

        *overlaps = build_overlap_lists(copies, ext);
    }
    events
}

/// Merge all copies along their overlap lists and assemble the final mesh:
/// the live copy meshes plus the extension hexes never copied into any
/// copy. The pool is compacted to exactly the vertices of the result.
pub fn final_merge(
    overlaps: &[OverlapList],
    copies: &mut Vec<RegionCopy>,
    ext: &mut VolumetricExtension,
    pool: &mut VertexPool,
) -> HexMesh {
    let mut graph = MergeGraph::new();
    for list in overlaps {
        let mesh_a = &copies[list.a as usize].mesh;
        let mesh_b = &copies[list.b as usize].mesh;
        for &(ha, hb) in &list.seeds {
            let (ta, tb) = (mesh_a.hex(ha as usize), mesh_b.hex(hb as usize));
            debug_assert_eq!(mesh_a.cell(ha as usize), mesh_b.cell(hb as usize));
            for k in 0..ta.len() {
                graph.add(ta[k], tb[k]);
            }
        }
    }
    merge_all(pool, ext, copies, &graph);

    let dim = if ext.mesh.arity() == 4 { crate::grid::Dim::Two } else { crate::grid::Dim::Three };
    let mut result = HexMesh::new(dim);
    let mut copied: HashSet<u32> = HashSet::new();
    for c in copies.iter() {
        if c.alive {
            result.append(&c.mesh);
            copied.extend(c.boundary_hexes.iter().copied());
        }
    }
    for i in 0..ext.mesh.len() as u32 {
        if !copied.contains(&i) {
            result.push_from(&ext.mesh, i as usize);
        }
    }
    result.dedupe();

    // Containment: the extension survives into the final mesh verbatim.
    #[cfg(debug_assertions)]
    {
        let present: HashSet<&[u32]> = result.iter().map(|(_, _, h)| h).collect();
        for (_, _, h) in ext.mesh.iter() {
            debug_assert!(present.contains(h), "extension hexahedron lost in the final merge");
        }
    }

    // Compact the pool to the final mesh alone.
    let mut refs: Vec<&mut HexMesh> = vec![&mut result];
    merge_vertices(pool, &mut refs, &MergeGraph::new(), SignPolicy::KeepRepresentative)
        .expect("empty graph cannot violate coincidence");
    result
}
