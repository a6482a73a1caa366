//! Focused checks of the region-copy sewing machinery: boundary merges,
//! overlap lists, deduplication, and the final merge.

use hexbed_core::extension::{self, VolumetricExtension};
use hexbed_core::grid::{idx_add, Dim, GridSpec};
use hexbed_core::hexmesh::HexMesh;
use hexbed_core::merging::{self, RegionCopy};
use hexbed_core::pool::{Sign, VertexPool};
use hexbed_core::regions;
use hexbed_core::shapes;
use hexbed_core::surface::{cube_at, unit_cube, SurfaceMesh};
use nalgebra::Point3;
use std::collections::{HashMap, HashSet};

struct Stages {
    pool: VertexPool,
    ext: VolumetricExtension,
    copies: Vec<RegionCopy>,
}

/// Drive the pipeline up to (and including) the per-copy boundary merges.
fn stages_to_boundary(surface: &SurfaceMesh, grid: GridSpec) -> Stages {
    let mut pool = VertexPool::new();
    let pre = extension::build_precursors(surface, &grid, &mut pool).unwrap();
    let mut ext = extension::merge_surface_precursors(pre, surface, &mut pool);
    extension::resolve_sign_conflicts(&mut ext, surface, &grid, &mut pool).unwrap();
    let cut = regions::compute_cut_edges(surface, &grid).unwrap();
    let partition = regions::partition_grid_nodes(&grid, &cut, &pool);
    let seeds = regions::count_copies(&partition, &ext, &pool, &grid);
    let mut copies = Vec::new();
    for seed in &seeds {
        let nodes = &partition.regions[seed.region as usize].nodes;
        let (mesh0, interior0) = regions::build_region_mesh(&grid, nodes, &cut, &mut pool);
        for (c, comp) in seed.components.iter().enumerate() {
            let (mesh, interior) = if c == 0 {
                (mesh0.clone(), interior0.clone())
            } else {
                regions::duplicate_region_mesh(&mesh0, &interior0, &mut pool, grid.dim())
            };
            copies.push(RegionCopy::new(seed.region, c as u32, mesh, comp.clone(), interior));
        }
    }
    for i in 0..copies.len() {
        merging::preliminary_coincident_merge(i, &mut ext, &mut copies, &mut pool);
        merging::merge_copy_with_boundary(i, &mut ext, &mut copies, &mut pool);
    }
    Stages { pool, ext, copies }
}

/// A single convex solid: the preliminary merge is the identity (no node
/// carries two backing vertices), and the boundary merge replaces the
/// copy's coincident shell with copies of the extension hexes.
#[test]
fn boundary_merge_on_a_cube() {
    let cube = unit_cube();
    let grid = GridSpec::new_3d(Point3::new(-0.45, -0.4, -0.42), 0.17, [12, 12, 12]);

    let mut pool = VertexPool::new();
    let pre = extension::build_precursors(&cube, &grid, &mut pool).unwrap();
    let mut ext = extension::merge_surface_precursors(pre, &cube, &mut pool);
    extension::resolve_sign_conflicts(&mut ext, &cube, &grid, &mut pool).unwrap();
    let cut = regions::compute_cut_edges(&cube, &grid).unwrap();
    let partition = regions::partition_grid_nodes(&grid, &cut, &pool);
    let seeds = regions::count_copies(&partition, &ext, &pool, &grid);
    assert_eq!(seeds.len(), 1);
    assert_eq!(seeds[0].components.len(), 1);

    let region_nodes = &partition.regions[seeds[0].region as usize].nodes;
    let (mesh0, interior0) = regions::build_region_mesh(&grid, region_nodes, &cut, &mut pool);
    let mut copies = vec![RegionCopy::new(
        seeds[0].region,
        0,
        mesh0,
        seeds[0].components[0].clone(),
        interior0,
    )];

    // No node carries two coincident backing vertices here, so the
    // preliminary merge changes nothing.
    let pool_before = pool.len();
    merging::preliminary_coincident_merge(0, &mut ext, &mut copies, &mut pool);
    assert_eq!(pool.len(), pool_before);

    merging::merge_copy_with_boundary(0, &mut ext, &mut copies, &mut pool);
    // Every marked extension hex is now present in the copy's mesh with the
    // same corner ids.
    let copy_tuples: HashSet<&[u32]> = copies[0].mesh.iter().map(|(_, _, h)| h).collect();
    assert!(!copies[0].boundary_hexes.is_empty());
    for &h in &copies[0].boundary_hexes {
        assert!(copy_tuples.contains(ext.mesh.hex(h as usize)));
    }
    // No remaining copy hex is both coincident with a marked hex and
    // incident to a backing vertex, other than the copied-in hexes
    // themselves.
    let marked_cells: HashSet<[i32; 3]> = copies[0]
        .boundary_hexes
        .iter()
        .map(|&h| ext.mesh.cell(h as usize))
        .collect();
    let ext_tuples: HashSet<&[u32]> = ext.mesh.iter().map(|(_, _, h)| h).collect();
    let c_set: HashSet<u32> = copies[0].c_set.iter().copied().collect();
    for (_, cell, h) in copies[0].mesh.iter() {
        if marked_cells.contains(&cell)
            && h.iter().any(|v| c_set.contains(v))
            && !ext_tuples.contains(h)
        {
            panic!("unreplaced copy hex at {cell:?}");
        }
    }
}

/// Overlap lists on the two-cube configuration: the grown seed set of each
/// pair covers exactly the common cells reachable from the initial seeds,
/// per an independent cell-level flood fill.
#[test]
fn overlap_lists_cover_reachable_common_cells() {
    let a = unit_cube();
    let b = cube_at(Point3::new(0.7, 0.0, 0.0), 1.0);
    let both = shapes::combine(&[&a, &b]);
    let grid = GridSpec::new_3d(Point3::new(-0.4, -0.35, -0.3), 1.7 / 18.0, [29, 22, 21]);
    let stages = stages_to_boundary(&both, grid);
    let overlaps = merging::build_overlap_lists(&stages.copies, &stages.ext);
    assert!(!overlaps.is_empty());

    let ext_tuples: HashSet<&[u32]> = stages.ext.mesh.iter().map(|(_, _, h)| h).collect();
    for list in &overlaps {
        let mesh_a = &stages.copies[list.a as usize].mesh;
        let mesh_b = &stages.copies[list.b as usize].mesh;
        let cells_a: HashSet<[i32; 3]> = mesh_a.iter().map(|(_, c, _)| c).collect();
        let cells_b: HashSet<[i32; 3]> = mesh_b.iter().map(|(_, c, _)| c).collect();
        let common: HashSet<[i32; 3]> = cells_a.intersection(&cells_b).copied().collect();

        // Initial seeds: shared extension hexes present in both meshes.
        let tuples_b: HashSet<&[u32]> = mesh_b.iter().map(|(_, _, h)| h).collect();
        let mut frontier: Vec<[i32; 3]> = mesh_a
            .iter()
            .filter(|(_, _, h)| ext_tuples.contains(h) && tuples_b.contains(h))
            .map(|(_, c, _)| c)
            .collect();
        let mut expected: HashSet<[i32; 3]> = frontier.iter().copied().collect();
        // Reachable common cells over vertex adjacency.
        while let Some(c) = frontier.pop() {
            for dz in -1..=1 {
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let n = idx_add(c, [dx, dy, dz]);
                        if common.contains(&n) && expected.insert(n) {
                            frontier.push(n);
                        }
                    }
                }
            }
        }

        let visited: HashSet<[i32; 3]> = list
            .seeds
            .iter()
            .map(|&(ha, _)| mesh_a.cell(ha as usize))
            .collect();
        assert_eq!(visited, expected, "pair ({}, {})", list.a, list.b);
    }

    // No deduplication on this input: the two lens copies never share a
    // boundary hexahedron.
    let mut overlaps = overlaps;
    let mut copies = stages.copies;
    let mut ext = stages.ext;
    let mut pool = stages.pool;
    let events = merging::deduplicate_copies(&mut overlaps, &mut copies, &mut ext, &mut pool);
    assert_eq!(events, 0);

    // Final merge: two components, and every cell covered by any copy stays
    // covered.
    let covered_before: HashSet<[i32; 3]> = copies
        .iter()
        .flat_map(|c| c.mesh.iter().map(|(_, cell, _)| cell).collect::<Vec<_>>())
        .chain(ext.mesh.iter().map(|(_, cell, _)| cell))
        .collect();
    let mesh = merging::final_merge(&overlaps, &mut copies, &mut ext, &mut pool);
    let covered_after: HashSet<[i32; 3]> = mesh.iter().map(|(_, c, _)| c).collect();
    assert_eq!(covered_before, covered_after);
    let (_, n) = hexbed_core::hexmesh::connected_components(&mesh);
    assert_eq!(n, 2);
}

/// Copies of one region revealed as duplicates through a third region's
/// boundary hexahedron are merged into the lowest-index copy; rebuilding
/// restores complete boundary information.
#[test]
fn duplicates_detected_through_another_regions_boundary_hex() {
    let dim = Dim::Three;
    let grid = GridSpec::new_3d(Point3::origin(), 1.0, [8, 8, 8]);
    let mut pool = VertexPool::new();

    // Extension: two grid-native hexes g (cell c1) and h (cell c0) sharing
    // a face.
    let (c0, c1) = ([2, 2, 2], [3, 2, 2]);
    let mut ids: HashMap<[i32; 3], u32> = HashMap::new();
    let mut ext_mesh = HexMesh::new(dim);
    let mut corners = [0u32; 8];
    for cell in [c0, c1] {
        for (k, slot) in corners.iter_mut().enumerate() {
            let n = grid.cell_corner_node(cell, k);
            *slot = *ids.entry(n).or_insert_with(|| pool.push(n, Sign::Negative));
        }
        ext_mesh.push(cell, &corners);
    }
    let h_idx = 0u32;
    let g_idx = 1u32;
    let shared_vertex = *ids.get(&[3, 2, 2]).unwrap();
    let ext = VolumetricExtension { mesh: ext_mesh, contrib: Vec::new(), conflicted: Vec::new() };
    let mut ext = ext;

    // Copy B of region 1 holds copies of both extension hexes.
    let mut b_mesh = HexMesh::new(dim);
    b_mesh.push_from(&ext.mesh, h_idx as usize);
    b_mesh.push_from(&ext.mesh, g_idx as usize);
    let mut copy_b = RegionCopy::new(1, 0, b_mesh, vec![shared_vertex], Vec::new());
    copy_b.boundary_hexes = vec![h_idx, g_idx];

    // Copies 0 and 1 of region 0 each hold a copy of h plus their own
    // private hex on cell c1 sharing vertices with it.
    let make_y = |pool: &mut VertexPool, copy: u32| -> RegionCopy {
        let mut mesh = HexMesh::new(dim);
        mesh.push_from(&ext.mesh, h_idx as usize);
        let mut corners = [0u32; 8];
        for (k, slot) in corners.iter_mut().enumerate() {
            let n = grid.cell_corner_node(c1, k);
            // Reuse the shared-face ids from h so the private hex is a
            // neighbor of the copied boundary hex.
            *slot = if n[0] == 3 { ids[&n] } else { pool.push(n, Sign::Unset) };
        }
        mesh.push(c1, &corners);
        let mut y = RegionCopy::new(0, copy, mesh, vec![shared_vertex], Vec::new());
        y.boundary_hexes = vec![h_idx];
        y
    };
    let y0 = make_y(&mut pool, 0);
    let y1 = make_y(&mut pool, 1);
    let mut copies = vec![y0, y1, copy_b];

    let mut overlaps = merging::build_overlap_lists(&copies, &ext);
    // Expansion pairs each private yellow hex with the blue copy of g.
    assert!(overlaps
        .iter()
        .any(|l| l.seeds.iter().any(|&(ha, hb)| {
            let (ma, mb) = (&copies[l.a as usize].mesh, &copies[l.b as usize].mesh);
            ma.cell(ha as usize) == c1 && mb.cell(hb as usize) == c1
        })));

    let events = merging::deduplicate_copies(&mut overlaps, &mut copies, &mut ext, &mut pool);
    assert_eq!(events, 1);
    assert!(copies[0].alive);
    assert!(!copies[1].alive);
    assert_eq!(copies[1].dup_of, Some(0));
    assert!(copies[2].alive);
    // The representative was rebuilt with boundary copies of both
    // extension hexes it now touches.
    assert!(copies[0].boundary_hexes.contains(&h_idx));
    // Overlap lists reference only live copies.
    assert!(overlaps.iter().all(|l| copies[l.a as usize].alive && copies[l.b as usize].alive));
}

/// Three pairwise-duplicated copies collapse to a single representative in
/// one deduplication pass.
#[test]
fn three_duplicates_collapse_to_one() {
    let dim = Dim::Three;
    let grid = GridSpec::new_3d(Point3::origin(), 1.0, [6, 6, 6]);
    let mut pool = VertexPool::new();
    let cell = [2, 2, 2];
    let mut corners = [0u32; 8];
    let mut ext_mesh = HexMesh::new(dim);
    for (k, slot) in corners.iter_mut().enumerate() {
        *slot = pool.push(grid.cell_corner_node(cell, k), Sign::Negative);
    }
    ext_mesh.push(cell, &corners);
    let mut ext =
        VolumetricExtension { mesh: ext_mesh, contrib: Vec::new(), conflicted: Vec::new() };

    // Three copies of region 0, all containing a copy of the extension hex.
    let mut copies: Vec<RegionCopy> = (0..3)
        .map(|c| {
            let mut mesh = HexMesh::new(dim);
            mesh.push_from(&ext.mesh, 0);
            let mut rc = RegionCopy::new(0, c, mesh, vec![corners[0]], Vec::new());
            rc.boundary_hexes = vec![0];
            rc
        })
        .collect();

    let mut overlaps = merging::build_overlap_lists(&copies, &ext);
    assert_eq!(overlaps.len(), 3); // all pairs share the seed hex
    let events = merging::deduplicate_copies(&mut overlaps, &mut copies, &mut ext, &mut pool);
    assert_eq!(events, 2);
    assert!(copies[0].alive && !copies[1].alive && !copies[2].alive);
    assert_eq!(copies[1].dup_of, Some(0));
    assert_eq!(copies[2].dup_of, Some(0));
    assert!(overlaps.is_empty());
}
