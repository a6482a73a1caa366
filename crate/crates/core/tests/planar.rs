//! Planar (segment-loop to quadrilateral-mesh) pipeline behavior on the
//! small configurations that drive the merging rules.

use hexbed_core::extension::{self, VolumetricExtension};
use hexbed_core::grid::GridSpec;
use hexbed_core::merging;
use hexbed_core::oracle;
use hexbed_core::pipeline::build_embedding;
use hexbed_core::pool::{Sign, VertexPool};
use hexbed_core::regions;
use hexbed_core::shapes;
use hexbed_core::surface::SurfaceMesh;
use nalgebra::Point3;

fn build_ext(surface: &SurfaceMesh, grid: &GridSpec, pool: &mut VertexPool) -> VolumetricExtension {
    let pre = extension::build_precursors(surface, grid, pool).unwrap();
    let mut ext = extension::merge_surface_precursors(pre, surface, pool);
    extension::resolve_sign_conflicts(&mut ext, surface, grid, pool).unwrap();
    ext
}

fn count_at(pool: &VertexPool, node: [i32; 3], sign: Sign) -> usize {
    pool.iter_ids()
        .filter(|&v| pool.node(v) == node && pool.sign(v) == sign)
        .count()
}

/// Two bottom segments meeting inside a cell merge their coincident copies
/// there, while the band's far side crossing the same cell stays separate:
/// the twelve vertices bordering the shared cell become eight.
#[test]
fn split_band_merges_12_cell_vertices_into_8() {
    let band = shapes::split_band(-3.2, 4.2, 0.3, 0.7, 0.5);
    assert!(band.validate().is_ok());
    let grid = GridSpec::new_2d(Point3::new(-6.0, -2.0, 0.0), 1.0, [12, 5]);
    // The shared cell is the world unit square [0,1]^2.
    let cell = [6, 2, 0];
    let corner_nodes: Vec<[i32; 3]> = (0..4)
        .map(|k| grid.cell_corner_node(cell, k))
        .collect();

    let mut pool = VertexPool::new();
    let pre = extension::build_precursors(&band, &grid, &mut pool).unwrap();
    // Exactly three precursors cover the shared cell: the two bottom
    // segments and the top segment.
    let covering: Vec<usize> = pre
        .meshes
        .iter()
        .enumerate()
        .filter(|(_, m)| m.iter().any(|(_, c, _)| c == cell))
        .map(|(e, _)| e)
        .collect();
    assert_eq!(covering, vec![0, 1, 3]);
    let before: usize = corner_nodes
        .iter()
        .map(|&n| pool.iter_ids().filter(|&v| pool.node(v) == n).count())
        .sum();
    assert_eq!(before, 12);

    let ext = merge_surface_precursors_for_test(pre, &band, &mut pool);
    let after: usize = corner_nodes
        .iter()
        .map(|&n| pool.iter_ids().filter(|&v| pool.node(v) == n).count())
        .sum();
    assert_eq!(after, 8);
    drop(ext);
}

fn merge_surface_precursors_for_test(
    pre: extension::PrecursorSet,
    surface: &SurfaceMesh,
    pool: &mut VertexPool,
) -> VolumetricExtension {
    extension::merge_surface_precursors(pre, surface, pool)
}

/// Shifting a sub-cell hole onto a grid node cuts all of the node's edges:
/// the node loses its connection to the surrounding region and becomes an
/// extra region of its own. Grid-edge connectivity over-counts by design.
#[test]
fn hole_shift_isolates_a_node_into_an_extra_region() {
    let grid = GridSpec::new_2d(Point3::new(-1.0, -1.0, 0.0), 1.0, [7, 6]);

    // Hole between nodes: no node is isolated.
    let baseline =
        shapes::rectangle_with_hole([0.4, 0.4], [4.6, 3.6], [2.2, 1.7], [2.8, 2.3]);
    assert!(baseline.validate().is_ok());
    let mut pool_a = VertexPool::new();
    let _ext_a = build_ext(&baseline, &grid, &mut pool_a);
    let cut_a = regions::compute_cut_edges(&baseline, &grid).unwrap();
    let part_a = regions::partition_grid_nodes(&grid, &cut_a, &pool_a);

    // Hole shifted onto the node at world (2, 2).
    let shifted =
        shapes::rectangle_with_hole([0.4, 0.4], [4.6, 3.6], [1.7, 1.7], [2.3, 2.3]);
    assert!(shifted.validate().is_ok());
    let mut pool_b = VertexPool::new();
    let _ext_b = build_ext(&shifted, &grid, &mut pool_b);
    let cut_b = regions::compute_cut_edges(&shifted, &grid).unwrap();
    let part_b = regions::partition_grid_nodes(&grid, &cut_b, &pool_b);

    assert_eq!(part_a.regions.len(), 2);
    assert_eq!(part_a.interior_regions().count(), 1);
    assert_eq!(part_b.regions.len(), part_a.regions.len() + 1);
    // The isolated node sits in the cavity: its region carries no negative
    // vertices, so it is exterior and gets discarded.
    assert_eq!(part_b.interior_regions().count(), 1);
    let node = grid.node_linear([3, 3, 0]);
    let isolated = part_b.label[node];
    assert_eq!(part_b.regions[isolated as usize].nodes.len(), 1);
    assert!(!part_b.regions[isolated as usize].interior);
}

/// A slotted block folds the extension onto itself: coincident negative
/// vertices backing the same copy are merged by the preliminary merge,
/// while coincident positive vertices (here between the block and a nearby
/// second solid) are left alone so the exterior is never sewn.
#[test]
fn slotted_block_merges_negatives_but_not_positives() {
    let u = shapes::slotted_rectangle([0.4, 0.4], [2.6, 2.6], 1.3, 1.7, 1.2);
    let box_right = shapes::rectangle([3.4, 0.4], [5.6, 2.6]);
    // Combine the loops into one planar surface.
    let mut verts: Vec<[f64; 2]> = (0..u.vert_count() as u32)
        .map(|i| {
            let p = u.vert(i);
            [p.x, p.y]
        })
        .collect();
    let mut segs: Vec<[u32; 2]> = (0..u.elem_count() as u32)
        .map(|e| {
            let s = u.elem(e);
            [s[0], s[1]]
        })
        .collect();
    let base = verts.len() as u32;
    for i in 0..box_right.vert_count() as u32 {
        let p = box_right.vert(i);
        verts.push([p.x, p.y]);
    }
    for e in 0..box_right.elem_count() as u32 {
        let s = box_right.elem(e);
        segs.push([s[0] + base, s[1] + base]);
    }
    let surface = SurfaceMesh::new_2d(verts, segs);
    assert!(surface.validate().is_ok());

    let grid = GridSpec::new_2d(Point3::new(-2.0, -2.0, 0.0), 1.0, [10, 7]);
    let mut pool = VertexPool::new();
    let ext = build_ext(&surface, &grid, &mut pool);
    let mut ext = ext;

    let cut = regions::compute_cut_edges(&surface, &grid).unwrap();
    let partition = regions::partition_grid_nodes(&grid, &cut, &pool);
    let seeds = regions::count_copies(&partition, &ext, &pool, &grid);

    // Below the slot the extension folds onto node (1,1) (grid node of
    // world (1,1) is (3,3) with this origin): two coincident negatives.
    let node = [3, 3, 0];
    assert!(count_at(&pool, node, Sign::Negative) >= 2);
    // Between the solids, world node (3,1) carries coincident positives
    // from both.
    let pos_node = [5, 3, 0];
    let positives_before = count_at(&pool, pos_node, Sign::Positive);
    assert!(positives_before >= 2);

    // Build all copies and run the preliminary merges.
    let mut copies: Vec<merging::RegionCopy> = Vec::new();
    for seed in &seeds {
        let nodes = &partition.regions[seed.region as usize].nodes;
        let (mesh0, interior0) = regions::build_region_mesh(&grid, nodes, &cut, &mut pool);
        for (c, comp) in seed.components.iter().enumerate() {
            let (mesh, interior) = if c == 0 {
                (mesh0.clone(), interior0.clone())
            } else {
                regions::duplicate_region_mesh(&mesh0, &interior0, &mut pool, grid.dim())
            };
            copies.push(merging::RegionCopy::new(
                seed.region,
                c as u32,
                mesh,
                comp.clone(),
                interior,
            ));
        }
    }
    for i in 0..copies.len() {
        merging::preliminary_coincident_merge(i, &mut ext, &mut copies, &mut pool);
    }

    // The fold closed: one negative left at the fold node.
    assert_eq!(count_at(&pool, node, Sign::Negative), 1);
    // Coincident positives between the two solids are untouched.
    assert_eq!(count_at(&pool, pos_node, Sign::Positive), positives_before);
}

/// Planar pipeline end to end: a convex rectangle matches the flood-fill
/// embedding, exercising the full quadrilateral path.
#[test]
fn planar_rectangle_matches_floodfill() {
    let rect = shapes::rectangle([0.2, 0.3], [2.3, 1.4]);
    let grid = GridSpec::new_2d(Point3::new(-0.8, -0.7, 0.0), 0.22, [18, 14]);
    let built = build_embedding(&rect, &grid).unwrap();
    let (om, op) = oracle::floodfill_embed(&rect, &grid).unwrap();
    assert_eq!(
        hexbed_core::hexmesh::canonicalize(&built.mesh, &built.pool),
        hexbed_core::hexmesh::canonicalize(&om, &op)
    );
}

/// The slotted block resolves to a single connected component whose slot
/// stays open: the full planar pipeline on a self-folding solid.
#[test]
fn slotted_block_pipeline_is_consistent() {
    let u = shapes::slotted_rectangle([0.4, 0.4], [2.6, 2.6], 1.3, 1.7, 1.2);
    let grid = GridSpec::new_2d(Point3::new(-2.0, -2.0, 0.0), 1.0, [10, 7]);
    let built = build_embedding(&u, &grid).unwrap();
    let (_, n) = hexbed_core::hexmesh::connected_components(&built.mesh);
    assert_eq!(n, 1);
    // Winding inside the material is 1; multiplicity of every covered cell
    // matches.
    for (_, c, _) in built.mesh.iter() {
        let center = grid.cell_center(c);
        if let Ok(w) = oracle::winding_count(center, &u) {
            if w == 1 {
                // Interior cells appear once.
                let m = built
                    .mesh
                    .iter()
                    .filter(|(_, cc, _)| *cc == c)
                    .count();
                assert_eq!(m, 1, "cell {c:?}");
            }
        }
    }
}
