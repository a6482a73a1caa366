//! Exact closed-convex intersection tests via separating axes.
//!
//! Touching counts as intersecting, so two bodies are disjoint exactly when
//! some candidate axis separates them strictly. When a body of full
//! dimension is involved the facet normals of the Minkowski difference are
//! covered by the face normals of both bodies plus pairwise edge cross
//! products. For flat/degenerate pairs the candidate set is extended with
//! in-plane edge normals, vertex difference directions, and vertex-edge
//! perpendiculars so that every closest-feature direction is represented.
//!
//! Each test runs first with error-tracked floats; any undecidable sign
//! falls back to one exact dyadic evaluation of the whole test.

use super::exact::{grid_node_coords, v3_from, v_cross, v_is_zero, v_sub, Fl, Dy, Ring, V3};
use crate::grid::{Dim, GridSpec};
use crate::surface::SurfaceMesh;
use nalgebra::Point3;
use smallvec::SmallVec;

/// Geometric query input: explicit points (exact f64 coordinates) or
/// grid-derived shapes whose coordinates are evaluated symbolically as
/// `origin + index * dx`.
#[derive(Clone, Copy)]
pub(crate) enum ShapeRef<'a> {
    /// A surface element: 3 points for a triangle, 2 for a segment.
    Points(&'a [Point3<f64>]),
    /// One grid cell.
    Cell(&'a GridSpec, [i32; 3]),
    /// The grid edge from `node` to `node + e_axis`.
    GridEdge(&'a GridSpec, [i32; 3], usize),
}

struct Body<S> {
    pts: SmallVec<[V3<S>; 8]>,
    edges: SmallVec<[(u8, u8); 12]>,
    /// Distinct edge directions, for cross-product axes.
    cross_dirs: SmallVec<[V3<S>; 3]>,
    normals: SmallVec<[V3<S>; 3]>,
    flat_normal: Option<V3<S>>,
    full_dim: bool,
}

fn axis_unit<S: Ring>(a: usize) -> V3<S> {
    let mut v = [S::from_f64(0.0), S::from_f64(0.0), S::from_f64(0.0)];
    v[a] = S::from_f64(1.0);
    v
}

fn build_body<S: Ring>(shape: &ShapeRef) -> Body<S> {
    match shape {
        ShapeRef::Points(pts) => match pts.len() {
            3 => {
                let p: SmallVec<[V3<S>; 8]> = pts.iter().map(v3_from).collect();
                let n = v_cross(&v_sub(&p[1], &p[0]), &v_sub(&p[2], &p[0]));
                let dirs = SmallVec::from_vec(vec![
                    v_sub(&p[1], &p[0]),
                    v_sub(&p[2], &p[1]),
                    v_sub(&p[0], &p[2]),
                ]);
                Body {
                    pts: p,
                    edges: SmallVec::from_slice(&[(0, 1), (1, 2), (2, 0)]),
                    cross_dirs: dirs,
                    normals: SmallVec::from_vec(vec![n.clone()]),
                    flat_normal: Some(n),
                    full_dim: false,
                }
            }
            2 => {
                let p: SmallVec<[V3<S>; 8]> = pts.iter().map(v3_from).collect();
                let d = v_sub(&p[1], &p[0]);
                Body {
                    pts: p,
                    edges: SmallVec::from_slice(&[(0, 1)]),
                    cross_dirs: SmallVec::from_vec(vec![d]),
                    normals: SmallVec::new(),
                    flat_normal: None,
                    full_dim: false,
                }
            }
            _ => panic!("surface elements have 2 or 3 vertices"),
        },
        ShapeRef::Cell(grid, cell) => {
            let dim = grid.dim();
            let pts: SmallVec<[V3<S>; 8]> = dim
                .corner_offsets()
                .iter()
                .map(|o| grid_node_coords(grid, crate::grid::idx_add(*cell, *o)))
                .collect();
            match dim {
                Dim::Three => Body {
                    pts,
                    edges: SmallVec::from_slice(&[
                        (0, 1),
                        (2, 3),
                        (4, 5),
                        (6, 7),
                        (0, 2),
                        (1, 3),
                        (4, 6),
                        (5, 7),
                        (0, 4),
                        (1, 5),
                        (2, 6),
                        (3, 7),
                    ]),
                    cross_dirs: SmallVec::from_vec(vec![
                        axis_unit::<S>(0),
                        axis_unit::<S>(1),
                        axis_unit::<S>(2),
                    ]),
                    normals: SmallVec::from_vec(vec![
                        axis_unit::<S>(0),
                        axis_unit::<S>(1),
                        axis_unit::<S>(2),
                    ]),
                    flat_normal: None,
                    full_dim: true,
                },
                Dim::Two => Body {
                    pts,
                    edges: SmallVec::from_slice(&[(0, 1), (2, 3), (0, 2), (1, 3)]),
                    cross_dirs: SmallVec::from_vec(vec![axis_unit::<S>(0), axis_unit::<S>(1)]),
                    normals: SmallVec::from_vec(vec![axis_unit::<S>(2)]),
                    flat_normal: Some(axis_unit::<S>(2)),
                    full_dim: false,
                },
            }
        }
        ShapeRef::GridEdge(grid, node, axis) => {
            let mut other = *node;
            other[*axis] += 1;
            Body {
                pts: SmallVec::from_vec(vec![
                    grid_node_coords(grid, *node),
                    grid_node_coords(grid, other),
                ]),
                edges: SmallVec::from_slice(&[(0, 1)]),
                cross_dirs: SmallVec::from_vec(vec![axis_unit::<S>(*axis)]),
                normals: SmallVec::new(),
                flat_normal: None,
                full_dim: false,
            }
        }
    }
}

fn edge_vecs<S: Ring>(b: &Body<S>) -> SmallVec<[V3<S>; 12]> {
    b.edges
        .iter()
        .map(|&(p, q)| v_sub(&b.pts[q as usize], &b.pts[p as usize]))
        .collect()
}

fn candidate_axes<S: Ring>(a: &Body<S>, b: &Body<S>) -> Vec<V3<S>> {
    let mut axes: Vec<V3<S>> = Vec::new();
    axes.extend(a.normals.iter().cloned());
    axes.extend(b.normals.iter().cloned());
    for u in &a.cross_dirs {
        for v in &b.cross_dirs {
            axes.push(v_cross(u, v));
        }
    }
    if a.full_dim || b.full_dim {
        return axes;
    }
    // Flat and degenerate pairs need in-plane and closest-feature axes.
    for flat in [a.flat_normal.as_ref(), b.flat_normal.as_ref()].into_iter().flatten() {
        for e in a.cross_dirs.iter().chain(b.cross_dirs.iter()) {
            axes.push(v_cross(flat, e));
        }
    }
    for pa in &a.pts {
        for pb in &b.pts {
            axes.push(v_sub(pa, pb));
        }
    }
    let ea = edge_vecs(a);
    let eb = edge_vecs(b);
    for (pts, body, edges) in [(&a.pts, b, &eb), (&b.pts, a, &ea)] {
        for v in pts.iter() {
            for (k, &(p, _)) in body.edges.iter().enumerate() {
                let d = v_sub(v, &body.pts[p as usize]);
                let e = &edges[k];
                axes.push(v_cross(&v_cross(&d, e), e));
            }
        }
    }
    axes
}

/// Tri-state result of "all projections of B exceed all projections of A".
fn strictly_below<S: Ring>(pa: &[S], pb: &[S]) -> Option<bool> {
    let mut certain = true;
    for a in pa {
        for b in pb {
            match b.sub(a).sign() {
                Some(s) if s > 0 => {}
                Some(_) => return Some(false),
                None => certain = false,
            }
        }
    }
    if certain {
        Some(true)
    } else {
        None
    }
}

/// Some(true) = certainly intersect, Some(false) = certainly disjoint,
/// None = undecided by this backend.
fn sat_intersects<S: Ring>(a: &Body<S>, b: &Body<S>) -> Option<bool> {
    let mut undecided = false;
    for axis in candidate_axes(a, b) {
        if v_is_zero(&axis) == Some(true) {
            continue;
        }
        let pa: SmallVec<[S; 8]> = a.pts.iter().map(|p| super::exact::v_dot(p, &axis)).collect();
        let pb: SmallVec<[S; 8]> = b.pts.iter().map(|p| super::exact::v_dot(p, &axis)).collect();
        match (strictly_below(&pa, &pb), strictly_below(&pb, &pa)) {
            (Some(true), _) | (_, Some(true)) => return Some(false),
            (Some(false), Some(false)) => {}
            _ => undecided = true,
        }
    }
    if undecided {
        None
    } else {
        Some(true)
    }
}

pub(crate) fn shapes_intersect(a: &ShapeRef, b: &ShapeRef) -> bool {
    let fa = build_body::<Fl>(a);
    let fb = build_body::<Fl>(b);
    if let Some(result) = sat_intersects(&fa, &fb) {
        return result;
    }
    let ra = build_body::<Dy>(a);
    let rb = build_body::<Dy>(b);
    sat_intersects(&ra, &rb).expect("exact evaluation is always decisive")
}

/// Does the closed surface element intersect the closed grid cell?
/// Exact: no false positives or negatives; touching counts. Degenerate
/// (zero-area) elements are treated as closed segments or points.
pub fn tri_cell_intersects(elem: &[Point3<f64>], grid: &GridSpec, cell: [i32; 3]) -> bool {
    debug_assert_eq!(elem.len(), grid.dim().verts_per_elem());
    shapes_intersect(&ShapeRef::Points(elem), &ShapeRef::Cell(grid, cell))
}

/// Is the closed grid edge from `node` along `axis` intersected by any of
/// the candidate surface elements? The candidate set must contain every
/// element whose cell-aligned bounding box touches the edge.
pub fn edge_cut_by_surface(
    node: [i32; 3],
    axis: usize,
    surface: &SurfaceMesh,
    candidates: &[u32],
    grid: &GridSpec,
) -> bool {
    let edge = ShapeRef::GridEdge(grid, node, axis);
    candidates.iter().any(|&e| {
        let pts = surface.elem_points(e);
        shapes_intersect(&ShapeRef::Points(&pts), &edge)
    })
}

/// Exact closed intersection between two surface elements.
pub fn elems_intersect(a: &[Point3<f64>], b: &[Point3<f64>]) -> bool {
    shapes_intersect(&ShapeRef::Points(a), &ShapeRef::Points(b))
}
