//! Independent brute-force references used by tests: a flood-fill embedding
//! for intersection-free inputs, ray-cast winding numbers, and rational
//! reference predicates. Deliberately simple and slow; intended for small
//! grids only.

use crate::geometry;
use crate::grid::{Dim, GridSpec};
use crate::hexmesh::HexMesh;
use crate::pool::{Sign, VertexPool};
use crate::surface::SurfaceMesh;
use nalgebra::{Point3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use std::collections::HashMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum OracleError {
    SurfaceSelfIntersects { a: u32, b: u32 },
    DegenerateRay,
    Geometry(geometry::GeomError),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::SurfaceSelfIntersects { a, b } => {
                write!(f, "surface elements {a} and {b} intersect")
            }
            OracleError::DegenerateRay => write!(f, "no non-degenerate ray found"),
            OracleError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for OracleError {}

impl From<geometry::GeomError> for OracleError {
    fn from(e: geometry::GeomError) -> Self {
        OracleError::Geometry(e)
    }
}

/// The single-copy embedding of an intersection-free closed surface: one hex
/// per surface-intersected or interior cell, with grid-native connectivity.
/// Refuses self-intersecting input (exact element-pair test, pairs sharing a
/// surface vertex exempt).
pub fn floodfill_embed(
    surface: &SurfaceMesh,
    grid: &GridSpec,
) -> Result<(HexMesh, VertexPool), OracleError> {
    let n = surface.elem_count() as u32;
    let boxes: Vec<(Point3<f64>, Point3<f64>)> = (0..n)
        .map(|e| {
            let pts = surface.elem_points(e);
            let mut mn = pts[0];
            let mut mx = pts[0];
            for p in pts.iter().skip(1) {
                for a in 0..3 {
                    mn[a] = mn[a].min(p[a]);
                    mx[a] = mx[a].max(p[a]);
                }
            }
            (mn, mx)
        })
        .collect();
    for a in 0..n {
        let ea = surface.elem(a);
        for b in (a + 1)..n {
            if surface.elem(b).iter().any(|v| ea.contains(v)) {
                continue;
            }
            let (amn, amx) = boxes[a as usize];
            let (bmn, bmx) = boxes[b as usize];
            if (0..3).any(|k| amx[k] < bmn[k] || bmx[k] < amn[k]) {
                continue;
            }
            if geometry::elems_intersect(&surface.elem_points(a), &surface.elem_points(b)) {
                return Err(OracleError::SurfaceSelfIntersects { a, b });
            }
        }
    }

    let total = grid.total_cells();
    let mut intersected = vec![false; total];
    for e in 0..n {
        let pts = surface.elem_points(e);
        let (lo, hi) = geometry::bounding_subgrid(&pts, grid)?;
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let c = [x, y, z];
                    if geometry::tri_cell_intersects(&pts, grid, c) {
                        intersected[grid.cell_linear(c)] = true;
                    }
                }
            }
        }
    }

    // Exterior flood fill from the grid boundary over face neighbors.
    let dims = grid.dims();
    let mut exterior = vec![false; total];
    let mut stack = Vec::new();
    for c in grid.iter_cells() {
        let boundary = (0..grid.dim().axes())
            .any(|a| c[a] == 0 || c[a] == dims[a] - 1);
        let lin = grid.cell_linear(c);
        if boundary && !intersected[lin] && !exterior[lin] {
            exterior[lin] = true;
            stack.push(c);
        }
    }
    while let Some(c) = stack.pop() {
        for a in 0..grid.dim().axes() {
            for step in [-1, 1] {
                let mut m = c;
                m[a] += step;
                if !grid.cell_in_bounds(m) {
                    continue;
                }
                let lin = grid.cell_linear(m);
                if !intersected[lin] && !exterior[lin] {
                    exterior[lin] = true;
                    stack.push(m);
                }
            }
        }
    }

    let mut pool = VertexPool::new();
    let mut ids: HashMap<[i32; 3], u32> = HashMap::new();
    let mut mesh = HexMesh::new(grid.dim());
    let arity = grid.dim().corners_per_cell();
    let mut corners = vec![0u32; arity];
    for c in grid.iter_cells() {
        let lin = grid.cell_linear(c);
        if exterior[lin] {
            continue;
        }
        for (k, slot) in corners.iter_mut().enumerate() {
            let node = grid.cell_corner_node(c, k);
            *slot = *ids.entry(node).or_insert_with(|| pool.push(node, Sign::Unset));
        }
        mesh.push(c, &corners);
    }
    Ok((mesh, pool))
}

/// Signed ray-crossing count from `point` along a pseudo-random ray,
/// retrying on near-degenerate hits. Positive for points inside material;
/// the count equals the local sheet multiplicity for overlapping solids.
pub fn winding_count(point: Point3<f64>, surface: &SurfaceMesh) -> Result<i32, OracleError> {
    winding_count_seeded(point, surface, 0)
}

/// As `winding_count` with an explicit seed stream, for ray-invariance
/// checks.
pub fn winding_count_seeded(
    point: Point3<f64>,
    surface: &SurfaceMesh,
    seed: u64,
) -> Result<i32, OracleError> {
    let mut hasher = seed
        ^ point.x.to_bits().wrapping_mul(0x9e3779b97f4a7c15)
        ^ point.y.to_bits().rotate_left(17)
        ^ point.z.to_bits().rotate_left(39);
    for attempt in 0..64u64 {
        hasher = hasher.wrapping_add(attempt).wrapping_mul(0xbf58476d1ce4e5b9);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(hasher);
        let dir = loop {
            let v = Vector3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                if surface.dim() == Dim::Two { 0.0 } else { rng.gen_range(-1.0..1.0) },
            );
            let n = v.norm();
            if n > 0.3 {
                break v / n;
            }
        };
        match try_winding(point, surface, dir) {
            Some(w) => return Ok(w),
            None => continue,
        }
    }
    Err(OracleError::DegenerateRay)
}

fn try_winding(p: Point3<f64>, surface: &SurfaceMesh, d: Vector3<f64>) -> Option<i32> {
    let (mn, mx) = surface.bbox();
    let scale = (mx - mn).norm().max(1e-30);
    let eps = 1e-10;
    let mut total = 0i32;
    for e in 0..surface.elem_count() as u32 {
        let pts = surface.elem_points(e);
        match surface.dim() {
            Dim::Three => {
                let (a, b, c) = (pts[0], pts[1], pts[2]);
                let e1 = b - a;
                let e2 = c - a;
                let pvec = d.cross(&e2);
                let det = e1.dot(&pvec);
                let norm_n = e1.cross(&e2).norm();
                if norm_n == 0.0 {
                    continue; // degenerate element never crossed transversally
                }
                if det.abs() < eps * norm_n {
                    // Ray nearly parallel to the triangle plane: reject the
                    // ray only if the triangle is close enough to matter.
                    let dist = (p - a).dot(&e1.cross(&e2)) / norm_n;
                    if dist.abs() < scale {
                        return None;
                    }
                    continue;
                }
                let tvec = p - a;
                let u = tvec.dot(&pvec) / det;
                let qvec = tvec.cross(&e1);
                let v = d.dot(&qvec) / det;
                let t = e2.dot(&qvec) / det;
                let w = 1.0 - u - v;
                let inside = u > eps && v > eps && w > eps;
                let near_boundary = (u.abs() < eps || v.abs() < eps || w.abs() < eps)
                    || (u - 1.0).abs() < eps
                    || (v - 1.0).abs() < eps
                    || (w - 1.0).abs() < eps;
                if t.abs() < eps && (inside || near_boundary) {
                    return None; // query point on the surface
                }
                if t <= 0.0 {
                    continue;
                }
                if inside {
                    total += if det < 0.0 { 1 } else { -1 };
                } else if near_boundary && t > 0.0 {
                    let hit_u = u > -eps && v > -eps && w > -eps;
                    if hit_u {
                        return None; // grazing an edge or vertex
                    }
                }
            }
            Dim::Two => {
                let (a, b) = (pts[0], pts[1]);
                let s = b - a;
                let denom = d.x * s.y - d.y * s.x;
                let len = s.norm();
                if len == 0.0 {
                    continue;
                }
                if denom.abs() < eps * len {
                    let dist = ((p - a).x * s.y - (p - a).y * s.x) / len;
                    if dist.abs() < scale {
                        return None;
                    }
                    continue;
                }
                let ap = p - a;
                // p + t d = a + u s
                let t = (s.x * ap.y - s.y * ap.x) / denom;
                let u = (d.x * ap.y - d.y * ap.x) / denom;
                if t.abs() < eps && (-eps..=1.0 + eps).contains(&u) {
                    return None;
                }
                if t <= 0.0 {
                    continue;
                }
                if u > eps && u < 1.0 - eps {
                    // Outward normal of (a -> b) is the right normal.
                    let outward = Vector3::new(s.y, -s.x, 0.0);
                    total += if outward.dot(&d) > 0.0 { 1 } else { -1 };
                } else if u > -eps && u < 1.0 + eps {
                    return None; // grazing an endpoint
                }
            }
        }
    }
    Some(total)
}

/// Rational reference predicates, implemented by clipping rather than
/// separating axes so the two routes stay independent.
pub mod refpred {
    use crate::grid::{Dim, GridSpec};
    use nalgebra::Point3;
    use num::rational::BigRational;
    use num::{FromPrimitive, Signed, Zero};

    type R = BigRational;

    fn rat(x: f64) -> R {
        BigRational::from_f64(x).expect("finite coordinate")
    }

    fn node_coord(grid: &GridSpec, k: i32, axis: usize) -> R {
        rat(grid.origin()[axis]) + BigRational::from_i32(k).unwrap() * rat(grid.dx())
    }

    fn sign(x: &R) -> i8 {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Clip a polygon (any vertex count, possibly degenerate) against the
    /// half-space `coord[axis] cmp bound`. `keep_ge` selects >=; otherwise <=.
    fn clip_axis(poly: &[[R; 3]], axis: usize, bound: &R, keep_ge: bool) -> Vec<[R; 3]> {
        let inside = |p: &[R; 3]| -> bool {
            if keep_ge {
                p[axis] >= *bound
            } else {
                p[axis] <= *bound
            }
        };
        let mut out = Vec::new();
        let n = poly.len();
        for i in 0..n {
            let cur = &poly[i];
            let nxt = &poly[(i + 1) % n];
            let cin = inside(cur);
            let nin = inside(nxt);
            if cin {
                out.push(cur.clone());
            }
            if cin != nin {
                let denom = &nxt[axis] - &cur[axis];
                if !denom.is_zero() {
                    let t = (bound - &cur[axis]) / denom;
                    let mut x = [R::zero(), R::zero(), R::zero()];
                    for a in 0..3 {
                        x[a] = &cur[a] + (&nxt[a] - &cur[a]) * &t;
                    }
                    out.push(x);
                }
            }
        }
        out
    }

    /// Closed intersection of a surface element with a grid cell, computed
    /// by exact polygon clipping against the cell's half-spaces.
    pub fn tri_cell_intersects_ref(elem: &[Point3<f64>], grid: &GridSpec, cell: [i32; 3]) -> bool {
        let mut poly: Vec<[R; 3]> = elem.iter().map(|p| [rat(p.x), rat(p.y), rat(p.z)]).collect();
        for axis in 0..grid.dim().axes() {
            let lo = node_coord(grid, cell[axis], axis);
            let hi = node_coord(grid, cell[axis] + 1, axis);
            poly = clip_axis(&poly, axis, &lo, true);
            if poly.is_empty() {
                return false;
            }
            poly = clip_axis(&poly, axis, &hi, false);
            if poly.is_empty() {
                return false;
            }
        }
        if grid.dim() == Dim::Two {
            // Planar inputs must lie in the grid plane.
            if poly.iter().any(|p| !p[2].is_zero()) {
                return false;
            }
        }
        true
    }

    fn orient2(a: &[R; 2], b: &[R; 2], c: &[R; 2]) -> R {
        (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
    }

    fn on_segment_2d(a: &[R; 2], b: &[R; 2], p: &[R; 2]) -> bool {
        if !orient2(a, b, p).is_zero() {
            return false;
        }
        for k in 0..2 {
            let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
            if p[k] < *lo || p[k] > *hi {
                return false;
            }
        }
        true
    }

    /// Exact closed 2D segment-segment intersection.
    fn seg_seg_2d(p: &[R; 2], q: &[R; 2], r: &[R; 2], s: &[R; 2]) -> bool {
        let d1 = sign(&orient2(r, s, p));
        let d2 = sign(&orient2(r, s, q));
        let d3 = sign(&orient2(p, q, r));
        let d4 = sign(&orient2(p, q, s));
        if d1 * d2 < 0 && d3 * d4 < 0 {
            return true;
        }
        (d1 == 0 && on_segment_2d(r, s, p))
            || (d2 == 0 && on_segment_2d(r, s, q))
            || (d3 == 0 && on_segment_2d(p, q, r))
            || (d4 == 0 && on_segment_2d(p, q, s))
    }

    fn sub(a: &[R; 3], b: &[R; 3]) -> [R; 3] {
        [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
    }

    fn cross(a: &[R; 3], b: &[R; 3]) -> [R; 3] {
        [
            &a[1] * &b[2] - &a[2] * &b[1],
            &a[2] * &b[0] - &a[0] * &b[2],
            &a[0] * &b[1] - &a[1] * &b[0],
        ]
    }

    fn dot(a: &[R; 3], b: &[R; 3]) -> R {
        &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
    }

    /// Project to the 2D plane dropping the dominant axis of `n`.
    fn project(p: &[R; 3], drop: usize) -> [R; 2] {
        match drop {
            0 => [p[1].clone(), p[2].clone()],
            1 => [p[0].clone(), p[2].clone()],
            _ => [p[0].clone(), p[1].clone()],
        }
    }

    fn dominant_axis(n: &[R; 3]) -> usize {
        let a = [n[0].abs(), n[1].abs(), n[2].abs()];
        if a[0] >= a[1] && a[0] >= a[2] {
            0
        } else if a[1] >= a[2] {
            1
        } else {
            2
        }
    }

    /// Closed point-in-triangle after projection.
    fn point_in_tri_2d(a: &[R; 2], b: &[R; 2], c: &[R; 2], p: &[R; 2]) -> bool {
        let s1 = sign(&orient2(a, b, p));
        let s2 = sign(&orient2(b, c, p));
        let s3 = sign(&orient2(c, a, p));
        let has_pos = s1 > 0 || s2 > 0 || s3 > 0;
        let has_neg = s1 < 0 || s2 < 0 || s3 < 0;
        !(has_pos && has_neg)
    }

    fn seg_tri_2d(p: &[R; 2], q: &[R; 2], tri: &[[R; 2]; 3]) -> bool {
        if point_in_tri_2d(&tri[0], &tri[1], &tri[2], p)
            || point_in_tri_2d(&tri[0], &tri[1], &tri[2], q)
        {
            return true;
        }
        seg_seg_2d(p, q, &tri[0], &tri[1])
            || seg_seg_2d(p, q, &tri[1], &tri[2])
            || seg_seg_2d(p, q, &tri[2], &tri[0])
    }

    /// Closed intersection of the grid edge (node, axis) with one surface
    /// element, by exact case analysis on plane signs.
    pub fn edge_cut_ref(
        node: [i32; 3],
        axis: usize,
        elem: &[Point3<f64>],
        grid: &GridSpec,
    ) -> bool {
        let p0 = [
            node_coord(grid, node[0], 0),
            node_coord(grid, node[1], 1),
            node_coord(grid, node[2], 2),
        ];
        let mut far = node;
        far[axis] += 1;
        let p1 = [
            node_coord(grid, far[0], 0),
            node_coord(grid, far[1], 1),
            node_coord(grid, far[2], 2),
        ];
        match elem.len() {
            2 => {
                // Planar mode: everything lives in z = 0.
                let a = [rat(elem[0].x), rat(elem[0].y)];
                let b = [rat(elem[1].x), rat(elem[1].y)];
                let e0 = [p0[0].clone(), p0[1].clone()];
                let e1 = [p1[0].clone(), p1[1].clone()];
                seg_seg_2d(&e0, &e1, &a, &b)
            }
            3 => {
                let t: Vec<[R; 3]> =
                    elem.iter().map(|p| [rat(p.x), rat(p.y), rat(p.z)]).collect();
                let n = cross(&sub(&t[1], &t[0]), &sub(&t[2], &t[0]));
                if n.iter().all(|x| x.is_zero()) {
                    // Degenerate triangle: its hull is covered by its edges.
                    unreachable!("reference predicate expects nondegenerate triangles");
                }
                let d0 = dot(&n, &sub(&p0, &t[0]));
                let d1 = dot(&n, &sub(&p1, &t[0]));
                let (s0, s1) = (sign(&d0), sign(&d1));
                if s0 * s1 > 0 {
                    return false;
                }
                let drop = dominant_axis(&n);
                let tri2 = [project(&t[0], drop), project(&t[1], drop), project(&t[2], drop)];
                if s0 == 0 && s1 == 0 {
                    // Edge lies in the plane: 2D overlap test.
                    return seg_tri_2d(&project(&p0, drop), &project(&p1, drop), &tri2);
                }
                if s0 == 0 {
                    return point_in_tri_2d(&tri2[0], &tri2[1], &tri2[2], &project(&p0, drop));
                }
                if s1 == 0 {
                    return point_in_tri_2d(&tri2[0], &tri2[1], &tri2[2], &project(&p1, drop));
                }
                // Proper crossing: exact intersection point, then a planar
                // containment test.
                let tpar = &d0 / (&d0 - &d1);
                let mut x = [R::zero(), R::zero(), R::zero()];
                for a in 0..3 {
                    x[a] = &p0[a] + (&p1[a] - &p0[a]) * &tpar;
                }
                point_in_tri_2d(&tri2[0], &tri2[1], &tri2[2], &project(&x, drop))
            }
            _ => unreachable!(),
        }
    }
}
