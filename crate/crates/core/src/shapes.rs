//! Procedural sample surfaces for tests, benchmarks, and demos.

use crate::surface::SurfaceMesh;
use nalgebra::{Point3, Vector3};
use std::collections::HashMap;

/// An icosphere of the given subdivision level.
pub fn icosphere(level: u32, radius: f64, center: Point3<f64>) -> SurfaceMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<Vector3<f64>> = vec![
        Vector3::new(-1.0, phi, 0.0),
        Vector3::new(1.0, phi, 0.0),
        Vector3::new(-1.0, -phi, 0.0),
        Vector3::new(1.0, -phi, 0.0),
        Vector3::new(0.0, -1.0, phi),
        Vector3::new(0.0, 1.0, phi),
        Vector3::new(0.0, -1.0, -phi),
        Vector3::new(0.0, 1.0, -phi),
        Vector3::new(phi, 0.0, -1.0),
        Vector3::new(phi, 0.0, 1.0),
        Vector3::new(-phi, 0.0, -1.0),
        Vector3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize())
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = (verts[a as usize] + verts[b as usize]).normalize();
                    verts.push(m);
                    (verts.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push([mid[0], mid[1], mid[2]]);
        }
        faces = next;
    }
    let points: Vec<Point3<f64>> = verts.into_iter().map(|v| center + v * radius).collect();
    SurfaceMesh::new_3d(points, faces)
}

/// A regular tetrahedron.
pub fn tetrahedron(radius: f64, center: Point3<f64>) -> SurfaceMesh {
    let s = radius / 3.0f64.sqrt();
    let verts = vec![
        center + Vector3::new(s, s, s),
        center + Vector3::new(s, -s, -s),
        center + Vector3::new(-s, s, -s),
        center + Vector3::new(-s, -s, s),
    ];
    let tris = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    SurfaceMesh::new_3d(verts, tris)
}

/// A regular octahedron.
pub fn octahedron(radius: f64, center: Point3<f64>) -> SurfaceMesh {
    let r = radius;
    let verts = vec![
        center + Vector3::new(r, 0.0, 0.0),
        center + Vector3::new(-r, 0.0, 0.0),
        center + Vector3::new(0.0, r, 0.0),
        center + Vector3::new(0.0, -r, 0.0),
        center + Vector3::new(0.0, 0.0, r),
        center + Vector3::new(0.0, 0.0, -r),
    ];
    let tris = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    SurfaceMesh::new_3d(verts, tris)
}

/// Concatenate several 3D surfaces into one mesh.
pub fn combine(meshes: &[&SurfaceMesh]) -> SurfaceMesh {
    let mut verts = Vec::new();
    let mut tris = Vec::new();
    for m in meshes {
        let base = verts.len() as u32;
        for i in 0..m.vert_count() as u32 {
            verts.push(m.vert(i));
        }
        for e in 0..m.elem_count() as u32 {
            let t = m.elem(e);
            tris.push([t[0] + base, t[1] + base, t[2] + base]);
        }
    }
    SurfaceMesh::new_3d(verts, tris)
}

fn tube_ring(
    radius: f64,
    half_width: f64,
    theta: f64,
    radial_drift: f64,
    vertical_drift: f64,
    t: f64,
) -> [Point3<f64>; 4] {
    let r = radius + t * radial_drift;
    let z = t * vertical_drift;
    let radial = Vector3::new(theta.cos(), theta.sin(), 0.0);
    let up = Vector3::new(0.0, 0.0, 1.0);
    let c = Point3::new(r * theta.cos(), r * theta.sin(), z);
    [
        c - radial * half_width - up * half_width,
        c + radial * half_width - up * half_width,
        c + radial * half_width + up * half_width,
        c - radial * half_width + up * half_width,
    ]
}

/// A capped square-cross-section tube swept along a circular arc with
/// optional radial/vertical drift. With more than a full turn of sweep and
/// drift smaller than the tube width, the final stretch passes through the
/// tube's own side: a simple immersion whose overlap has winding number 2.
pub fn spiral_tube(
    radius: f64,
    half_width: f64,
    turns_deg: f64,
    radial_drift: f64,
    vertical_drift: f64,
    steps: usize,
) -> SurfaceMesh {
    let mut verts: Vec<Point3<f64>> = Vec::new();
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let theta = t * turns_deg.to_radians();
        verts.extend_from_slice(&tube_ring(
            radius,
            half_width,
            theta,
            radial_drift,
            vertical_drift,
            t,
        ));
    }
    let ring_id = |s: usize, k: usize| (s * 4 + k) as u32;
    let mut tris: Vec<[u32; 3]> = Vec::new();
    for s in 0..steps {
        for k in 0..4 {
            let (a, b) = (ring_id(s, k), ring_id(s, (k + 1) % 4));
            let (c, d) = (ring_id(s + 1, k), ring_id(s + 1, (k + 1) % 4));
            tris.push([a, c, b]);
            tris.push([b, c, d]);
        }
    }
    tris.push([ring_id(0, 0), ring_id(0, 1), ring_id(0, 2)]);
    tris.push([ring_id(0, 0), ring_id(0, 2), ring_id(0, 3)]);
    tris.push([ring_id(steps, 0), ring_id(steps, 2), ring_id(steps, 1)]);
    tris.push([ring_id(steps, 0), ring_id(steps, 3), ring_id(steps, 2)]);
    SurfaceMesh::new_3d(verts, tris)
}

/// A closed torus with a square cross-section.
pub fn square_torus(radius: f64, half_width: f64, steps: usize) -> SurfaceMesh {
    let mut verts: Vec<Point3<f64>> = Vec::new();
    for s in 0..steps {
        let theta = s as f64 / steps as f64 * std::f64::consts::TAU;
        verts.extend_from_slice(&tube_ring(radius, half_width, theta, 0.0, 0.0, 0.0));
    }
    let ring_id = |s: usize, k: usize| ((s % steps) * 4 + k) as u32;
    let mut tris: Vec<[u32; 3]> = Vec::new();
    for s in 0..steps {
        for k in 0..4 {
            let (a, b) = (ring_id(s, k), ring_id(s, (k + 1) % 4));
            let (c, d) = (ring_id(s + 1, k), ring_id(s + 1, (k + 1) % 4));
            tris.push([a, c, b]);
            tris.push([b, c, d]);
        }
    }
    SurfaceMesh::new_3d(verts, tris)
}

/// A closed counterclockwise polygon loop (material on the left of each
/// directed segment).
pub fn polygon_loop(points: &[[f64; 2]]) -> SurfaceMesh {
    let n = points.len() as u32;
    let segs: Vec<[u32; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
    SurfaceMesh::new_2d(points.to_vec(), segs)
}

/// An axis-aligned rectangle loop.
pub fn rectangle(min: [f64; 2], max: [f64; 2]) -> SurfaceMesh {
    polygon_loop(&[
        [min[0], min[1]],
        [max[0], min[1]],
        [max[0], max[1]],
        [min[0], max[1]],
    ])
}

/// A long thin band whose bottom edge is split at `split_x`, so that two
/// bottom segments meet inside a cell that the far side of the band also
/// crosses.
pub fn split_band(x0: f64, x1: f64, y0: f64, y1: f64, split_x: f64) -> SurfaceMesh {
    polygon_loop(&[
        [x0, y0],
        [split_x, y0],
        [x1, y0],
        [x1, y1],
        [x0, y1],
    ])
}

/// A rectangle with a rectangular hole (two loops; the hole runs clockwise
/// so material stays on the left of every directed segment).
pub fn rectangle_with_hole(
    min: [f64; 2],
    max: [f64; 2],
    hole_min: [f64; 2],
    hole_max: [f64; 2],
) -> SurfaceMesh {
    let verts = vec![
        [min[0], min[1]],
        [max[0], min[1]],
        [max[0], max[1]],
        [min[0], max[1]],
        [hole_min[0], hole_min[1]],
        [hole_min[0], hole_max[1]],
        [hole_max[0], hole_max[1]],
        [hole_max[0], hole_min[1]],
    ];
    let segs = vec![
        [0, 1],
        [1, 2],
        [2, 3],
        [3, 0],
        [4, 5],
        [5, 6],
        [6, 7],
        [7, 4],
    ];
    SurfaceMesh::new_2d(verts, segs)
}

/// A rectangle with a thin slot cut downward from the top edge between
/// `slot_x0` and `slot_x1`, reaching down to `slot_y`.
pub fn slotted_rectangle(
    min: [f64; 2],
    max: [f64; 2],
    slot_x0: f64,
    slot_x1: f64,
    slot_y: f64,
) -> SurfaceMesh {
    polygon_loop(&[
        [min[0], min[1]],
        [max[0], min[1]],
        [max[0], max[1]],
        [slot_x1, max[1]],
        [slot_x1, slot_y],
        [slot_x0, slot_y],
        [slot_x0, max[1]],
        [min[0], max[1]],
    ])
}
