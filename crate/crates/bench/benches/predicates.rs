use criterion::{criterion_group, criterion_main, Criterion};
use hexbed_core::geometry;
use hexbed_core::grid::GridSpec;
use nalgebra::Point3;
use rand::prelude::*;

fn random_triangle(rng: &mut impl Rng) -> [Point3<f64>; 3] {
    let mut p = || {
        Point3::new(
            rng.gen_range(0.0..4.0),
            rng.gen_range(0.0..4.0),
            rng.gen_range(0.0..4.0),
        )
    };
    [p(), p(), p()]
}

fn bench_predicates(c: &mut Criterion) {
    let grid = GridSpec::new_3d(Point3::origin(), 1.0, [4, 4, 4]);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let cases: Vec<([Point3<f64>; 3], [i32; 3])> = (0..512)
        .map(|_| {
            let tri = random_triangle(&mut rng);
            let cell = [rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4)];
            (tri, cell)
        })
        .collect();

    c.bench_function("tri_cell_intersects/batch512", |b| {
        b.iter(|| {
            let mut hits = 0usize;
            for (tri, cell) in &cases {
                if geometry::tri_cell_intersects(tri, &grid, *cell) {
                    hits += 1;
                }
            }
            hits
        })
    });

    let surface = hexbed_bench::icosphere(2, 1.4, Point3::new(2.0, 2.0, 2.0));
    let candidates: Vec<u32> = (0..surface.elem_count() as u32).collect();
    c.bench_function("edge_cut_by_surface/full_candidates", |b| {
        b.iter(|| {
            geometry::edge_cut_by_surface([2, 2, 0], 2, &surface, &candidates, &grid)
        })
    });
}

criterion_group!(benches, bench_predicates);
criterion_main!(benches);
