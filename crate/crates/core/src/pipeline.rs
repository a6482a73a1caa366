//! End-to-end construction of the embedding mesh from a surface and a grid.

use crate::extension::{self, SignStats};
use crate::geometry::GeomError;
use crate::grid::GridSpec;
use crate::hexmesh::HexMesh;
use crate::merging::{self, RegionCopy};
use crate::pool::VertexPool;
use crate::regions;
use crate::surface::{SurfaceMesh, ValidationReport};
use std::fmt;
use std::time::Instant;

#[derive(Debug)]
pub enum BuildError {
    InvalidSurface(ValidationReport),
    Geometry(GeomError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::InvalidSurface(r) => {
                write!(f, "invalid surface mesh ({} defects)", r.defects.len())
            }
            BuildError::Geometry(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for BuildError {}

impl From<GeomError> for BuildError {
    fn from(e: GeomError) -> Self {
        BuildError::Geometry(e)
    }
}

/// Statistics gathered over one pipeline run.
#[derive(Clone, Debug, Default)]
pub struct BuildStats {
    pub grid_dims: [i32; 3],
    pub dx: f64,
    pub hex_count: usize,
    pub region_count: usize,
    pub interior_region_count: usize,
    /// (region id, copy count) for every interior region.
    pub copies_per_region: Vec<(u32, usize)>,
    pub dedup_events: usize,
    pub sign_stats: SignStats,
    /// (stage name, seconds), in execution order.
    pub stage_seconds: Vec<(&'static str, f64)>,
    pub total_seconds: f64,
}

pub struct BuildArtifacts {
    pub mesh: HexMesh,
    pub pool: VertexPool,
    pub stats: BuildStats,
}

/// Run the full pipeline: validation, volumetric extension, interior region
/// creation, and interior region merging. The result is deterministic for
/// any worker count.
pub fn build_embedding(surface: &SurfaceMesh, grid: &GridSpec) -> Result<BuildArtifacts, BuildError> {
    let start = Instant::now();
    let mut stats = BuildStats {
        grid_dims: grid.dims(),
        dx: grid.dx(),
        ..BuildStats::default()
    };

    let report = surface.validate();
    if !report.is_ok() {
        return Err(BuildError::InvalidSurface(report));
    }

    let mut pool = VertexPool::new();

    let t = Instant::now();
    let pre = extension::build_precursors(surface, grid, &mut pool)?;
    let mut ext = extension::merge_surface_precursors(pre, surface, &mut pool);
    stats.sign_stats = extension::resolve_sign_conflicts(&mut ext, surface, grid, &mut pool)?;
    ext.contrib.clear();
    stats.stage_seconds.push(("extension", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let cut = regions::compute_cut_edges(surface, grid)?;
    let partition = regions::partition_grid_nodes(grid, &cut, &pool);
    stats.region_count = partition.regions.len();
    stats.interior_region_count = partition.interior_regions().count();
    let seeds = regions::count_copies(&partition, &ext, &pool, grid);
    for s in &seeds {
        stats.copies_per_region.push((s.region, s.components.len()));
    }
    stats.stage_seconds.push(("regions", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    let mut copies: Vec<RegionCopy> = Vec::new();
    for seed in &seeds {
        let region_nodes = &partition.regions[seed.region as usize].nodes;
        let (mesh0, interior0) = regions::build_region_mesh(grid, region_nodes, &cut, &mut pool);
        let mut dups = Vec::new();
        for c in 1..seed.components.len() {
            let (mesh, interior) =
                regions::duplicate_region_mesh(&mesh0, &interior0, &mut pool, grid.dim());
            dups.push(RegionCopy::new(
                seed.region,
                c as u32,
                mesh,
                seed.components[c].clone(),
                interior,
            ));
        }
        copies.push(RegionCopy::new(
            seed.region,
            0,
            mesh0,
            seed.components[0].clone(),
            interior0,
        ));
        copies.extend(dups);
    }
    stats.stage_seconds.push(("region meshes", t.elapsed().as_secs_f64()));

    let t = Instant::now();
    for i in 0..copies.len() {
        merging::preliminary_coincident_merge(i, &mut ext, &mut copies, &mut pool);
        merging::merge_copy_with_boundary(i, &mut ext, &mut copies, &mut pool);
    }
    let mut overlaps = merging::build_overlap_lists(&copies, &ext);
    stats.dedup_events = merging::deduplicate_copies(&mut overlaps, &mut copies, &mut ext, &mut pool);
    let mesh = merging::final_merge(&overlaps, &mut copies, &mut ext, &mut pool);
    stats.stage_seconds.push(("merging", t.elapsed().as_secs_f64()));

    stats.hex_count = mesh.len();
    stats.total_seconds = start.elapsed().as_secs_f64();
    Ok(BuildArtifacts { mesh, pool, stats })
}
