//! End-to-end pipeline orchestration: configuration, grid auto-sizing, file
//! formats, and run statistics.

pub mod formats;

use hexbed_core::grid::{Dim, GridSpec};
use hexbed_core::pipeline::{build_embedding, BuildError, BuildStats};
use hexbed_core::surface::SurfaceMesh;
use hexbed_core::{coarsen, tet};
use nalgebra::Point3;
use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum PipelineError {
    Io(String),
    Parse { line: usize, msg: String },
    NonTriangle { line: usize, corners: usize },
    InvalidSurface(Vec<String>),
    Config(String),
    Build(String),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Io(msg) => write!(f, "i/o error: {msg}"),
            PipelineError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
            PipelineError::NonTriangle { line, corners } => {
                write!(f, "face at line {line} has {corners} corners, only triangles are supported")
            }
            PipelineError::InvalidSurface(defects) => {
                writeln!(f, "invalid surface mesh:")?;
                for d in defects {
                    writeln!(f, "  {d}")?;
                }
                Ok(())
            }
            PipelineError::Config(msg) => write!(f, "configuration error: {msg}"),
            PipelineError::Build(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl PipelineError {
    /// Process exit code: 2 for invalid surfaces, 3 for i/o and
    /// configuration failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::InvalidSurface(_) | PipelineError::NonTriangle { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub input: PathBuf,
    /// Grid spacing; exactly one of `dx` and `max_dim` must be set.
    pub dx: Option<f64>,
    /// Target cell count along the largest bounding-box axis.
    pub max_dim: Option<u32>,
    /// Padding cells around the input bounding box on every side.
    pub pad: i32,
    pub coarsen_levels: usize,
    pub emit_tets: bool,
    pub out: Option<PathBuf>,
    pub stats_path: Option<PathBuf>,
    pub two_d: bool,
    /// Worker threads; 0 uses the default pool size.
    pub threads: usize,
}

impl PipelineConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            input: input.into(),
            dx: None,
            max_dim: None,
            pad: 3,
            coarsen_levels: 0,
            emit_tets: false,
            out: None,
            stats_path: None,
            two_d: false,
            threads: 0,
        }
    }
}

/// Run statistics, mirroring the shape of the exported artifacts.
#[derive(Clone, Debug, Default)]
pub struct MeshStats {
    pub grid_dims: [i32; 3],
    pub dx: f64,
    /// Cell count of the exported mesh (after optional coarsening).
    pub hex_count: usize,
    pub tet_count: usize,
    pub build: BuildStats,
    pub coarsen_seconds: f64,
    pub tet_seconds: f64,
    pub total_seconds: f64,
}

impl MeshStats {
    /// Key-value text: grid dimensions, spacing, element count, and
    /// per-stage timings.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = self.grid_dims;
        if d[2] > 0 {
            let _ = writeln!(s, "grid_dim: {}x{}x{}", d[0], d[1], d[2]);
        } else {
            let _ = writeln!(s, "grid_dim: {}x{}", d[0], d[1]);
        }
        let _ = writeln!(s, "dx: {}", self.dx);
        let _ = writeln!(s, "hex_count: {}", self.hex_count);
        let _ = writeln!(s, "time_s: {}", self.total_seconds);
        let _ = writeln!(s, "region_count: {}", self.build.region_count);
        let _ = writeln!(s, "interior_regions: {}", self.build.interior_region_count);
        for (region, copies) in &self.build.copies_per_region {
            let _ = writeln!(s, "copies_region_{region}: {copies}");
        }
        let _ = writeln!(s, "dedup_events: {}", self.build.dedup_events);
        for (stage, secs) in &self.build.stage_seconds {
            let _ = writeln!(s, "stage_{}_s: {secs}", stage.replace(' ', "_"));
        }
        if self.coarsen_seconds > 0.0 {
            let _ = writeln!(s, "stage_coarsen_s: {}", self.coarsen_seconds);
        }
        if self.tet_count > 0 {
            let _ = writeln!(s, "tet_count: {}", self.tet_count);
            let _ = writeln!(s, "stage_tets_s: {}", self.tet_seconds);
        }
        s
    }
}

/// Bounding box of the input expanded by `pad` cells per side. With
/// `max_dim`, the spacing is chosen so the largest axis ends up with about
/// that many cells, padding included.
pub fn autosize_grid(
    surface: &SurfaceMesh,
    dx: Option<f64>,
    max_dim: Option<u32>,
    pad: i32,
) -> Result<GridSpec, PipelineError> {
    if pad < 2 {
        return Err(PipelineError::Config("padding must be at least 2 cells".into()));
    }
    let (mn, mx) = surface.bbox();
    let axes = surface.dim().axes();
    let extent: Vec<f64> = (0..axes).map(|a| mx[a] - mn[a]).collect();
    let max_extent = extent.iter().cloned().fold(0.0f64, f64::max);
    if max_extent <= 0.0 {
        return Err(PipelineError::Config("surface bounding box is empty".into()));
    }
    let dx = match (dx, max_dim) {
        (Some(dx), None) => {
            if dx <= 0.0 {
                return Err(PipelineError::Config("dx must be positive".into()));
            }
            dx
        }
        (None, Some(n)) => {
            let inner = n as i64 - 2 * pad as i64;
            if inner < 1 {
                return Err(PipelineError::Config(
                    "max grid dimension leaves no room after padding".into(),
                ));
            }
            max_extent / inner as f64
        }
        _ => {
            return Err(PipelineError::Config(
                "exactly one of dx and max-dim must be given".into(),
            ));
        }
    };
    let mut dims = [0i32; 3];
    for a in 0..axes {
        let inner = (extent[a] / dx).ceil().max(1.0) as i32;
        dims[a] = inner + 2 * pad;
    }
    let origin = Point3::new(
        mn.x - pad as f64 * dx,
        mn.y - pad as f64 * dx,
        if axes == 3 { mn.z - pad as f64 * dx } else { 0.0 },
    );
    Ok(match surface.dim() {
        Dim::Three => GridSpec::new_3d(origin, dx, dims),
        Dim::Two => GridSpec::new_2d(origin, dx, [dims[0], dims[1]]),
    })
}

fn default_out(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "mesh".into());
    input.with_file_name(format!("{stem}{suffix}"))
}

/// Execute the full pipeline described by `config`: import, validate, build
/// the embedding mesh, optionally coarsen and tetrahedralize, export, and
/// write statistics.
pub fn run_pipeline(config: &PipelineConfig) -> Result<MeshStats, PipelineError> {
    let start = std::time::Instant::now();
    let surface = formats::import_surface(&config.input, config.two_d)?;
    let grid = autosize_grid(&surface, config.dx, config.max_dim, config.pad)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    let built = pool
        .install(|| build_embedding(&surface, &grid))
        .map_err(|e| match e {
            BuildError::InvalidSurface(report) => PipelineError::InvalidSurface(
                report.defects.iter().map(|d| d.to_string()).collect(),
            ),
            BuildError::Geometry(g) => PipelineError::Build(g.to_string()),
        })?;

    let mut stats = MeshStats {
        grid_dims: grid.dims(),
        dx: grid.dx(),
        build: built.stats.clone(),
        ..MeshStats::default()
    };

    let t = std::time::Instant::now();
    let (mesh, vpool, vgrid) = if config.coarsen_levels > 0 {
        let out = coarsen::coarsen(&built.mesh, &built.pool, &grid, config.coarsen_levels);
        stats.coarsen_seconds = t.elapsed().as_secs_f64();
        out
    } else {
        (built.mesh, built.pool, grid.clone())
    };
    stats.hex_count = mesh.len();
    stats.grid_dims = grid.dims();
    stats.dx = grid.dx();

    let out_path = config
        .out
        .clone()
        .unwrap_or_else(|| default_out(&config.input, "_hex.vtk"));
    formats::export_mesh(&mesh, &vpool, &vgrid, &out_path)?;

    if config.emit_tets {
        if config.two_d {
            return Err(PipelineError::Config(
                "tetrahedron output applies to 3D inputs only".into(),
            ));
        }
        let t = std::time::Instant::now();
        let tets = tet::hex_to_tet(&mesh, &vpool, &vgrid)
            .map_err(|e| PipelineError::Build(e.to_string()))?;
        stats.tet_seconds = t.elapsed().as_secs_f64();
        stats.tet_count = tets.tets.len();
        let tet_path = default_out(&out_path, "_tet.vtk");
        formats::export_tets(&tets, &tet_path)?;
    }

    stats.total_seconds = start.elapsed().as_secs_f64();
    if let Some(stats_path) = &config.stats_path {
        std::fs::write(stats_path, stats.to_text())
            .map_err(|e| PipelineError::Io(format!("{}: {e}", stats_path.display())))?;
    }
    Ok(stats)
}
