use clap::Parser;
use hexbed_cli::{run_pipeline, PipelineConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Build a uniform-grid embedding hexahedron mesh from a closed, oriented,
/// possibly self-intersecting triangle mesh (or a planar segment loop).
#[derive(Parser, Debug)]
#[command(name = "mesh", version, about)]
struct Args {
    /// Input surface file (triangulated faces; `v`/`s` lines in planar mode).
    input: PathBuf,

    /// Background grid spacing.
    #[arg(long, group = "resolution", required = true)]
    dx: Option<f64>,

    /// Target cell count along the largest bounding-box axis.
    #[arg(long = "max-dim", group = "resolution")]
    max_dim: Option<u32>,

    /// Padding cells around the input bounding box (minimum 2).
    #[arg(long, default_value_t = 3)]
    pad: i32,

    /// Topology-aware coarsening levels applied to the result.
    #[arg(long, default_value_t = 0)]
    coarsen: usize,

    /// Also emit a tetrahedron mesh next to the hexahedron output.
    #[arg(long)]
    tets: bool,

    /// Output mesh path (default: `<input stem>_hex.vtk`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write run statistics as key-value text.
    #[arg(long)]
    stats: Option<PathBuf>,

    /// Planar mode: segment-loop input, quadrilateral output.
    #[arg(long = "two-d")]
    two_d: bool,

    /// Worker threads (0 = automatic).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = PipelineConfig {
        input: args.input,
        dx: args.dx,
        max_dim: args.max_dim,
        pad: args.pad,
        coarsen_levels: args.coarsen,
        emit_tets: args.tets,
        out: args.out,
        stats_path: args.stats,
        two_d: args.two_d,
        threads: args.threads,
    };
    match run_pipeline(&config) {
        Ok(stats) => {
            print!("{}", stats.to_text());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
