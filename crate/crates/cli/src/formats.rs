//! File I/O: triangle meshes from the Wavefront text format, planar segment
//! loops from a simple vertex/segment format, and legacy-text unstructured
//! grid output for hexahedron and tetrahedron meshes.

use crate::PipelineError;
use hexbed_core::grid::GridSpec;
use hexbed_core::hexmesh::HexMesh;
use hexbed_core::pool::VertexPool;
use hexbed_core::surface::SurfaceMesh;
use hexbed_core::tet::TetMesh;
use nalgebra::Point3;
use std::fmt::Write as _;
use std::path::Path;

/// Read a surface mesh. Triangulated `.obj`-style input in 3D; in planar
/// mode one `v x y` line per vertex and one `s i j` line (zero-based vertex
/// indices) per segment.
pub fn import_surface(path: &Path, two_d: bool) -> Result<SurfaceMesh, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
    if two_d {
        import_2d(&text)
    } else {
        import_obj(&text)
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> PipelineError {
    PipelineError::Parse { line, msg: msg.into() }
}

fn import_obj(text: &str) -> Result<SurfaceMesh, PipelineError> {
    let mut verts: Vec<Point3<f64>> = Vec::new();
    let mut tris: Vec<[u32; 3]> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs three coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad coordinate '{tok}'")))?;
                }
                verts.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let ids: Vec<&str> = tokens.collect();
                if ids.len() != 3 {
                    return Err(PipelineError::NonTriangle { line: line_no, corners: ids.len() });
                }
                let mut tri = [0u32; 3];
                for (k, tok) in ids.iter().enumerate() {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad face index '{tok}'")))?;
                    if i < 1 || i as usize > verts.len() {
                        return Err(parse_err(line_no, format!("face index {i} out of range")));
                    }
                    tri[k] = (i - 1) as u32;
                }
                tris.push(tri);
            }
            // Normals, texture coordinates, groups and material references
            // carry nothing we need.
            Some("vn") | Some("vt") | Some("o") | Some("g") | Some("s") | Some("usemtl")
            | Some("mtllib") => {}
            Some(other) => {
                return Err(parse_err(line_no, format!("unknown directive '{other}'")));
            }
            None => {}
        }
    }
    if tris.is_empty() {
        return Err(parse_err(0, "no faces found"));
    }
    Ok(SurfaceMesh::new_3d(verts, tris))
}

fn import_2d(text: &str) -> Result<SurfaceMesh, PipelineError> {
    let mut verts: Vec<[f64; 2]> = Vec::new();
    let mut segs: Vec<[u32; 2]> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0f64; 2];
                for c in coords.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "vertex needs two coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad coordinate '{tok}'")))?;
                }
                verts.push(coords);
            }
            Some("s") => {
                let mut seg = [0u32; 2];
                for s in seg.iter_mut() {
                    let tok = tokens
                        .next()
                        .ok_or_else(|| parse_err(line_no, "segment needs two indices"))?;
                    let i: u32 = tok
                        .parse()
                        .map_err(|_| parse_err(line_no, format!("bad segment index '{tok}'")))?;
                    if i as usize >= verts.len() {
                        return Err(parse_err(line_no, format!("segment index {i} out of range")));
                    }
                    *s = i;
                }
                segs.push(seg);
            }
            Some(other) => {
                return Err(parse_err(line_no, format!("unknown directive '{other}'")));
            }
            None => {}
        }
    }
    if segs.is_empty() {
        return Err(parse_err(0, "no segments found"));
    }
    Ok(SurfaceMesh::new_2d(verts, segs))
}

/// Parsed contents of one of our own legacy-text unstructured grid files.
#[derive(Clone, Debug, PartialEq)]
pub struct VtkData {
    pub points: Vec<Point3<f64>>,
    pub cells: Vec<Vec<u32>>,
    pub types: Vec<u8>,
}

fn write_vtk(data: &VtkData, path: &Path) -> Result<(), PipelineError> {
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("hexbed mesh\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {} double", data.points.len());
    for p in &data.points {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    let total: usize = data.cells.iter().map(|c| c.len() + 1).sum();
    let _ = writeln!(out, "CELLS {} {}", data.cells.len(), total);
    for c in &data.cells {
        let _ = write!(out, "{}", c.len());
        for v in c {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "CELL_TYPES {}", data.cells.len());
    for t in &data.types {
        let _ = writeln!(out, "{t}");
    }
    std::fs::write(path, out).map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))
}

/// Write a hexahedron (or planar quadrilateral) mesh. Geometrically
/// coincident vertices are written as distinct points: duplication is the
/// feature, not an artifact.
pub fn export_mesh(
    mesh: &HexMesh,
    pool: &VertexPool,
    grid: &GridSpec,
    path: &Path,
) -> Result<(), PipelineError> {
    let points: Vec<Point3<f64>> = pool.iter_ids().map(|v| pool.position(v, grid)).collect();
    let cell_type = if mesh.arity() == 8 { 12u8 } else { 9u8 };
    let data = VtkData {
        points,
        cells: mesh.iter().map(|(_, _, h)| h.to_vec()).collect(),
        types: vec![cell_type; mesh.len()],
    };
    write_vtk(&data, path)
}

/// Write a tetrahedron mesh (cell type 10).
pub fn export_tets(tets: &TetMesh, path: &Path) -> Result<(), PipelineError> {
    let data = VtkData {
        points: tets.verts.clone(),
        cells: tets.tets.iter().map(|t| t.to_vec()).collect(),
        types: vec![10u8; tets.tets.len()],
    };
    write_vtk(&data, path)
}

/// Re-read one of our own files; `import -> export` round-trips
/// byte-identically.
pub fn import_vtk(path: &Path) -> Result<VtkData, PipelineError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let mut expect = |what: &str| -> Result<(usize, &str), PipelineError> {
        lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing {what}")))
    };
    let (_, l) = expect("header")?;
    if !l.starts_with("# vtk DataFile") {
        return Err(parse_err(1, "not a legacy-text unstructured grid file"));
    }
    expect("title")?;
    let (n, l) = expect("format")?;
    if l != "ASCII" {
        return Err(parse_err(n + 1, "only ASCII files are supported"));
    }
    let (n, l) = expect("dataset")?;
    if l != "DATASET UNSTRUCTURED_GRID" {
        return Err(parse_err(n + 1, "only unstructured grids are supported"));
    }
    let (n, l) = expect("points header")?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some("POINTS") {
        return Err(parse_err(n + 1, "expected POINTS"));
    }
    let count: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(n + 1, "bad POINTS count"))?;
    let mut points = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, l) = expect("point")?;
        let mut c = l.split_whitespace();
        let mut p = [0.0f64; 3];
        for v in p.iter_mut() {
            *v = c
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| parse_err(n + 1, "bad point"))?;
        }
        points.push(Point3::new(p[0], p[1], p[2]));
    }
    let (n, l) = expect("cells header")?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some("CELLS") {
        return Err(parse_err(n + 1, "expected CELLS"));
    }
    let cell_count: usize = toks
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(n + 1, "bad CELLS count"))?;
    let mut cells = Vec::with_capacity(cell_count);
    for _ in 0..cell_count {
        let (n, l) = expect("cell")?;
        let mut c = l.split_whitespace();
        let k: usize = c
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(n + 1, "bad cell"))?;
        let mut ids = Vec::with_capacity(k);
        for _ in 0..k {
            ids.push(
                c.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(n + 1, "bad cell index"))?,
            );
        }
        cells.push(ids);
    }
    let (n, l) = expect("cell types header")?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some("CELL_TYPES") {
        return Err(parse_err(n + 1, "expected CELL_TYPES"));
    }
    let mut types = Vec::with_capacity(cell_count);
    for _ in 0..cell_count {
        let (n, l) = expect("cell type")?;
        types.push(
            l.trim()
                .parse()
                .map_err(|_| parse_err(n + 1, "bad cell type"))?,
        );
    }
    Ok(VtkData { points, cells, types })
}

/// Re-serialize parsed data (for round-trip checks).
pub fn export_vtk_data(data: &VtkData, path: &Path) -> Result<(), PipelineError> {
    write_vtk(data, path)
}
