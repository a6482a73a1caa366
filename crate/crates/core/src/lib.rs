//! Construction of uniform-grid embedding hexahedron meshes for closed,
//! consistently oriented, possibly self-intersecting surface meshes.
//!
//! Overlapping material is represented by duplicated hexahedra that are
//! geometrically coincident with the same grid cell but use distinct
//! vertices, so downstream consumers see a well-defined mesh with no
//! accidental gluing. The pipeline runs in three phases: a volumetric
//! extension covering the surface, interior region creation, and interior
//! region merging. Optional topology-aware coarsening and a BCC-style
//! tetrahedralization post-process the result.
//!
//! A planar analog (segment loops to quadrilateral meshes) is available for
//! two-dimensional inputs; all algorithms are dimension-generic.

pub mod coarsen;
pub mod extension;
pub mod geometry;
pub mod grid;
pub mod hexmesh;
pub mod merge;
pub mod merging;
pub mod oracle;
pub mod pipeline;
pub mod pool;
pub mod regions;
pub mod shapes;
pub mod surface;
pub mod tet;

pub use grid::{Dim, GridSpec};
pub use hexmesh::HexMesh;
pub use pool::{Sign, VertexPool};
pub use surface::SurfaceMesh;
