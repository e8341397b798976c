//! Surfaces with conformal metrics: chart meshes, model surfaces and gluing.

mod builders;
pub mod glue;
pub mod io;
pub mod mesh;
pub mod mesher;
pub mod metric;

pub use builders::{
    build_cylinder_mesh, build_disk_mesh, build_mesh, build_mobius_mesh, build_weighted_disk_mesh,
    build_weighted_mobius_mesh, ARC_SEGMENTS,
};
pub use glue::{disk_chain_pairs, glue_boundary, glue_interior, mesh_glued_family, GluedMesh, GluingConfig};
pub use mesh::{boundary_length, boundary_loop_lengths, validate_mesh, MeshReport, SurfaceMesh, Violation};
pub use metric::{AngularDensity, Location, MetricSpec, NeckKind, Site};
