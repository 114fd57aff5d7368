//! Object geometry: meshes, signed distance grids, and surface sampling.

pub mod mesh;
pub mod sampling;
pub mod sdf;

pub use mesh::TriangleMesh;
pub use sampling::{farthest_point_sample, farthest_point_sample_from, surface_sample, SurfaceSampleSet};
pub use sdf::{SdfGrid, SdfQuery, TriBvh};

use nalgebra::Point3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

/// Number of surface samples kept on an object for penetration metrics and
/// heatmaps.
pub const OBJECT_SURFACE_SAMPLES: usize = 3000;

/// An object prepared for grasp synthesis: normalized mesh, signed distance
/// grid, mass properties, and a fixed surface sample set.
pub struct ObjectModel {
    pub mesh: TriangleMesh,
    pub sdf: SdfGrid,
    pub com: Point3<f64>,
    /// Max vertex distance from the center of mass.
    pub circumradius: f64,
    pub surface: SurfaceSampleSet,
}

impl ObjectModel {
    /// Normalizes the mesh scale, builds the SDF at `spacing` (default
    /// spacing when `None`), and draws the surface sample set from `seed`.
    pub fn prepare(mesh: &TriangleMesh, spacing: Option<f64>, seed: u64) -> Result<ObjectModel> {
        let mesh = mesh.normalize_scale()?;
        let spacing = spacing.unwrap_or_else(|| SdfGrid::default_spacing(&mesh));
        let sdf = SdfGrid::build(&mesh, spacing)?;
        Self::from_parts(mesh, sdf, seed)
    }

    /// Same as [`ObjectModel::prepare`] but reuses an existing grid (for
    /// cached SDF files). The mesh must already be normalized.
    pub fn from_parts(mesh: TriangleMesh, sdf: SdfGrid, seed: u64) -> Result<ObjectModel> {
        let com = mesh.center_of_mass();
        let circumradius = mesh.circumradius(&com);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let surface = surface_sample(&mesh, OBJECT_SURFACE_SAMPLES, &mut rng)?;
        Ok(ObjectModel {
            mesh,
            sdf,
            com,
            circumradius,
            surface,
        })
    }
}
