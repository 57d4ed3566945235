//! View-averaged color extraction from sparse spherical-harmonic voxel grids.
//!
//! Every pixel ray of every camera view is marched through the grid with a
//! fixed step. Each step that lands in a stored voxel decodes the voxel's
//! spherical-harmonic color for the ray direction and adds it to that voxel's
//! running sum. The output holds one point per hit voxel, colored by the mean
//! over all contributing steps, which removes view-dependent shading.

mod camera;
mod decode;
mod extract;
mod grid;
mod sh;

pub use camera::{parse_views, read_views, CameraView};
pub use decode::{color_decoders, ClampDecode, ColorDecode, OffsetClampDecode, SigmoidDecode};
pub use extract::{extract_colored_cloud, march_ray, ColorAccumulator, RayMarcher};
pub use grid::{ShRecord, ShVoxelGrid};
pub use sh::{sh_basis, sh_coeff_count, SH_C0, SH_C1};
