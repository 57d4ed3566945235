//! Map-aware insertion of bank objects into LiDAR frames.
//!
//! A BEV feasibility raster is fused from a map layer and an estimated ground,
//! objects are placed on feasible, collision-free spots resting on the ground,
//! and the composed frame is optionally ray-traced so that nearer geometry
//! hides what lies behind it. Placement can be steered by a Thompson-sampling
//! bandit over BEV cells.

mod bandit;
mod geometry;
mod ground;
mod occlusion;
mod place;
mod raster;
mod sweeps;

pub use bandit::{bandit_select, BanditGrid, BanditUpdate, DEFAULT_BANDIT_CELL};
pub use geometry::{bev_intersection_area, bev_iou, obb_overlap};
pub use ground::{estimate_ground, GroundEstimate};
pub use occlusion::{occlusion_filter, occlusion_keep_mask, DEFAULT_OCCLUSION_EPS};
pub use place::{
    place_objects, placement_samplers, CandidateSet, InsertedObject, PlacementParams,
    PlacementReport, PlacementSampler, SkipReason, SkippedEntry, ThompsonSampler, UniformSampler,
};
pub use raster::{
    fuse_feasibility, fuse_feasibility_from_counts, FeasibilityRaster, DEFAULT_RADIUS,
    DEFAULT_RESOLUTION,
};
pub use sweeps::{virtual_sweeps, SweepParams};
