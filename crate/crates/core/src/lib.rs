//! Pseudo-LiDAR object generation and LiDAR scene composition.
//!
//! The pipeline turns renderer output (sparse voxel grids with
//! spherical-harmonic color) into sensor-faithful LiDAR objects, stores them
//! in an object bank, and pastes them into LiDAR frames with map-aware
//! placement, occlusion and multi-sweep simulation.
//!
//! Stage modules:
//!
//! - [`radiance`]: view-averaged color extraction from spherical-harmonic voxel grids
//! - [`lidarize`]: range-view projection, visibility filtering and angular rearrangement
//! - [`intensity`]: ball patches, assignment matching, group intensity distance, intensity estimation
//! - [`bank`]: axis alignment, size jitter, bank generation and mixed sampling
//! - [`scene`]: ground estimation, feasibility rasters, placement, occlusion, sweeps, bandits
//! - [`eval`]: feature summaries, Fréchet distance and class balance

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bank;
pub mod error;
pub mod eval;
pub mod intensity;
pub mod io;
pub mod lidarize;
pub mod model;
pub mod radiance;
pub mod registry;
pub mod scene;

pub use error::{Error, Result};
pub use model::{Box3D, ClassLabel, LidarFrame, PointCloud, SensorConfig, Vec3};
pub use registry::Registry;
