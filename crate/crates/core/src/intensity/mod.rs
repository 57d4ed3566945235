//! Ball-patch grouping, optimal patch matching, the group intensity distance,
//! and deterministic intensity estimation for color-only objects.
//!
//! Two clouds are compared by resampling each into N ball patches around
//! farthest-point-sampled centers, matching the patch centers with a
//! minimum-L1 perfect assignment, and summing the absolute differences of the
//! matched patches' mean intensities, scaled by λ.

mod calibration;
mod estimator;
mod fps;
mod group;
mod hungarian;
mod patches;

pub use calibration::{
    fit_calibration, CalibrationParams, CalibrationSample, ClassCalibration, Exemplar, HistBin,
    IntensityCalibration, TargetHistogram, MIN_CALIBRATION_POINTS, SAMPLES_PER_DOMAIN,
};
pub use estimator::{
    estimate_intensity, intensity_estimators, knn_raw_intensity, IntensityEstimator, KnnEstimator,
    KnnHistogramEstimator,
};
pub use fps::farthest_point_sample;
pub use group::{group_intensity_distance, GroupDistance, DEFAULT_LAMBDA, DEFAULT_PATCHES};
pub use hungarian::{hungarian_match, solve_assignment, Assignment};
pub use patches::{build_ball_patches, BallPatchSet};
