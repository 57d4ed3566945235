//! Quality metrics for object sets: a 16-dimensional geometric and intensity
//! descriptor per object, Gaussian summaries of descriptor sets, the Fréchet
//! distance between summaries, and class-balance statistics.
//!
//! The descriptor is hand-crafted, so distances rank sample sets against each
//! other but are not comparable to learned-feature FID scores.

mod balance;
mod features;
mod frechet;

pub use balance::{class_balance_report, ClassBalance};
pub use features::{featurize, FeatureVector, FEATURE_DIM, FEATURE_NAMES};
pub use frechet::{
    frechet_distance, frechet_distance_regularized, GaussianSummary, SummaryAccumulator,
    COVARIANCE_RIDGE,
};

use crate::bank::ObjectBankEntry;
use crate::error::Result;
use crate::intensity::group_intensity_distance;

/// Mean group intensity distance over pairs (a[i], b[i mod |b|]). Pairs with
/// fewer than `patches` points on either side are skipped; `None` when no
/// pair qualifies.
pub fn mean_group_distance(
    a: &[&ObjectBankEntry],
    b: &[&ObjectBankEntry],
    patches: usize,
    lambda: f64,
) -> Result<Option<f64>> {
    if b.is_empty() {
        return Ok(None);
    }
    let mut total = 0.0;
    let mut pairs = 0usize;
    for (i, ea) in a.iter().enumerate() {
        let eb = b[i % b.len()];
        if ea.points.len() < patches || eb.points.len() < patches {
            continue;
        }
        total += group_intensity_distance(&ea.points, &eb.points, patches, lambda)?.value;
        pairs += 1;
    }
    Ok((pairs > 0).then(|| total / pairs as f64))
}
