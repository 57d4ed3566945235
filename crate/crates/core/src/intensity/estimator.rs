use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{ClassLabel, PointCloud};
use crate::registry::Registry;

use super::calibration::{Exemplar, IntensityCalibration, TargetHistogram};

/// Assigns intensities to a colored cloud from a fitted calibration.
pub trait IntensityEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(
        &self,
        cloud: &PointCloud,
        calibration: &IntensityCalibration,
        class: ClassLabel,
    ) -> Result<PointCloud>;
}

/// Mean intensity of the k exemplars nearest in rgb (ties to the lower index).
pub fn knn_raw_intensity(rgb: &[[f64; 3]], exemplars: &[Exemplar], k: usize) -> Vec<f64> {
    let k = k.min(exemplars.len()).max(1);
    rgb.par_iter()
        .map(|c| {
            let mut d: Vec<(f64, usize)> = exemplars
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let s = (0..3).map(|j| (c[j] - e.rgb[j]).powi(2)).sum::<f64>();
                    (s, i)
                })
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < d.len() {
                d.select_nth_unstable_by(k - 1, cmp);
            }
            let sum: f64 = d[..k].iter().map(|&(_, i)| exemplars[i].intensity).sum();
            (sum / k as f64).clamp(0.0, 1.0)
        })
        .collect()
}

/// Rank-based histogram matching: the point at rank r of n is sent to the
/// target quantile (r + 0.5)/n. Equal raw values are ranked by index.
fn match_histogram(raw: &[f64], target: &TargetHistogram) -> Vec<f64> {
    let n = raw.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]).then(a.cmp(&b)));
    let mut out = vec![0.0; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = target.quantile((rank as f64 + 0.5) / n as f64);
    }
    out
}

fn prepare<'a>(
    cloud: &'a PointCloud,
    calibration: &'a IntensityCalibration,
    class: ClassLabel,
) -> Result<(&'a [[f64; 3]], &'a super::calibration::ClassCalibration)> {
    let cal = calibration.class(class)?;
    let rgb = cloud
        .rgb()
        .ok_or_else(|| Error::validation("intensity estimation needs an rgb channel"))?;
    Ok((rgb, cal))
}

fn with_values(cloud: &PointCloud, values: Vec<f64>) -> PointCloud {
    let mut out = cloud.clone();
    out.set_intensity_unchecked(values);
    out
}

/// Nearest-exemplar estimate followed by histogram matching to the class target.
#[derive(Debug, Default, Clone, Copy)]
pub struct KnnHistogramEstimator;

impl IntensityEstimator for KnnHistogramEstimator {
    fn name(&self) -> &'static str {
        "knn-hist"
    }

    fn estimate(
        &self,
        cloud: &PointCloud,
        calibration: &IntensityCalibration,
        class: ClassLabel,
    ) -> Result<PointCloud> {
        let (rgb, cal) = prepare(cloud, calibration, class)?;
        let raw = knn_raw_intensity(rgb, &cal.exemplars, calibration.k());
        Ok(with_values(cloud, match_histogram(&raw, &cal.histogram)))
    }
}

/// Nearest-exemplar estimate only.
#[derive(Debug, Default, Clone, Copy)]
pub struct KnnEstimator;

impl IntensityEstimator for KnnEstimator {
    fn name(&self) -> &'static str {
        "knn"
    }

    fn estimate(
        &self,
        cloud: &PointCloud,
        calibration: &IntensityCalibration,
        class: ClassLabel,
    ) -> Result<PointCloud> {
        let (rgb, cal) = prepare(cloud, calibration, class)?;
        Ok(with_values(
            cloud,
            knn_raw_intensity(rgb, &cal.exemplars, calibration.k()),
        ))
    }
}

pub fn intensity_estimators() -> Registry<dyn IntensityEstimator> {
    let mut reg: Registry<dyn IntensityEstimator> =
        Registry::new("intensity estimator", "knn-hist");
    reg.register("knn-hist", || Box::new(KnnHistogramEstimator))
        .register("knn", || Box::new(KnnEstimator));
    reg
}

/// Default estimator.
pub fn estimate_intensity(
    cloud: &PointCloud,
    calibration: &IntensityCalibration,
    class: ClassLabel,
) -> Result<PointCloud> {
    KnnHistogramEstimator.estimate(cloud, calibration, class)
}
