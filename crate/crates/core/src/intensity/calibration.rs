use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{content_lines, parse_f64};
use crate::model::{ClassLabel, PointCloud};

use super::fps::farthest_point_sample;
use super::group::DEFAULT_PATCHES;
use super::hungarian::hungarian_match;
use super::patches::build_ball_patches;

/// Samples with fewer points than this are left out of calibration.
pub const MIN_CALIBRATION_POINTS: usize = 256;
/// At most this many sample pairs are used per class.
pub const SAMPLES_PER_DOMAIN: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exemplar {
    pub rgb: [f64; 3],
    pub intensity: f64,
}

/// One histogram bin: probability mass and the range of real values seen in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistBin {
    pub mass: f64,
    pub lo: f64,
    pub hi: f64,
}

/// B equal-width bins over [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetHistogram {
    bins: Vec<HistBin>,
}

impl TargetHistogram {
    pub fn bin_of(value: f64, bins: usize) -> usize {
        ((value * bins as f64).floor().max(0.0) as usize).min(bins - 1)
    }

    pub fn from_values(values: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::validation("histogram needs at least one bin"));
        }
        if values.is_empty() {
            return Err(Error::validation("histogram of an empty value set"));
        }
        let mut acc: Vec<(usize, f64, f64)> = vec![(0, f64::INFINITY, f64::NEG_INFINITY); bins];
        for &v in values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(format!("intensity {v} outside [0, 1]")));
            }
            let b = &mut acc[Self::bin_of(v, bins)];
            b.0 += 1;
            b.1 = b.1.min(v);
            b.2 = b.2.max(v);
        }
        let n = values.len() as f64;
        let bins = acc
            .into_iter()
            .enumerate()
            .map(|(i, (count, lo, hi))| {
                if count == 0 {
                    let mid = (i as f64 + 0.5) / bins as f64;
                    HistBin {
                        mass: 0.0,
                        lo: mid,
                        hi: mid,
                    }
                } else {
                    HistBin {
                        mass: count as f64 / n,
                        lo,
                        hi,
                    }
                }
            })
            .collect();
        Ok(Self { bins })
    }

    pub fn from_bins(bins: Vec<HistBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::validation("histogram needs at least one bin"));
        }
        let total: f64 = bins.iter().map(|b| b.mass).sum();
        if (total - 1.0).abs() > 1e-9 || bins.iter().any(|b| !(b.mass >= 0.0)) {
            return Err(Error::validation(format!(
                "histogram masses must be non-negative and sum to 1, got {total}"
            )));
        }
        if bins
            .iter()
            .any(|b| !(0.0 <= b.lo && b.lo <= b.hi && b.hi <= 1.0))
        {
            return Err(Error::validation("histogram bin range outside [0, 1]"));
        }
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[HistBin] {
        &self.bins
    }

    /// Inverse CDF: the first bin whose cumulative mass reaches `q`, then a
    /// linear position between that bin's observed extremes.
    pub fn quantile(&self, q: f64) -> f64 {
        let mut cum = 0.0;
        let mut last = 0;
        for (i, b) in self.bins.iter().enumerate() {
            if b.mass <= 0.0 {
                continue;
            }
            last = i;
            let next = cum + b.mass;
            if next >= q {
                let frac = ((q - cum) / b.mass).clamp(0.0, 1.0);
                return b.lo + frac * (b.hi - b.lo);
            }
            cum = next;
        }
        self.bins[last].hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassCalibration {
    pub exemplars: Vec<Exemplar>,
    pub histogram: TargetHistogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityCalibration {
    k: usize,
    classes: BTreeMap<ClassLabel, ClassCalibration>,
}

impl IntensityCalibration {
    pub fn new(k: usize, classes: BTreeMap<ClassLabel, ClassCalibration>) -> Result<Self> {
        if k == 0 {
            return Err(Error::validation("neighbor count k must be at least 1"));
        }
        for (class, cal) in &classes {
            if cal.exemplars.is_empty() {
                return Err(Error::validation(format!("class {class} has no exemplars")));
            }
        }
        Ok(Self { k, classes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class(&self, class: ClassLabel) -> Result<&ClassCalibration> {
        self.classes
            .get(&class)
            .ok_or_else(|| Error::validation(format!("no intensity calibration for class {class}")))
    }

    pub fn classes(&self) -> impl Iterator<Item = ClassLabel> + '_ {
        self.classes.keys().copied()
    }

    pub fn to_text(&self) -> String {
        let bins = self
            .classes
            .values()
            .next()
            .map_or(0, |c| c.histogram.bins.len());
        let mut s = String::from("# pgt intensity calibration\n");
        let _ = writeln!(s, "k {}", self.k);
        let _ = writeln!(s, "bins {bins}");
        for (class, cal) in &self.classes {
            for e in &cal.exemplars {
                let _ = writeln!(
                    s,
                    "{class} {} {} {} {}",
                    e.rgb[0], e.rgb[1], e.rgb[2], e.intensity
                );
            }
        }
        s.push_str("histogram\n");
        for (class, cal) in &self.classes {
            for (i, b) in cal.histogram.bins.iter().enumerate() {
                let _ = writeln!(s, "{class} {i} {} {} {}", b.mass, b.lo, b.hi);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut k = None;
        let mut nbins = None;
        let mut in_hist = false;
        let mut exemplars: BTreeMap<ClassLabel, Vec<Exemplar>> = BTreeMap::new();
        let mut hists: BTreeMap<ClassLabel, Vec<HistBin>> = BTreeMap::new();
        for (line_no, line) in content_lines(text) {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let count = |t: &str| -> Result<usize> {
                t.parse()
                    .map_err(|_| Error::format(format!("line {line_no}: bad count `{t}`")))
            };
            match tok.as_slice() {
                ["k", v] => k = Some(count(v)?),
                ["bins", v] => nbins = Some(count(v)?),
                ["histogram"] => in_hist = true,
                [class, r, g, b, i] if !in_hist => {
                    let class: ClassLabel = class.parse().map_err(|_| {
                        Error::format(format!("line {line_no}: unknown class `{class}`"))
                    })?;
                    exemplars.entry(class).or_default().push(Exemplar {
                        rgb: [
                            parse_f64(r, line_no)?,
                            parse_f64(g, line_no)?,
                            parse_f64(b, line_no)?,
                        ],
                        intensity: parse_f64(i, line_no)?,
                    });
                }
                [class, idx, mass, lo, hi] if in_hist => {
                    let class: ClassLabel = class.parse().map_err(|_| {
                        Error::format(format!("line {line_no}: unknown class `{class}`"))
                    })?;
                    let bins = hists.entry(class).or_default();
                    if count(idx)? != bins.len() {
                        return Err(Error::format(format!(
                            "line {line_no}: histogram bins out of order"
                        )));
                    }
                    bins.push(HistBin {
                        mass: parse_f64(mass, line_no)?,
                        lo: parse_f64(lo, line_no)?,
                        hi: parse_f64(hi, line_no)?,
                    });
                }
                _ => {
                    return Err(Error::format(format!(
                        "line {line_no}: unrecognized calibration line"
                    )))
                }
            }
        }
        let k = k.ok_or_else(|| Error::format("calibration is missing `k`"))?;
        let nbins = nbins.ok_or_else(|| Error::format("calibration is missing `bins`"))?;
        let mut classes = BTreeMap::new();
        for (class, ex) in exemplars {
            let bins = hists
                .remove(&class)
                .ok_or_else(|| Error::format(format!("class {class} has no histogram")))?;
            if bins.len() != nbins {
                return Err(Error::format(format!(
                    "class {class}: {} histogram bins, expected {nbins}",
                    bins.len()
                )));
            }
            classes.insert(
                class,
                ClassCalibration {
                    exemplars: ex,
                    histogram: TargetHistogram::from_bins(bins)?,
                },
            );
        }
        if let Some(class) = hists.keys().next() {
            return Err(Error::format(format!(
                "histogram for class {class} without exemplars"
            )));
        }
        Self::new(k, classes)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&crate::io::read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_bytes(path, self.to_text().as_bytes())
    }
}

/// One paired observation: the same object seen as a colored cloud and as a
/// real LiDAR cloud with intensity, both in its box frame.
#[derive(Debug, Clone)]
pub struct CalibrationSample {
    pub class: ClassLabel,
    pub rgb_cloud: PointCloud,
    pub intensity_cloud: PointCloud,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationParams {
    pub k: usize,
    pub bins: usize,
    pub patches: usize,
    pub resample_points: usize,
}

impl Default for CalibrationParams {
    fn default() -> Self {
        Self {
            k: 5,
            bins: 64,
            patches: DEFAULT_PATCHES,
            resample_points: MIN_CALIBRATION_POINTS,
        }
    }
}

/// Builds per-class exemplars from matched patch pairs and the target
/// intensity histogram from the real clouds.
pub fn fit_calibration(
    samples: &[CalibrationSample],
    params: &CalibrationParams,
) -> Result<IntensityCalibration> {
    if params.resample_points < params.patches {
        return Err(Error::validation(
            "resample count must be at least the patch count",
        ));
    }
    let mut by_class: BTreeMap<ClassLabel, Vec<&CalibrationSample>> = BTreeMap::new();
    for s in samples {
        if s.rgb_cloud.rgb().is_none() {
            return Err(Error::validation(format!("{} sample lacks rgb", s.class)));
        }
        if s.intensity_cloud.intensity().is_none() {
            return Err(Error::validation(format!(
                "{} sample lacks intensity",
                s.class
            )));
        }
        by_class.entry(s.class).or_default();
        if s.rgb_cloud.len() >= MIN_CALIBRATION_POINTS
            && s.intensity_cloud.len() >= MIN_CALIBRATION_POINTS
        {
            by_class.get_mut(&s.class).unwrap().push(s);
        }
    }
    let mut classes = BTreeMap::new();
    for (class, kept) in by_class {
        if kept.is_empty() {
            return Err(Error::validation(format!(
                "class {class} has no samples with at least {MIN_CALIBRATION_POINTS} points"
            )));
        }
        let mut exemplars = Vec::new();
        let mut real_values = Vec::new();
        for s in kept.iter().take(SAMPLES_PER_DOMAIN) {
            let fake = resample(&s.rgb_cloud, params.resample_points)?;
            let real = resample(&s.intensity_cloud, params.resample_points)?;
            let fp = build_ball_patches(&fake, params.patches)?;
            let rp = build_ball_patches(&real, params.patches)?;
            let m = hungarian_match(&fp.centers, &rp.centers)?;
            let rgb = fp.mean_rgb.expect("rgb present");
            let int = rp.mean_intensity.expect("intensity present");
            for (j, &r) in m.permutation.iter().enumerate() {
                exemplars.push(Exemplar {
                    rgb: rgb[j],
                    intensity: int[r],
                });
            }
            real_values.extend_from_slice(s.intensity_cloud.intensity().unwrap());
        }
        let histogram = TargetHistogram::from_values(&real_values, params.bins)?;
        classes.insert(
            class,
            ClassCalibration {
                exemplars,
                histogram,
            },
        );
    }
    IntensityCalibration::new(params.k, classes)
}

fn resample(cloud: &PointCloud, m: usize) -> Result<PointCloud> {
    Ok(cloud.select(&farthest_point_sample(cloud.positions(), m)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Vec3;

    fn sample(class: ClassLabel, n: usize, value: f64) -> CalibrationSample {
        let pts: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = i as f64 * 0.1;
                Vec3::new(t.sin() * 2.0, (t * 0.7).cos(), (i % 13) as f64 * 0.1)
            })
            .collect();
        let rgb = (0..n).map(|i| [(i % 7) as f64 / 7.0, 0.5, 0.25]).collect();
        CalibrationSample {
            class,
            rgb_cloud: PointCloud::new(pts.clone()).with_rgb(rgb).unwrap(),
            intensity_cloud: PointCloud::new(pts).with_intensity(vec![value; n]).unwrap(),
        }
    }

    #[test]
    fn constant_target() {
        let cal =
            fit_calibration(&[sample(ClassLabel::Car, 300, 0.4)], &Default::default()).unwrap();
        let c = cal.class(ClassLabel::Car).unwrap();
        assert_eq!(c.exemplars.len(), 16);
        assert!(c
            .exemplars
            .iter()
            .all(|e| (e.intensity - 0.4).abs() < 1e-12));
        let total: f64 = c.histogram.bins().iter().map(|b| b.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(c.histogram.quantile(0.5), 0.4);
    }

    #[test]
    fn small_sample_class_rejected() {
        let err =
            fit_calibration(&[sample(ClassLabel::Bus, 100, 0.4)], &Default::default()).unwrap_err();
        assert!(err.to_string().contains("bus"), "{err}");
        // a small sample alongside a large one is just skipped
        let ok = fit_calibration(
            &[
                sample(ClassLabel::Bus, 100, 0.1),
                sample(ClassLabel::Bus, 256, 0.4),
            ],
            &Default::default(),
        )
        .unwrap();
        assert_eq!(ok.class(ClassLabel::Bus).unwrap().exemplars.len(), 16);
    }

    #[test]
    fn text_roundtrip() {
        let cal = fit_calibration(
            &[
                sample(ClassLabel::Car, 300, 0.4),
                sample(ClassLabel::Pedestrian, 260, 0.7),
            ],
            &Default::default(),
        )
        .unwrap();
        let back = IntensityCalibration::parse(&cal.to_text()).unwrap();
        assert_eq!(back, cal);
        assert!(IntensityCalibration::parse("k 1\nbins 1\ncar 0 0 0 0.5\n").is_err());
        assert!(IntensityCalibration::parse("bins 1\n").is_err());
    }

    #[test]
    fn histogram_sums_to_one() {
        let vals: Vec<f64> = (0..1000).map(|i| (i as f64 / 999.0).powi(2)).collect();
        let h = TargetHistogram::from_values(&vals, 64).unwrap();
        let total: f64 = h.bins().iter().map(|b| b.mass).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(h.bins()[63].hi, 1.0);
        assert!(TargetHistogram::from_values(&[1.5], 4).is_err());
    }
}
