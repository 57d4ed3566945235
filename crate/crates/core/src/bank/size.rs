use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{ClassLabel, Vec3};

/// Relative size jitter: each dimension is scaled by (1 + ε) with
/// ε ~ N(0, σ²) truncated to ±clip·σ.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeJitterConfig {
    pub mean_sizes: BTreeMap<ClassLabel, [f64; 3]>,
    pub sigma: f64,
    /// Clip bound in units of σ.
    pub clip: f64,
}

impl Default for SizeJitterConfig {
    fn default() -> Self {
        Self {
            mean_sizes: ClassLabel::ALL
                .iter()
                .map(|c| (*c, c.mean_size()))
                .collect(),
            sigma: 0.1,
            clip: 1.0,
        }
    }
}

impl SizeJitterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(self.clip > 0.0) {
            return Err(Error::validation(
                "size jitter sigma and clip must be positive",
            ));
        }
        Ok(())
    }

    /// Largest relative deviation from the class mean.
    pub fn max_relative_deviation(&self) -> f64 {
        self.sigma * self.clip
    }
}

pub fn determine_size(class: ClassLabel, jitter: &SizeJitterConfig, seed: u64) -> Result<Vec3> {
    jitter.validate()?;
    let mean = jitter
        .mean_sizes
        .get(&class)
        .ok_or_else(|| Error::validation(format!("no mean size for class {class}")))?;
    let normal = Normal::new(0.0, jitter.sigma)
        .map_err(|e| Error::validation(format!("size jitter: {e}")))?;
    let bound = jitter.max_relative_deviation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [0.0; 3];
    for (o, m) in out.iter_mut().zip(mean) {
        let eps: f64 = normal.sample(&mut rng);
        *o = m * (1.0 + eps.clamp(-bound, bound));
    }
    Ok(Vec3::from(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jitter_with(mean: [f64; 3], sigma: f64) -> SizeJitterConfig {
        SizeJitterConfig {
            mean_sizes: [(ClassLabel::Car, mean)].into_iter().collect(),
            sigma,
            clip: 1.0,
        }
    }

    #[test]
    fn clip_bounds_hold() {
        let j = jitter_with([4.0, 2.0, 1.5], 0.1);
        for seed in 0..2000 {
            let s = determine_size(ClassLabel::Car, &j, seed).unwrap();
            assert!(s.x >= 3.6 - 1e-12 && s.x <= 4.4 + 1e-12);
            assert!(s.y >= 1.8 - 1e-12 && s.y <= 2.2 + 1e-12);
            assert!(s.z >= 1.35 - 1e-12 && s.z <= 1.65 + 1e-12);
        }
    }

    #[test]
    fn tiny_sigma_returns_mean() {
        let j = jitter_with([4.0, 2.0, 1.5], 1e-300);
        assert_eq!(
            determine_size(ClassLabel::Car, &j, 7).unwrap(),
            Vec3::new(4.0, 2.0, 1.5)
        );
    }

    #[test]
    fn seeds_differ_and_repeat() {
        let j = SizeJitterConfig::default();
        let mut xs: Vec<[u64; 3]> = (0..100)
            .map(|s| {
                determine_size(ClassLabel::Car, &j, s)
                    .unwrap()
                    .map(f64::to_bits)
                    .into()
            })
            .collect();
        xs.sort();
        xs.dedup();
        assert!(xs.len() >= 99);
        assert_eq!(
            determine_size(ClassLabel::Bus, &j, 3).unwrap(),
            determine_size(ClassLabel::Bus, &j, 3).unwrap()
        );
    }

    #[test]
    fn unknown_class_and_bad_sigma() {
        let j = jitter_with([4.0, 2.0, 1.5], 0.1);
        assert!(determine_size(ClassLabel::Bus, &j, 0).is_err());
        assert!(determine_size(ClassLabel::Car, &jitter_with([1.0; 3], 0.0), 0).is_err());
    }
}
