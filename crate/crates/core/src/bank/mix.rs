use rand::Rng;

use crate::error::{Error, Result};
use crate::model::ClassLabel;

use super::generate::ObjectBankEntry;

/// GT:PGT sampling weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixRatio {
    pub gt: f64,
    pub pgt: f64,
}

impl MixRatio {
    pub fn new(gt: f64, pgt: f64) -> Result<Self> {
        if !(gt >= 0.0 && pgt >= 0.0 && gt + pgt > 0.0) || !(gt + pgt).is_finite() {
            return Err(Error::validation(format!("invalid mix ratio {gt}:{pgt}")));
        }
        Ok(Self { gt, pgt })
    }

    pub fn gt_probability(&self) -> f64 {
        self.gt / (self.gt + self.pgt)
    }
}

impl Default for MixRatio {
    fn default() -> Self {
        Self { gt: 1.0, pgt: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickSource {
    Gt,
    Pgt,
}

/// Position of the drawn entry within its source slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MixedPick {
    pub source: PickSource,
    pub index: usize,
}

/// Picks GT with probability gt/(gt+pgt), otherwise the bank, then a uniform
/// entry of `class` from the chosen side. A side without entries of the class
/// yields to the other side.
pub fn sample_mixed<R: Rng + ?Sized>(
    gt: &[ObjectBankEntry],
    pgt: &[ObjectBankEntry],
    class: ClassLabel,
    ratio: MixRatio,
    rng: &mut R,
) -> Result<MixedPick> {
    let pool = |entries: &[ObjectBankEntry]| -> Vec<usize> {
        entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.class == class)
            .map(|(i, _)| i)
            .collect()
    };
    let gt_pool = pool(gt);
    let pgt_pool = pool(pgt);
    let gt_ok = ratio.gt > 0.0 && !gt_pool.is_empty();
    let pgt_ok = ratio.pgt > 0.0 && !pgt_pool.is_empty();
    let source = match (gt_ok, pgt_ok) {
        (false, false) => {
            return Err(Error::validation(format!(
                "no {class} entries available for ratio {}:{}",
                ratio.gt, ratio.pgt
            )))
        }
        (true, false) => PickSource::Gt,
        (false, true) => PickSource::Pgt,
        (true, true) => {
            if rng.random::<f64>() < ratio.gt_probability() {
                PickSource::Gt
            } else {
                PickSource::Pgt
            }
        }
    };
    let chosen = match source {
        PickSource::Gt => &gt_pool,
        PickSource::Pgt => &pgt_pool,
    };
    Ok(MixedPick {
        source,
        index: chosen[rng.random_range(0..chosen.len())],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Box3D, PointCloud, Vec3};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn entry(class: ClassLabel, id: &str) -> ObjectBankEntry {
        ObjectBankEntry {
            class,
            source_id: id.into(),
            heading_deg: 0.0,
            range_m: 10.0,
            points: PointCloud::new(vec![Vec3::zeros()])
                .with_intensity(vec![0.5])
                .unwrap(),
            bbox: Box3D::new(Vec3::zeros(), Vec3::repeat(1.0), 0.0, class).unwrap(),
            front_flag: true,
        }
    }

    #[test]
    fn degenerate_ratios() {
        let gt = vec![entry(ClassLabel::Car, "g")];
        let pgt = vec![entry(ClassLabel::Car, "p")];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let a = sample_mixed(
                &gt,
                &pgt,
                ClassLabel::Car,
                MixRatio::new(1.0, 0.0).unwrap(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(a.source, PickSource::Gt);
            let b = sample_mixed(
                &gt,
                &pgt,
                ClassLabel::Car,
                MixRatio::new(0.0, 1.0).unwrap(),
                &mut rng,
            )
            .unwrap();
            assert_eq!(b.source, PickSource::Pgt);
        }
    }

    #[test]
    fn even_ratio_concentrates() {
        let gt = vec![entry(ClassLabel::Car, "g"), entry(ClassLabel::Bus, "x")];
        let pgt = vec![entry(ClassLabel::Car, "p")];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 10_000;
        let mut gt_count = 0;
        for _ in 0..draws {
            let pick =
                sample_mixed(&gt, &pgt, ClassLabel::Car, MixRatio::default(), &mut rng).unwrap();
            if pick.source == PickSource::Gt {
                assert_eq!(pick.index, 0);
                gt_count += 1;
            }
        }
        let frac = gt_count as f64 / draws as f64;
        assert!((0.47..=0.53).contains(&frac), "{frac}");
    }

    #[test]
    fn empty_sources() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_mixed(&[], &[], ClassLabel::Car, MixRatio::default(), &mut rng).is_err());
        assert!(MixRatio::new(0.0, 0.0).is_err());
        assert!(MixRatio::new(-1.0, 1.0).is_err());
    }
}
