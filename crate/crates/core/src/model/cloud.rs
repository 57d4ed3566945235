use crate::error::{Error, Result};

use super::Vec3;

/// Column-oriented point cloud with optional per-point channels.
///
/// Every present channel has exactly one entry per position. Intensities lie in
/// [0, 1]; colors are (r, g, b) in [0, 1].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    positions: Vec<Vec3>,
    rgb: Option<Vec<[f64; 3]>>,
    intensity: Option<Vec<f64>>,
    ring: Option<Vec<u32>>,
    time_offset: Option<Vec<f64>>,
}

impl PointCloud {
    pub fn new(positions: Vec<Vec3>) -> Self {
        Self {
            positions,
            ..Default::default()
        }
    }

    pub fn with_rgb(mut self, rgb: Vec<[f64; 3]>) -> Result<Self> {
        self.check_len("rgb", rgb.len())?;
        if let Some(i) = rgb
            .iter()
            .position(|c| c.iter().any(|v| !(0.0..=1.0).contains(v)))
        {
            return Err(Error::validation(format!(
                "rgb of point {i} outside [0, 1]"
            )));
        }
        self.rgb = Some(rgb);
        Ok(self)
    }

    pub fn with_intensity(mut self, intensity: Vec<f64>) -> Result<Self> {
        self.check_len("intensity", intensity.len())?;
        if let Some(i) = intensity.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::validation(format!(
                "intensity {} of point {i} outside [0, 1]",
                intensity[i]
            )));
        }
        self.intensity = Some(intensity);
        Ok(self)
    }

    pub fn with_ring(mut self, ring: Vec<u32>) -> Result<Self> {
        self.check_len("ring", ring.len())?;
        self.ring = Some(ring);
        Ok(self)
    }

    pub fn with_time_offset(mut self, time_offset: Vec<f64>) -> Result<Self> {
        self.check_len("time_offset", time_offset.len())?;
        self.time_offset = Some(time_offset);
        Ok(self)
    }

    pub fn without_ring(mut self) -> Self {
        self.ring = None;
        self
    }

    pub fn without_time_offset(mut self) -> Self {
        self.time_offset = None;
        self
    }

    fn check_len(&self, name: &str, len: usize) -> Result<()> {
        if len != self.positions.len() {
            return Err(Error::validation(format!(
                "{name} channel has {len} entries for {} points",
                self.positions.len()
            )));
        }
        Ok(())
    }

    /// Checks channel ring indices against a sensor channel count.
    pub fn validate_rings(&self, channels: usize) -> Result<()> {
        if let Some(ring) = &self.ring {
            if let Some(i) = ring.iter().position(|&r| r as usize >= channels) {
                return Err(Error::validation(format!(
                    "ring {} of point {i} not below channel count {channels}",
                    ring[i]
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn rgb(&self) -> Option<&[[f64; 3]]> {
        self.rgb.as_deref()
    }

    pub fn intensity(&self) -> Option<&[f64]> {
        self.intensity.as_deref()
    }

    pub fn ring(&self) -> Option<&[u32]> {
        self.ring.as_deref()
    }

    pub fn time_offset(&self) -> Option<&[f64]> {
        self.time_offset.as_deref()
    }

    /// Keeps the points at `indices`, in that order, with all channels.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        fn pick<T: Copy>(src: &Option<Vec<T>>, idx: &[usize]) -> Option<Vec<T>> {
            src.as_ref().map(|v| idx.iter().map(|&i| v[i]).collect())
        }
        PointCloud {
            positions: indices.iter().map(|&i| self.positions[i]).collect(),
            rgb: pick(&self.rgb, indices),
            intensity: pick(&self.intensity, indices),
            ring: pick(&self.ring, indices),
            time_offset: pick(&self.time_offset, indices),
        }
    }

    pub fn filter<F: FnMut(usize, &Vec3) -> bool>(&self, mut keep: F) -> PointCloud {
        let idx: Vec<usize> = self
            .positions
            .iter()
            .enumerate()
            .filter(|(i, p)| keep(*i, p))
            .map(|(i, _)| i)
            .collect();
        self.select(&idx)
    }

    /// Applies `f` to every position, keeping channels.
    pub fn map_positions<F: FnMut(&Vec3) -> Vec3>(&self, f: F) -> PointCloud {
        PointCloud {
            positions: self.positions.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn set_intensity_unchecked(&mut self, intensity: Vec<f64>) {
        debug_assert_eq!(intensity.len(), self.positions.len());
        self.intensity = Some(intensity);
    }

    /// Appends `other`. A channel survives if both clouds carry it, except
    /// `time_offset`, which survives if either does (missing entries become 0).
    pub fn concat(&self, other: &PointCloud) -> PointCloud {
        fn both<T: Copy>(a: &Option<Vec<T>>, b: &Option<Vec<T>>) -> Option<Vec<T>> {
            match (a, b) {
                (Some(a), Some(b)) => Some(a.iter().chain(b.iter()).copied().collect()),
                _ => None,
            }
        }
        let time_offset = match (&self.time_offset, &other.time_offset) {
            (None, None) => None,
            (a, b) => {
                let mut t = a.clone().unwrap_or_else(|| vec![0.0; self.len()]);
                t.extend(b.clone().unwrap_or_else(|| vec![0.0; other.len()]));
                Some(t)
            }
        };
        PointCloud {
            positions: self
                .positions
                .iter()
                .chain(other.positions.iter())
                .copied()
                .collect(),
            rgb: both(&self.rgb, &other.rgb),
            intensity: both(&self.intensity, &other.intensity),
            ring: both(&self.ring, &other.ring),
            time_offset,
        }
    }

    pub fn centroid(&self) -> Option<Vec3> {
        if self.is_empty() {
            return None;
        }
        let sum = self.positions.iter().fold(Vec3::zeros(), |acc, p| acc + p);
        Some(sum / self.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_length_mismatch_rejected() {
        let c = PointCloud::new(vec![Vec3::zeros(); 3]);
        assert!(c.clone().with_intensity(vec![0.1; 2]).is_err());
        assert!(c.clone().with_intensity(vec![1.5, 0.0, 0.0]).is_err());
        assert!(c.with_intensity(vec![0.1; 3]).is_ok());
    }

    #[test]
    fn ring_validation() {
        let c = PointCloud::new(vec![Vec3::zeros(); 2])
            .with_ring(vec![0, 32])
            .unwrap();
        assert!(c.validate_rings(32).is_err());
        assert!(c.validate_rings(33).is_ok());
    }

    #[test]
    fn concat_channel_rules() {
        let a = PointCloud::new(vec![Vec3::zeros()])
            .with_intensity(vec![0.2])
            .unwrap()
            .with_time_offset(vec![-0.05])
            .unwrap();
        let b = PointCloud::new(vec![Vec3::x()])
            .with_intensity(vec![0.3])
            .unwrap();
        let c = a.concat(&b);
        assert_eq!(c.len(), 2);
        assert_eq!(c.intensity().unwrap(), &[0.2, 0.3]);
        assert_eq!(c.time_offset().unwrap(), &[-0.05, 0.0]);
        assert!(c.rgb().is_none());
    }
}
