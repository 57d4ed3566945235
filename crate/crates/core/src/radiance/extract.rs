use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PointCloud, Vec3};

use super::camera::CameraView;
use super::decode::{ClampDecode, ColorDecode};
use super::grid::ShVoxelGrid;
use super::sh::{sh_basis_unchecked, sh_coeff_count};

/// Fixed-point scale for color sums. Integer accumulation keeps merges exactly
/// associative, so results do not depend on view order or partitioning.
const FIXED_SCALE: f64 = (1u64 << 60) as f64;

fn to_fixed(v: f64) -> i128 {
    (v * FIXED_SCALE).round() as i128
}

fn from_fixed(v: i128) -> f64 {
    v as f64 / FIXED_SCALE
}

/// Per-record color sums and hit counts, indexed by record slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAccumulator {
    rgb_sum: Vec<[i128; 3]>,
    count: Vec<u64>,
}

impl ColorAccumulator {
    pub fn new(records: usize) -> Self {
        Self {
            rgb_sum: vec![[0; 3]; records],
            count: vec![0; records],
        }
    }

    pub fn for_grid(grid: &ShVoxelGrid) -> Self {
        Self::new(grid.records().len())
    }

    pub fn add(&mut self, slot: usize, rgb: [f64; 3]) {
        for (s, v) in self.rgb_sum[slot].iter_mut().zip(rgb) {
            *s += to_fixed(v);
        }
        self.count[slot] += 1;
    }

    pub fn count(&self, slot: usize) -> u64 {
        self.count[slot]
    }

    pub fn rgb_sum(&self, slot: usize) -> [f64; 3] {
        self.rgb_sum[slot].map(from_fixed)
    }

    /// Mean color of a slot, `None` when never hit.
    pub fn mean(&self, slot: usize) -> Option<[f64; 3]> {
        let n = self.count[slot] as i128;
        if n == 0 {
            return None;
        }
        Some(self.rgb_sum[slot].map(|s| from_fixed((s + n / 2).div_euclid(n))))
    }

    /// Element-wise addition.
    pub fn merge(&mut self, other: &ColorAccumulator) {
        assert_eq!(
            self.count.len(),
            other.count.len(),
            "accumulator size mismatch"
        );
        for (a, b) in self.rgb_sum.iter_mut().zip(&other.rgb_sum) {
            for c in 0..3 {
                a[c] += b[c];
            }
        }
        for (a, b) in self.count.iter_mut().zip(&other.count) {
            *a += b;
        }
    }

    pub fn len(&self) -> usize {
        self.count.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count.is_empty()
    }
}

/// Fixed-step ray marcher over a voxel grid.
pub struct RayMarcher<'a> {
    grid: &'a ShVoxelGrid,
    t_step: f64,
    density_min: f64,
    decoder: &'a dyn ColorDecode,
}

impl<'a> RayMarcher<'a> {
    pub fn new(
        grid: &'a ShVoxelGrid,
        t_step: f64,
        density_min: f64,
        decoder: &'a dyn ColorDecode,
    ) -> Result<Self> {
        if !(t_step > 0.0) {
            return Err(Error::validation(format!(
                "t_step must be positive, got {t_step}"
            )));
        }
        if !(density_min >= 0.0) {
            return Err(Error::validation("density threshold must be non-negative"));
        }
        Ok(Self {
            grid,
            t_step,
            density_min,
            decoder,
        })
    }

    /// Entry and exit distances of the ray against the grid bounds, clipped to
    /// t ≥ 0. `None` for a miss.
    pub fn bounds(&self, origin: &Vec3, dir: &Vec3) -> Option<(f64, f64)> {
        let (lo, hi) = self.grid.bounds();
        let mut t_near = 0.0f64;
        let mut t_far = f64::INFINITY;
        for a in 0..3 {
            if dir[a] == 0.0 {
                if origin[a] < lo[a] || origin[a] > hi[a] {
                    return None;
                }
                continue;
            }
            let t0 = (lo[a] - origin[a]) / dir[a];
            let t1 = (hi[a] - origin[a]) / dir[a];
            t_near = t_near.max(t0.min(t1));
            t_far = t_far.min(t0.max(t1));
        }
        (t_near < t_far).then_some((t_near, t_far))
    }

    /// Marches one ray, sampling each step `[t, t + t_step)` at its midpoint.
    /// The direction is normalized first; a zero direction is a no-op.
    pub fn march(&self, origin: &Vec3, direction: &Vec3, acc: &mut ColorAccumulator) {
        let Some(dir) = direction.try_normalize(0.0) else {
            return;
        };
        let Some((t_min, t_max)) = self.bounds(origin, &dir) else {
            return;
        };
        let k = sh_coeff_count(self.grid.sh_degree());
        let basis = sh_basis_unchecked(&dir, self.grid.sh_degree());
        let mut t = t_min;
        while t < t_max {
            let p = origin + dir * (t + 0.5 * self.t_step);
            if let Some(cell) = self.grid.cell_at(&p) {
                let index = self.grid.linear_index(cell);
                if let Some(slot) = self.grid.record_slot(index) {
                    let rec = &self.grid.records()[slot];
                    if rec.density >= self.density_min {
                        let rgb = [0, 1, 2].map(|c| {
                            let raw: f64 = rec.coeffs[c * k..(c + 1) * k]
                                .iter()
                                .zip(&basis)
                                .map(|(a, b)| a * b)
                                .sum();
                            self.decoder.decode(raw)
                        });
                        acc.add(slot, rgb);
                    }
                }
            }
            t += self.t_step;
        }
    }

    pub fn march_view(&self, view: &CameraView) -> ColorAccumulator {
        let mut acc = ColorAccumulator::for_grid(self.grid);
        let origin = view.origin();
        for row in 0..view.height {
            for col in 0..view.width {
                self.march(&origin, &view.ray_direction(row, col), &mut acc);
            }
        }
        acc
    }
}

/// Marches one ray with the default clamp decode and no density gate.
pub fn march_ray(
    grid: &ShVoxelGrid,
    origin: &Vec3,
    direction: &Vec3,
    t_step: f64,
    acc: &mut ColorAccumulator,
) -> Result<()> {
    RayMarcher::new(grid, t_step, 0.0, &ClampDecode)?.march(origin, direction, acc);
    Ok(())
}

/// One point per voxel hit at least once with density ≥ `density_min`, placed
/// at the voxel center and colored with the mean of its per-step colors.
/// Points are ordered by linear voxel index.
pub fn extract_colored_cloud(
    grid: &ShVoxelGrid,
    views: &[CameraView],
    t_step: f64,
    density_min: f64,
    decoder: &dyn ColorDecode,
) -> Result<PointCloud> {
    if views.is_empty() {
        return Err(Error::validation(
            "color extraction needs at least one view",
        ));
    }
    let marcher = RayMarcher::new(grid, t_step, density_min, decoder)?;
    let acc = views.par_iter().map(|v| marcher.march_view(v)).reduce(
        || ColorAccumulator::for_grid(grid),
        |mut a, b| {
            a.merge(&b);
            a
        },
    );
    let mut slots: Vec<usize> = (0..acc.len()).filter(|&s| acc.count(s) > 0).collect();
    slots.sort_by_key(|&s| grid.records()[s].index);
    let positions = slots
        .iter()
        .map(|&s| grid.voxel_center(grid.records()[s].index))
        .collect();
    let rgb = slots.iter().map(|&s| acc.mean(s).unwrap()).collect();
    PointCloud::new(positions).with_rgb(rgb)
}
