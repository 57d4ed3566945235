use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::PointCloud;

const REWEIGHT_ROUNDS: usize = 3;

/// Ground plane z = a·x + b·y + c plus per-cell inlier heights.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundEstimate {
    pub cell_size: f64,
    pub plane: [f64; 3],
    /// Mean inlier height per BEV cell (floor(x/cell), floor(y/cell)).
    pub heights: BTreeMap<(i64, i64), f64>,
    /// Indices of points within z_tol of the plane.
    pub inliers: Vec<usize>,
}

impl GroundEstimate {
    pub fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (
            (x / self.cell_size).floor() as i64,
            (y / self.cell_size).floor() as i64,
        )
    }

    pub fn plane_height(&self, x: f64, y: f64) -> f64 {
        let [a, b, c] = self.plane;
        a * x + b * y + c
    }

    /// Cell height when the cell holds inliers, the plane otherwise.
    pub fn height_at(&self, x: f64, y: f64) -> f64 {
        self.heights
            .get(&self.cell_of(x, y))
            .copied()
            .unwrap_or_else(|| self.plane_height(x, y))
    }
}

fn weighted_plane(samples: &[(f64, f64, f64)], weights: &[f64]) -> Option<[f64; 3]> {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for (&(x, y, z), &w) in samples.iter().zip(weights) {
        let row = Vector3::new(x, y, 1.0);
        ata += w * row * row.transpose();
        atb += w * z * row;
    }
    let sol = ata.lu().solve(&atb)?;
    sol.iter()
        .all(|v| v.is_finite())
        .then(|| [sol[0], sol[1], sol[2]])
}

/// Lowest point per BEV cell as ground candidates, a plane fit with Cauchy
/// reweighting (scale `z_tol`), then every point within `z_tol` of the plane
/// is a ground inlier.
pub fn estimate_ground(points: &PointCloud, cell: f64, z_tol: f64) -> Result<GroundEstimate> {
    if !(cell > 0.0) || !(z_tol > 0.0) {
        return Err(Error::validation(
            "ground cell size and z tolerance must be positive",
        ));
    }
    let pts = points.positions();
    let key = |x: f64, y: f64| ((x / cell).floor() as i64, (y / cell).floor() as i64);
    let mut lowest: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for (i, p) in pts.iter().enumerate() {
        lowest
            .entry(key(p.x, p.y))
            .and_modify(|j| {
                if p.z < pts[*j].z {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    if lowest.len() < 3 {
        return Err(Error::NoGround(format!(
            "{} candidate cells, need at least 3",
            lowest.len()
        )));
    }
    let samples: Vec<(f64, f64, f64)> = lowest
        .values()
        .map(|&i| (pts[i].x, pts[i].y, pts[i].z))
        .collect();
    // start from a level plane at the median candidate height
    let mut zs: Vec<f64> = samples.iter().map(|s| s.2).collect();
    zs.sort_by(f64::total_cmp);
    let mut plane = [0.0, 0.0, zs[zs.len() / 2]];
    for _ in 0..REWEIGHT_ROUNDS {
        let weights: Vec<f64> = samples
            .iter()
            .map(|&(x, y, z)| {
                let r = (z - (plane[0] * x + plane[1] * y + plane[2])) / z_tol;
                1.0 / (1.0 + r * r)
            })
            .collect();
        plane = weighted_plane(&samples, &weights)
            .ok_or_else(|| Error::NoGround("ground candidates are collinear".into()))?;
    }
    let mut sums: BTreeMap<(i64, i64), (f64, usize)> = BTreeMap::new();
    let mut inliers = Vec::new();
    for (i, p) in pts.iter().enumerate() {
        if (p.z - (plane[0] * p.x + plane[1] * p.y + plane[2])).abs() <= z_tol {
            inliers.push(i);
            let e = sums.entry(key(p.x, p.y)).or_insert((0.0, 0));
            e.0 += p.z;
            e.1 += 1;
        }
    }
    if inliers.is_empty() {
        return Err(Error::NoGround("no points near the fitted plane".into()));
    }
    let heights = sums
        .into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect();
    Ok(GroundEstimate {
        cell_size: cell,
        plane,
        heights,
        inliers,
    })
}
