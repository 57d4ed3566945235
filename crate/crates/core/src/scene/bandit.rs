use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::io::content_lines;
use crate::model::Box3D;

use super::raster::FeasibilityRaster;

pub const DEFAULT_BANDIT_CELL: f64 = 0.6;

/// Per-cell success/failure counts over a square BEV area. Counts start at 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditGrid {
    origin: [f64; 2],
    cell: f64,
    nx: usize,
    ny: usize,
    success: Vec<u64>,
    failure: Vec<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BanditUpdate {
    pub successes: usize,
    pub failures: usize,
    pub low_score: usize,
    pub outside: usize,
}

impl BanditGrid {
    /// `origin` is the minimum corner.
    pub fn new(origin: [f64; 2], cell: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(cell > 0.0) || nx == 0 || ny == 0 {
            return Err(Error::validation(
                "bandit grid needs a positive cell edge and cells",
            ));
        }
        Ok(Self {
            origin,
            cell,
            nx,
            ny,
            success: vec![1; nx * ny],
            failure: vec![1; nx * ny],
        })
    }

    /// Grid over the same square as `raster`.
    pub fn covering(raster: &FeasibilityRaster, cell: f64) -> Result<Self> {
        let side = raster.size() as f64 * raster.resolution();
        let n = (side / cell).ceil() as usize;
        let [ox, oy] = raster.origin();
        Self::new([ox - raster.radius(), oy - raster.radius()], cell, n, n)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_edge(&self) -> f64 {
        self.cell
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<usize> {
        let fx = ((x - self.origin[0]) / self.cell).floor();
        let fy = ((y - self.origin[1]) / self.cell).floor();
        (fx >= 0.0 && fx < self.nx as f64 && fy >= 0.0 && fy < self.ny as f64)
            .then(|| fy as usize * self.nx + fx as usize)
    }

    pub fn cell_center(&self, cell: usize) -> (f64, f64) {
        let (ix, iy) = (cell % self.nx, cell / self.nx);
        (
            self.origin[0] + (ix as f64 + 0.5) * self.cell,
            self.origin[1] + (iy as f64 + 0.5) * self.cell,
        )
    }

    pub fn counts(&self, cell: usize) -> (u64, u64) {
        (self.success[cell], self.failure[cell])
    }

    pub fn set_counts(&mut self, cell: usize, success: u64, failure: u64) -> Result<()> {
        if success == 0 || failure == 0 {
            return Err(Error::validation("bandit counts must be at least 1"));
        }
        self.success[cell] = success;
        self.failure[cell] = failure;
        Ok(())
    }

    /// Confident (score > 0.5) true positives add a success to their cell,
    /// confident negatives add a failure.
    pub fn update(&mut self, predictions: &[(Box3D, bool)]) -> BanditUpdate {
        let mut summary = BanditUpdate::default();
        for (b, is_tp) in predictions {
            if !(b.score.unwrap_or(0.0) > 0.5) {
                summary.low_score += 1;
                continue;
            }
            let Some(c) = self.cell_of(b.center.x, b.center.y) else {
                summary.outside += 1;
                continue;
            };
            if *is_tp {
                self.success[c] += 1;
                summary.successes += 1;
            } else {
                self.failure[c] += 1;
                summary.failures += 1;
            }
        }
        summary
    }

    /// One Beta(α = failures, β = successes) draw per listed cell.
    pub fn draw<R: Rng + ?Sized>(&self, cells: &[usize], rng: &mut R) -> Vec<f64> {
        cells
            .iter()
            .map(|&c| {
                Beta::new(self.failure[c] as f64, self.success[c] as f64)
                    .expect("counts are positive")
                    .sample(rng)
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# pgt bandit grid\n");
        let _ = writeln!(
            s,
            "grid {} {} {} {} {}",
            self.origin[0], self.origin[1], self.cell, self.nx, self.ny
        );
        for c in 0..self.cell_count() {
            if (self.success[c], self.failure[c]) != (1, 1) {
                let _ = writeln!(s, "{c} {} {}", self.success[c], self.failure[c]);
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut grid: Option<Self> = None;
        for (line_no, line) in content_lines(text) {
            let tok: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::format(format!("line {line_no}: malformed bandit line"));
            match (tok.as_slice(), grid.as_mut()) {
                (["grid", x, y, cell, nx, ny], None) => {
                    let f = |t: &str| crate::io::parse_f64(t, line_no);
                    grid = Some(Self::new(
                        [f(x)?, f(y)?],
                        f(cell)?,
                        nx.parse().map_err(|_| bad())?,
                        ny.parse().map_err(|_| bad())?,
                    )?);
                }
                ([c, s, f], Some(g)) => {
                    let c: usize = c.parse().map_err(|_| bad())?;
                    if c >= g.cell_count() {
                        return Err(Error::format(format!(
                            "line {line_no}: cell {c} outside grid"
                        )));
                    }
                    g.set_counts(
                        c,
                        s.parse().map_err(|_| bad())?,
                        f.parse().map_err(|_| bad())?,
                    )?;
                }
                _ => return Err(bad()),
            }
        }
        grid.ok_or_else(|| Error::format("bandit file has no grid line"))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&crate::io::read_text(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::io::write_bytes(path, self.to_text().as_bytes())
    }
}

/// Thompson sampling: the `n` cells with the largest Beta draws, ties to the
/// lower cell index.
pub fn bandit_select(grid: &BanditGrid, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > grid.cell_count() {
        return Err(Error::validation(format!(
            "cannot select {n} of {} cells",
            grid.cell_count()
        )));
    }
    let cells: Vec<usize> = (0..grid.cell_count()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = grid.draw(&cells, &mut rng);
    let mut order = cells;
    order.sort_by(|&a, &b| draws[b].total_cmp(&draws[a]).then(a.cmp(&b)));
    order.truncate(n);
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassLabel, Vec3};

    fn scored(x: f64, score: f64) -> Box3D {
        Box3D::new(
            Vec3::new(x, 0.1, 0.0),
            Vec3::repeat(1.0),
            0.0,
            ClassLabel::Car,
        )
        .unwrap()
        .with_score(score)
    }

    #[test]
    fn update_rules() {
        let mut g = BanditGrid::new([0.0, 0.0], 1.0, 4, 1).unwrap();
        let s = g.update(&[
            (scored(0.5, 0.9), true),
            (scored(1.5, 0.6), false),
            (scored(2.5, 0.5), true),
            (scored(9.0, 0.9), true),
        ]);
        assert_eq!(g.counts(0), (2, 1));
        assert_eq!(g.counts(1), (1, 2));
        assert_eq!(g.counts(2), (1, 1));
        assert_eq!(
            (s.successes, s.failures, s.low_score, s.outside),
            (1, 1, 1, 1)
        );
    }

    #[test]
    fn selection_and_persistence() {
        let mut g = BanditGrid::new([-1.0, -1.0], 0.5, 3, 2).unwrap();
        g.set_counts(4, 3, 7).unwrap();
        let all = bandit_select(&g, 6, 1).unwrap();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        assert_eq!(
            bandit_select(&g, 2, 5).unwrap(),
            bandit_select(&g, 2, 5).unwrap()
        );
        assert!(bandit_select(&g, 7, 0).is_err());
        assert_eq!(BanditGrid::parse(&g.to_text()).unwrap(), g);
        let raster = FeasibilityRaster::with_defaults();
        assert_eq!(
            BanditGrid::covering(&raster, 0.6).unwrap().cell_count(),
            171 * 171
        );
    }
}
