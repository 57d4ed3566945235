use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Ridge added to both covariances by the regularized distance.
pub const COVARIANCE_RIDGE: f64 = 1e-6;

/// Running (n, Σx, Σxxᵀ) with an associative merge.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryAccumulator {
    n: usize,
    sum: DVector<f64>,
    outer: DMatrix<f64>,
}

impl SummaryAccumulator {
    pub fn new(dim: usize) -> Self {
        Self {
            n: 0,
            sum: DVector::zeros(dim),
            outer: DMatrix::zeros(dim, dim),
        }
    }

    pub fn add(&mut self, x: &[f64]) -> Result<()> {
        if x.len() != self.sum.len() {
            return Err(Error::validation(format!(
                "sample of dimension {} added to summary of dimension {}",
                x.len(),
                self.sum.len()
            )));
        }
        let v = DVector::from_column_slice(x);
        self.outer += &v * v.transpose();
        self.sum += v;
        self.n += 1;
        Ok(())
    }

    pub fn merge(mut self, other: &Self) -> Result<Self> {
        if other.sum.len() != self.sum.len() {
            return Err(Error::validation(
                "merging summaries of different dimension",
            ));
        }
        self.n += other.n;
        self.sum += &other.sum;
        self.outer += &other.outer;
        Ok(self)
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// Mean and unbiased covariance (zero covariance for a single sample).
    pub fn finish(&self) -> Result<GaussianSummary> {
        if self.n == 0 {
            return Err(Error::validation("summary of an empty sample set"));
        }
        let n = self.n as f64;
        let mean = &self.sum / n;
        let cov = if self.n > 1 {
            (&self.outer - n * &mean * mean.transpose()) / (n - 1.0)
        } else {
            DMatrix::zeros(self.sum.len(), self.sum.len())
        };
        let cov = (&cov + cov.transpose()) / 2.0;
        GaussianSummary::new(mean, cov)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSummary {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianSummary {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::validation("covariance shape does not match mean"));
        }
        let scale = cov.abs().max().max(1.0);
        if (&cov - cov.transpose()).abs().max() > 1e-10 * scale {
            return Err(Error::validation("covariance is not symmetric"));
        }
        if d > 0 && SymmetricEigen::new(cov.clone()).eigenvalues.min() < -1e-8 * scale {
            return Err(Error::validation("covariance is not positive semidefinite"));
        }
        Ok(Self { mean, cov })
    }

    pub fn from_samples<'a>(
        samples: impl IntoIterator<Item = &'a [f64]>,
        dim: usize,
    ) -> Result<Self> {
        let mut acc = SummaryAccumulator::new(dim);
        for s in samples {
            acc.add(s)?;
        }
        acc.finish()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new((m + m.transpose()) / 2.0);
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// ||μa − μb||² + Tr(Σa + Σb − 2 (Σa^½ Σb Σa^½)^½), floored at 0.
pub fn frechet_distance(a: &GaussianSummary, b: &GaussianSummary) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::validation(format!(
            "summaries have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    let ra = psd_sqrt(&a.cov);
    let inner = &ra * &b.cov * &ra;
    let eig = SymmetricEigen::new((&inner + inner.transpose()) / 2.0);
    let cross: f64 = eig.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).sum();
    let d = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
    Ok(d.max(0.0))
}

/// Fréchet distance after adding [`COVARIANCE_RIDGE`]·I to both covariances.
pub fn frechet_distance_regularized(a: &GaussianSummary, b: &GaussianSummary) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let ridge = |s: &GaussianSummary| GaussianSummary {
        mean: s.mean.clone(),
        cov: &s.cov + DMatrix::identity(s.dim(), s.dim()) * COVARIANCE_RIDGE,
    };
    frechet_distance(&ridge(a), &ridge(b))
}
