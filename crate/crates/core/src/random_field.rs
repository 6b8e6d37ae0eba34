//! Gaussian random fields sampled at element centers, built from the
//! eigendecomposition of the center-to-center covariance matrix and brought
//! into `[-1, 1]` by clamping or rescaling.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

/// Above this many sample points the default sampler keeps only the leading
/// modes (see [`Truncation::Auto`]).
pub const FULL_RANK_LIMIT: usize = 2000;
/// Trace fraction retained by automatic truncation.
pub const AUTO_TRACE_FRACTION: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceKind {
    /// `exp(-d/ℓ)`.
    Exponential,
    /// `exp(-d²/ℓ)`.
    SquaredExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSpec {
    pub kind: CovarianceKind,
    pub correlation_length: f64,
}

impl CovarianceSpec {
    pub fn new(kind: CovarianceKind, correlation_length: f64) -> Result<Self> {
        if !(correlation_length.is_finite() && correlation_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "correlation length must be positive, got {correlation_length}"
            )));
        }
        Ok(Self { kind, correlation_length })
    }

    pub fn exponential(correlation_length: f64) -> Result<Self> {
        Self::new(CovarianceKind::Exponential, correlation_length)
    }

    /// Covariance at distance `d`.
    pub fn evaluate(&self, d: f64) -> f64 {
        match self.kind {
            CovarianceKind::Exponential => (-d / self.correlation_length).exp(),
            CovarianceKind::SquaredExponential => (-d * d / self.correlation_length).exp(),
        }
    }
}

/// How a Gaussian draw is brought into `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaBound {
    /// Clamp each value to `[-1, 1]`.
    #[default]
    Clamp,
    /// Divide the whole draw by its largest magnitude (when that exceeds 1).
    Rescale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Full rank up to [`FULL_RANK_LIMIT`] points, otherwise the smallest
    /// rank capturing [`AUTO_TRACE_FRACTION`] of the trace.
    #[default]
    Auto,
    Full,
    Rank(usize),
}

pub fn covariance_matrix(points: &[Point], spec: &CovarianceSpec) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| spec.evaluate((points[i] - points[j]).norm()))
}

/// Draws correlated standard-normal vectors as `F ξ`.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    spec: CovarianceSpec,
    points: Vec<Point>,
    /// Eigenvalues in descending order, negatives clipped to zero.
    eigenvalues: Vec<f64>,
    /// Leading eigenvectors scaled by the square roots of their eigenvalues.
    factor: DMatrix<f64>,
}

/// Sampler on the element centers of `mesh`.
pub fn build_sampler(mesh: &Mesh, spec: CovarianceSpec, truncation: Truncation) -> Result<FieldSampler> {
    build_sampler_from_points(mesh.centroids(), spec, truncation)
}

pub fn build_sampler_from_points(
    points: Vec<Point>,
    spec: CovarianceSpec,
    truncation: Truncation,
) -> Result<FieldSampler> {
    let spec = CovarianceSpec::new(spec.kind, spec.correlation_length)?;
    for i in 0..points.len() {
        for j in 0..i {
            if points[i] == points[j] {
                return Err(Error::InvalidMesh(format!("sample points {j} and {i} coincide")));
            }
        }
    }
    let n = points.len();
    let eig = SymmetricEigen::new(covariance_matrix(&points, &spec));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();

    let rank = match truncation {
        Truncation::Full => n,
        Truncation::Rank(r) => r.min(n),
        Truncation::Auto if n <= FULL_RANK_LIMIT => n,
        Truncation::Auto => {
            let total: f64 = eigenvalues.iter().sum();
            let mut acc = 0.0;
            eigenvalues
                .iter()
                .position(|&l| {
                    acc += l;
                    acc >= AUTO_TRACE_FRACTION * total
                })
                .map_or(n, |p| p + 1)
        }
    };
    let mut factor = DMatrix::zeros(n, rank);
    for (col, &src) in order.iter().take(rank).enumerate() {
        let scale = eigenvalues[col].sqrt();
        factor.set_column(col, &(eig.eigenvectors.column(src) * scale));
    }
    Ok(FieldSampler { spec, points, eigenvalues, factor })
}

impl FieldSampler {
    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.factor.ncols()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    /// Unclamped Gaussian draw for stream `(seed, index)`.
    pub fn draw_raw(&self, seed: u64, index: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let xi = DVector::from_iterator(self.rank(), (0..self.rank()).map(|_| rng.sample::<f64, _>(StandardNormal)));
        (&self.factor * xi).iter().copied().collect()
    }

    /// Draw for stream `(seed, index)` clamped to `[-1, 1]`.
    pub fn draw_eta(&self, seed: u64, index: u64) -> EtaRealization {
        self.draw_eta_with(seed, index, EtaBound::Clamp)
    }

    pub fn draw_eta_with(&self, seed: u64, index: u64, bound: EtaBound) -> EtaRealization {
        let mut values = self.draw_raw(seed, index);
        match bound {
            EtaBound::Clamp => values.iter_mut().for_each(|v| *v = v.clamp(-1.0, 1.0)),
            EtaBound::Rescale => {
                let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if max > 1.0 {
                    values.iter_mut().for_each(|v| *v /= max);
                }
            }
        }
        EtaRealization { values, seed, index }
    }
}

/// One bounded sample of the field, one value per element.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaRealization {
    pub values: Vec<f64>,
    pub seed: u64,
    pub index: u64,
}

impl EtaRealization {
    pub fn zeros(len: usize, seed: u64, index: u64) -> Self {
        Self { values: vec![0.0; len], seed, index }
    }

    /// Zeroes the entries where `mask` is set.
    pub fn mask(&mut self, mask: &[bool]) -> Result<()> {
        if mask.len() != self.values.len() {
            return Err(Error::mismatch(self.values.len(), mask.len(), "field mask"));
        }
        for (v, &m) in self.values.iter_mut().zip(mask) {
            if m {
                *v = 0.0;
            }
        }
        Ok(())
    }

    /// `1 + ε η` per element.
    pub fn alpha(&self, epsilon: f64) -> Vec<f64> {
        self.values.iter().map(|e| 1.0 + epsilon * e).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# seed={} index={}", self.seed, self.index)?;
        writeln!(w, "element,eta")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{k},{v:.17e}")?;
        }
        Ok(())
    }
}
