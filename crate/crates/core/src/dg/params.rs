use nalgebra::Matrix2;

use crate::error::{Error, Result};

/// Frequency, Lamé parameters, boundary matrix and penalty constants.
///
/// Fields are public so degenerate settings (zero penalties, `k = 0`) can be
/// built for diagnostics; [`PhysicalParams::new`] enforces the strict ranges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub k: f64,
    pub mu: f64,
    pub lambda: f64,
    /// Boundary matrix in `σ(u)ν + ik A u = 0`.
    pub a: Matrix2<f64>,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl PhysicalParams {
    pub fn new(k: f64, mu: f64, lambda: f64, a: Matrix2<f64>, gamma0: f64, gamma1: f64) -> Result<Self> {
        let p = Self { k, mu, lambda, a, gamma0, gamma1 };
        p.validate()?;
        Ok(p)
    }

    /// `μ = λ = 1`, `A = I`, `γ0 = 10`, `γ1 = 0.1`.
    pub fn standard(k: f64) -> Result<Self> {
        Self::new(k, 1.0, 1.0, Matrix2::identity(), 10.0, 0.1)
    }

    /// Strict checks: every parameter in its physical range.
    pub fn validate(&self) -> Result<()> {
        self.check_assembly()?;
        for (name, v) in [("k", self.k), ("gamma0", self.gamma0), ("gamma1", self.gamma1)] {
            if v <= 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Weaker checks under which the discrete form is still well defined.
    pub(crate) fn check_assembly(&self) -> Result<()> {
        let scalars =
            [("k", self.k), ("mu", self.mu), ("lambda", self.lambda), ("gamma0", self.gamma0), ("gamma1", self.gamma1)];
        for (name, v) in scalars {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
            }
        }
        if self.mu <= 0.0 {
            return Err(Error::InvalidParameter(format!("mu must be positive, got {}", self.mu)));
        }
        let a = &self.a;
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("boundary matrix is not finite".into()));
        }
        let scale = a.abs().max().max(1.0);
        if (a[(0, 1)] - a[(1, 0)]).abs() > 1e-14 * scale {
            return Err(Error::InvalidParameter("boundary matrix is not symmetric".into()));
        }
        // A 2×2 symmetric matrix is positive definite iff a11 > 0 and det > 0.
        if a[(0, 0)] <= 0.0 || a.determinant() <= 0.0 {
            return Err(Error::InvalidParameter("boundary matrix is not positive definite".into()));
        }
        Ok(())
    }

    /// Stress of a (possibly complex) displacement gradient, `grad[(i, j)] = ∂_j u_i`.
    pub fn stress<T>(&self, grad: &Matrix2<T>) -> Matrix2<T>
    where
        T: nalgebra::ComplexField<RealField = f64> + Copy,
    {
        let strain = (grad + grad.transpose()) * T::from_real(0.5);
        let div = grad[(0, 0)] + grad[(1, 1)];
        strain * T::from_real(2.0 * self.mu) + Matrix2::identity() * (div * T::from_real(self.lambda))
    }
}
