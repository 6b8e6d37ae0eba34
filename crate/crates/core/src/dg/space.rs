use std::ops::{Deref, DerefMut};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{ElementGeometry, Mesh, Point};

/// Two displacement components times three linear shape functions.
pub const DOFS_PER_ELEMENT: usize = 6;

/// Discontinuous piecewise-linear vector fields on a mesh.
///
/// Unknown `6k + 2a + c` is the coefficient of `λ_a e_c` on element `k`,
/// where `λ_a` is the barycentric coordinate of the element's vertex `a`.
#[derive(Debug, Clone)]
pub struct DgSpace {
    mesh: Mesh,
    geometry: Vec<ElementGeometry>,
    gradients: Vec<[Vector2<f64>; 3]>,
}

impl DgSpace {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let geometry = (0..mesh.num_elements()).map(|k| mesh.element_geometry(k)).collect::<Result<Vec<_>>>()?;
        let gradients = geometry.iter().map(|g| g.barycentric_gradients()).collect();
        Ok(Self { mesh, geometry, gradients })
    }

    /// Space on the uniform mesh with `n` cells per side.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(Mesh::uniform(n)?)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn num_elements(&self) -> usize {
        self.geometry.len()
    }

    pub fn num_dofs(&self) -> usize {
        DOFS_PER_ELEMENT * self.geometry.len()
    }

    pub fn dof(&self, element: usize, vertex: usize, component: usize) -> usize {
        debug_assert!(vertex < 3 && component < 2);
        DOFS_PER_ELEMENT * element + 2 * vertex + component
    }

    pub fn geometry(&self, k: usize) -> &ElementGeometry {
        &self.geometry[k]
    }

    pub fn gradients(&self, k: usize) -> &[Vector2<f64>; 3] {
        &self.gradients[k]
    }

    pub fn zeros(&self) -> DgVector {
        DgVector::zeros(self.num_dofs())
    }

    /// Nodal interpolant: each element takes the values of `f` at its own vertices.
    pub fn interpolate<F>(&self, f: F) -> DgVector
    where
        F: Fn(&Point) -> [Complex64; 2],
    {
        let mut v = self.zeros();
        for (k, tri) in self.mesh.elements().iter().enumerate() {
            for (a, &vid) in tri.iter().enumerate() {
                let value = f(&self.mesh.vertices()[vid]);
                for c in 0..2 {
                    v[self.dof(k, a, c)] = value[c];
                }
            }
        }
        v
    }

    pub(crate) fn check_len(&self, len: usize, context: &'static str) -> Result<()> {
        if len != self.num_dofs() {
            return Err(Error::mismatch(self.num_dofs(), len, context));
        }
        Ok(())
    }

    pub(crate) fn check_per_element(&self, len: usize, context: &'static str) -> Result<()> {
        if len != self.num_elements() {
            return Err(Error::mismatch(self.num_elements(), len, context));
        }
        Ok(())
    }

    /// Value on element `k` at barycentric coordinates `bary`.
    pub fn local_value(&self, v: &[Complex64], k: usize, bary: &[f64; 3]) -> [Complex64; 2] {
        let local = &v[DOFS_PER_ELEMENT * k..DOFS_PER_ELEMENT * (k + 1)];
        let mut out = [Complex64::default(); 2];
        for a in 0..3 {
            for c in 0..2 {
                out[c] += local[2 * a + c] * bary[a];
            }
        }
        out
    }

    /// Displacement gradient on element `k`, `grad[(i, j)] = ∂_j v_i`.
    pub fn local_gradient(&self, v: &[Complex64], k: usize) -> Matrix2<Complex64> {
        let local = &v[DOFS_PER_ELEMENT * k..DOFS_PER_ELEMENT * (k + 1)];
        let g = &self.gradients[k];
        let mut grad = Matrix2::zeros();
        for a in 0..3 {
            for c in 0..2 {
                for d in 0..2 {
                    grad[(c, d)] += local[2 * a + c] * g[a][d];
                }
            }
        }
        grad
    }
}

/// Coefficient vector of a field in a [`DgSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct DgVector(Vec<Complex64>);

impl DgVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::default(); len])
    }

    pub fn from_vec(values: Vec<Complex64>) -> Self {
        Self(values)
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: Complex64, x: &DgVector) {
        assert_eq!(self.len(), x.len(), "axpy on vectors of different length");
        for (y, x) in self.0.iter_mut().zip(&x.0) {
            *y += a * x;
        }
    }

    pub fn scale(&mut self, a: Complex64) {
        for y in &mut self.0 {
            *y *= a;
        }
    }

    /// Euclidean norm of the coefficients (not a function-space norm).
    pub fn coefficient_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Writes `index,re,im` rows under a header.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,re,im")?;
        for (i, z) in self.0.iter().enumerate() {
            writeln!(w, "{i},{:.17e},{:.17e}", z.re, z.im)?;
        }
        Ok(())
    }
}

impl Deref for DgVector {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl DerefMut for DgVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }
}

impl From<Vec<Complex64>> for DgVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}
