use num_complex::Complex64;

use crate::error::{Error, Result};

/// Square complex matrix in compressed sparse row layout.
///
/// Column indices are sorted and unique within each row; exact zeros are
/// never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl ComplexSparseMatrix {
    /// Sums duplicate `(row, col)` entries in input order, so identical triplet
    /// sequences always give bit-identical matrices.
    pub fn from_triplets<I>(dim: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let triplets: Vec<_> = triplets.into_iter().collect();
        let mut counts = vec![0usize; dim + 1];
        for &(r, c, _) in &triplets {
            if r >= dim || c >= dim {
                return Err(Error::IndexOutOfRange { what: "matrix entry", index: r.max(c), len: dim });
            }
            counts[r + 1] += 1;
        }
        for i in 0..dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut bucket = vec![(0usize, Complex64::default()); triplets.len()];
        for &(r, c, v) in &triplets {
            bucket[next[r]] = (c, v);
            next[r] += 1;
        }

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        row_ptr.push(0);
        for r in 0..dim {
            let row = &mut bucket[counts[r]..counts[r + 1]];
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut sum = Complex64::default();
                while i < row.len() && row[i].0 == c {
                    sum += row[i].1;
                    i += 1;
                }
                if sum != Complex64::default() {
                    col_idx.push(c);
                    values.push(sum);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self { dim, row_ptr, col_idx, values })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![Complex64::new(1.0, 0.0); dim],
        }
    }

    pub fn from_dense(dim: usize, dense: &[Complex64]) -> Result<Self> {
        if dense.len() != dim * dim {
            return Err(Error::mismatch(dim * dim, dense.len(), "dense matrix"));
        }
        Self::from_triplets(dim, (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j, dense[i * dim + j]))))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> (&[usize], &[Complex64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => Complex64::default(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.dim {
            return Err(Error::mismatch(self.dim, x.len(), "matrix-vector product"));
        }
        Ok((0..self.dim)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, v)| v * x[j]).sum()
            })
            .collect())
    }

    /// `vᵀ M v` for a real vector `v`.
    pub fn quadratic_form(&self, v: &[f64]) -> Result<Complex64> {
        if v.len() != self.dim {
            return Err(Error::mismatch(self.dim, v.len(), "quadratic form"));
        }
        let mut acc = Complex64::default();
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, a) in cols.iter().zip(vals) {
                acc += a * (v[i] * v[j]);
            }
        }
        Ok(acc)
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.dim + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for i in 0..self.dim {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![Complex64::default(); self.nnz()];
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                col_idx[next[j]] = i;
                values[next[j]] = v;
                next[j] += 1;
            }
        }
        Self { dim: self.dim, row_ptr: counts, col_idx, values }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut d = vec![Complex64::default(); self.dim * self.dim];
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                d[i * self.dim + j] = v;
            }
        }
        d
    }
}
