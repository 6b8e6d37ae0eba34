//! LU factorization with partial pivoting, computed once and reused for any
//! number of right-hand sides.
//!
//! The sparse path is a left-looking Gilbert–Peierls factorization: for each
//! column of `A·Q` (with `Q` a minimum-degree column ordering) it solves the
//! sparse triangular system `L x = A(:, q_k)` over the reach of the column's
//! pattern, then picks the largest remaining entry as pivot. The fill-reducing
//! ordering lives in [`SymbolicAnalysis`] and can be shared by every matrix
//! with the same pattern. Below [`DENSE_THRESHOLD`] unknowns a dense
//! factorization is used instead.

use num_complex::Complex64;

use super::csr::ComplexSparseMatrix;
use super::ordering::minimum_degree;
use crate::error::{Error, Result};

/// Systems smaller than this are factorized densely by default.
pub const DENSE_THRESHOLD: usize = 500;

/// Pivots below `NEAR_SINGULAR_RATIO · max|a_ij|` trigger a warning.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-14;

/// A candidate on the diagonal is kept if `|x_diag| ≥ PIVOT_THRESHOLD · max|x|`.
const PIVOT_THRESHOLD: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LuMethod {
    #[default]
    Auto,
    Sparse,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FillStats {
    pub dim: usize,
    pub nnz_matrix: usize,
    /// Includes the unit diagonal.
    pub nnz_lower: usize,
    /// Includes the pivots.
    pub nnz_upper: usize,
}

impl FillStats {
    /// Entries of `L + U` (unit diagonal not counted) that are not in `A`.
    pub fn fill_in(&self) -> isize {
        (self.nnz_lower + self.nnz_upper) as isize - self.dim as isize - self.nnz_matrix as isize
    }
}

/// Column ordering for a sparsity pattern, reusable across factorizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicAnalysis {
    dim: usize,
    column_order: Vec<usize>,
}

impl SymbolicAnalysis {
    pub fn new(m: &ComplexSparseMatrix) -> Self {
        Self { dim: m.dim(), column_order: minimum_degree(m.dim(), m.row_ptr(), m.col_idx()) }
    }

    pub fn natural(dim: usize) -> Self {
        Self { dim, column_order: (0..dim).collect() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column_order(&self) -> &[usize] {
        &self.column_order
    }
}

#[derive(Debug, Clone)]
struct SparseFactors {
    /// `row_perm[k]` is the original row chosen as pivot at step `k`.
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    l_ptr: Vec<usize>,
    l_idx: Vec<usize>,
    l_val: Vec<Complex64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<usize>,
    u_val: Vec<Complex64>,
}

#[derive(Debug, Clone)]
struct DenseFactors {
    /// Row-major; strict lower part holds `L`, the rest `U`.
    lu: Vec<Complex64>,
    row_perm: Vec<usize>,
}

#[derive(Debug, Clone)]
enum Factors {
    Sparse(SparseFactors),
    Dense(DenseFactors),
}

/// Immutable triangular factors `P·A·Q = L·U`; safe to share between threads.
#[derive(Debug, Clone)]
pub struct LuFactors {
    dim: usize,
    factors: Factors,
    stats: FillStats,
    min_pivot: f64,
    max_entry: f64,
    near_singular_step: Option<usize>,
}

pub fn lu_factorize(m: &ComplexSparseMatrix) -> Result<LuFactors> {
    lu_factorize_with(m, LuMethod::Auto)
}

pub fn lu_factorize_with(m: &ComplexSparseMatrix, method: LuMethod) -> Result<LuFactors> {
    match method {
        LuMethod::Dense => LuFactors::dense(m),
        LuMethod::Auto if m.dim() < DENSE_THRESHOLD => LuFactors::dense(m),
        _ => LuFactors::sparse(&SymbolicAnalysis::new(m), m),
    }
}

pub fn lu_solve(factors: &LuFactors, b: &[Complex64]) -> Result<Vec<Complex64>> {
    factors.solve(b)
}

impl LuFactors {
    pub fn sparse(symbolic: &SymbolicAnalysis, m: &ComplexSparseMatrix) -> Result<Self> {
        let n = m.dim();
        if symbolic.dim != n {
            return Err(Error::mismatch(symbolic.dim, n, "symbolic analysis"));
        }
        // Column access to A.
        let at = m.transpose();
        let (a_ptr, a_idx, a_val) = (at.row_ptr(), at.col_idx(), at.values());
        let q = &symbolic.column_order;

        let guess = 4 * m.nnz() + n;
        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx: Vec<usize> = Vec::with_capacity(guess);
        let mut l_val: Vec<Complex64> = Vec::with_capacity(guess);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut u_idx: Vec<usize> = Vec::with_capacity(guess);
        let mut u_val: Vec<Complex64> = Vec::with_capacity(guess);

        const UNSET: usize = usize::MAX;
        let mut pinv = vec![UNSET; n];
        let mut x = vec![Complex64::default(); n];
        let mut mark = vec![UNSET; n];
        let mut reach: Vec<usize> = Vec::with_capacity(n);
        let mut stack: Vec<(usize, usize)> = Vec::with_capacity(n);

        let max_entry = m.max_abs();
        let mut min_pivot = f64::INFINITY;
        let mut near_singular_step = None;

        for k in 0..n {
            l_ptr.push(l_idx.len());
            u_ptr.push(u_idx.len());
            let col = q[k];
            let rows = &a_idx[a_ptr[col]..a_ptr[col + 1]];

            // Reach of the column pattern in the graph of L, in reverse topological order.
            reach.clear();
            for &start in rows {
                if mark[start] == k {
                    continue;
                }
                mark[start] = k;
                stack.push((start, 0));
                while let Some(&(node, cursor)) = stack.last() {
                    let j = pinv[node];
                    // Children are the off-diagonal rows of L(:, j); the unit diagonal is stored first.
                    let children = if j == UNSET { &[][..] } else { &l_idx[l_ptr[j] + 1..l_ptr[j + 1]] };
                    let next = children[cursor.min(children.len())..]
                        .iter()
                        .position(|&c| mark[c] != k)
                        .map(|off| cursor + off);
                    match next {
                        Some(pos) => {
                            let child = children[pos];
                            let top = stack.len() - 1;
                            stack[top].1 = pos + 1;
                            mark[child] = k;
                            stack.push((child, 0));
                        }
                        None => {
                            stack.pop();
                            reach.push(node);
                        }
                    }
                }
            }

            for &i in &reach {
                x[i] = Complex64::default();
            }
            for p in a_ptr[col]..a_ptr[col + 1] {
                x[a_idx[p]] = a_val[p];
            }
            for &node in reach.iter().rev() {
                let j = pinv[node];
                if j == UNSET {
                    continue;
                }
                let xj = x[node];
                if xj == Complex64::default() {
                    continue;
                }
                for p in l_ptr[j] + 1..l_ptr[j + 1] {
                    x[l_idx[p]] -= l_val[p] * xj;
                }
            }

            let mut pivot_row = UNSET;
            let mut best = -1.0f64;
            for &i in reach.iter().rev() {
                if pinv[i] == UNSET {
                    let a = x[i].norm();
                    if a > best {
                        best = a;
                        pivot_row = i;
                    }
                } else {
                    u_idx.push(pinv[i]);
                    u_val.push(x[i]);
                }
            }
            if pivot_row == UNSET || best <= 0.0 {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if pinv[col] == UNSET && x[col].norm() >= PIVOT_THRESHOLD * best {
                pivot_row = col;
            }
            let pivot = x[pivot_row];
            let magnitude = pivot.norm();
            if magnitude < min_pivot {
                min_pivot = magnitude;
            }
            if magnitude < NEAR_SINGULAR_RATIO * max_entry && near_singular_step.is_none() {
                near_singular_step = Some(k);
                log::warn!("near-singular pivot {magnitude:.3e} at elimination step {k}");
            }
            u_idx.push(k);
            u_val.push(pivot);
            pinv[pivot_row] = k;
            l_idx.push(pivot_row);
            l_val.push(Complex64::new(1.0, 0.0));
            let inv = pivot.inv();
            for &i in reach.iter().rev() {
                if pinv[i] == UNSET && x[i] != Complex64::default() {
                    l_idx.push(i);
                    l_val.push(x[i] * inv);
                }
            }
        }
        l_ptr.push(l_idx.len());
        u_ptr.push(u_idx.len());
        for i in &mut l_idx {
            *i = pinv[*i];
        }
        let mut row_perm = vec![0; n];
        for (row, &step) in pinv.iter().enumerate() {
            row_perm[step] = row;
        }

        let stats = FillStats { dim: n, nnz_matrix: m.nnz(), nnz_lower: l_idx.len(), nnz_upper: u_idx.len() };
        Ok(Self {
            dim: n,
            factors: Factors::Sparse(SparseFactors {
                row_perm,
                col_perm: q.clone(),
                l_ptr,
                l_idx,
                l_val,
                u_ptr,
                u_idx,
                u_val,
            }),
            stats,
            min_pivot: if n == 0 { 0.0 } else { min_pivot },
            max_entry,
            near_singular_step,
        })
    }

    pub fn dense(m: &ComplexSparseMatrix) -> Result<Self> {
        let n = m.dim();
        let mut a = m.to_dense();
        let max_entry = m.max_abs();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut near_singular_step = None;
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].norm());
            for i in k + 1..n {
                let v = a[i * n + k].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 0.0 {
                return Err(Error::SingularMatrix { pivot: k });
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                row_perm.swap(k, p);
            }
            min_pivot = min_pivot.min(best);
            if best < NEAR_SINGULAR_RATIO * max_entry && near_singular_step.is_none() {
                near_singular_step = Some(k);
                log::warn!("near-singular pivot {best:.3e} at elimination step {k}");
            }
            let inv = a[k * n + k].inv();
            for i in k + 1..n {
                let factor = a[i * n + k] * inv;
                a[i * n + k] = factor;
                if factor != Complex64::default() {
                    for j in k + 1..n {
                        let ukj = a[k * n + j];
                        a[i * n + j] -= factor * ukj;
                    }
                }
            }
        }
        let count = |lower: bool| {
            (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|&(i, j)| if lower { j < i } else { j >= i })
                .filter(|&(i, j)| a[i * n + j] != Complex64::default())
                .count()
        };
        let stats = FillStats { dim: n, nnz_matrix: m.nnz(), nnz_lower: count(true) + n, nnz_upper: count(false) };
        Ok(Self {
            dim: n,
            factors: Factors::Dense(DenseFactors { lu: a, row_perm }),
            stats,
            min_pivot: if n == 0 { 0.0 } else { min_pivot },
            max_entry,
            near_singular_step,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stats(&self) -> FillStats {
        self.stats
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.factors, Factors::Sparse(_))
    }

    /// Smallest pivot magnitude and largest matrix entry magnitude.
    pub fn pivot_range(&self) -> (f64, f64) {
        (self.min_pivot, self.max_entry)
    }

    /// First elimination step whose pivot fell below the near-singularity ratio.
    pub fn near_singular_step(&self) -> Option<usize> {
        self.near_singular_step
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut x = b.to_vec();
        let mut work = vec![Complex64::default(); self.dim];
        self.solve_in_place(&mut x, &mut work)?;
        Ok(x)
    }

    /// Overwrites `rhs` with the solution; `work` is caller-owned scratch of
    /// the same length so concurrent solves need no allocation.
    pub fn solve_in_place(&self, rhs: &mut [Complex64], work: &mut [Complex64]) -> Result<()> {
        let n = self.dim;
        if rhs.len() != n {
            return Err(Error::mismatch(n, rhs.len(), "right-hand side"));
        }
        if work.len() != n {
            return Err(Error::mismatch(n, work.len(), "solve workspace"));
        }
        match &self.factors {
            Factors::Sparse(f) => {
                for k in 0..n {
                    work[k] = rhs[f.row_perm[k]];
                }
                for j in 0..n {
                    let xj = work[j];
                    if xj != Complex64::default() {
                        for p in f.l_ptr[j] + 1..f.l_ptr[j + 1] {
                            work[f.l_idx[p]] -= f.l_val[p] * xj;
                        }
                    }
                }
                for j in (0..n).rev() {
                    let last = f.u_ptr[j + 1] - 1;
                    work[j] /= f.u_val[last];
                    let xj = work[j];
                    if xj != Complex64::default() {
                        for p in f.u_ptr[j]..last {
                            work[f.u_idx[p]] -= f.u_val[p] * xj;
                        }
                    }
                }
                for k in 0..n {
                    rhs[f.col_perm[k]] = work[k];
                }
            }
            Factors::Dense(f) => {
                let a = &f.lu;
                for k in 0..n {
                    work[k] = rhs[f.row_perm[k]];
                }
                for i in 0..n {
                    let mut s = work[i];
                    for j in 0..i {
                        s -= a[i * n + j] * work[j];
                    }
                    work[i] = s;
                }
                for i in (0..n).rev() {
                    let mut s = work[i];
                    for j in i + 1..n {
                        s -= a[i * n + j] * work[j];
                    }
                    work[i] = s / a[i * n + i];
                }
                rhs.copy_from_slice(work);
            }
        }
        Ok(())
    }

    /// Dense `(P, L, U, Q)` reconstruction for small-matrix checks:
    /// returns `L·U` as a row-major matrix in the permuted coordinates together
    /// with the row and column permutations.
    pub fn reconstruct(&self) -> (Vec<Complex64>, Vec<usize>, Vec<usize>) {
        let n = self.dim;
        let mut l = vec![Complex64::default(); n * n];
        let mut u = vec![Complex64::default(); n * n];
        let (rows, cols) = match &self.factors {
            Factors::Sparse(f) => {
                for j in 0..n {
                    for p in f.l_ptr[j]..f.l_ptr[j + 1] {
                        l[f.l_idx[p] * n + j] = f.l_val[p];
                    }
                    for p in f.u_ptr[j]..f.u_ptr[j + 1] {
                        u[f.u_idx[p] * n + j] = f.u_val[p];
                    }
                }
                (f.row_perm.clone(), f.col_perm.clone())
            }
            Factors::Dense(f) => {
                for i in 0..n {
                    l[i * n + i] = Complex64::new(1.0, 0.0);
                    for j in 0..n {
                        if j < i {
                            l[i * n + j] = f.lu[i * n + j];
                        } else {
                            u[i * n + j] = f.lu[i * n + j];
                        }
                    }
                }
                (f.row_perm.clone(), (0..n).collect())
            }
        };
        let mut lu = vec![Complex64::default(); n * n];
        for i in 0..n {
            for k in 0..n {
                let lik = l[i * n + k];
                if lik != Complex64::default() {
                    for j in 0..n {
                        lu[i * n + j] += lik * u[k * n + j];
                    }
                }
            }
        }
        (lu, rows, cols)
    }
}

/// `‖M x − b‖₂ / max(‖b‖₂, 1e-300)`.
pub fn residual_norm(m: &ComplexSparseMatrix, x: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if b.len() != m.dim() {
        return Err(Error::mismatch(m.dim(), b.len(), "residual right-hand side"));
    }
    let mx = m.mul_vec(x)?;
    let r: f64 = mx.iter().zip(b).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    Ok(r / nb.max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_matrix(n: usize) -> ComplexSparseMatrix {
        // Banded, nonsymmetric values, needs pivoting (small diagonal).
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(1e-3 * (i as f64 + 1.0), 0.5)));
            if i + 1 < n {
                t.push((i, i + 1, c(2.0, -1.0)));
                t.push((i + 1, i, c(-1.5, 0.25 * i as f64)));
            }
            if i + 3 < n {
                t.push((i + 3, i, c(0.7, 0.0)));
            }
        }
        ComplexSparseMatrix::from_triplets(n, t).unwrap()
    }

    #[test]
    fn identity_has_no_fill() {
        for method in [LuMethod::Sparse, LuMethod::Dense] {
            let f = lu_factorize_with(&ComplexSparseMatrix::identity(7), method).unwrap();
            assert_eq!(f.stats().nnz_lower, 7);
            assert_eq!(f.stats().nnz_upper, 7);
            assert_eq!(f.stats().fill_in(), 0);
        }
    }

    #[test]
    fn diagonal_solve_is_exact() {
        let m = ComplexSparseMatrix::from_triplets(5, (0..5).map(|i| (i, i, c(2.0, 0.0)))).unwrap();
        for method in [LuMethod::Sparse, LuMethod::Dense] {
            let f = lu_factorize_with(&m, method).unwrap();
            let x = f.solve(&vec![c(1.0, 0.0); 5]).unwrap();
            assert!(x.iter().all(|&v| v == c(0.5, 0.0)));
        }
    }

    #[test]
    fn sparse_and_dense_paths_agree() {
        let m = sample_matrix(40);
        let b: Vec<Complex64> = (0..40).map(|i| c((i as f64).sin(), 1.0)).collect();
        let xs = lu_factorize_with(&m, LuMethod::Sparse).unwrap().solve(&b).unwrap();
        let xd = lu_factorize_with(&m, LuMethod::Dense).unwrap().solve(&b).unwrap();
        assert!(residual_norm(&m, &xs, &b).unwrap() < 1e-12);
        for (a, b) in xs.iter().zip(&xd) {
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn reconstruction_matches_permuted_matrix() {
        let m = sample_matrix(12);
        let dense = m.to_dense();
        for method in [LuMethod::Sparse, LuMethod::Dense] {
            let f = lu_factorize_with(&m, method).unwrap();
            let (lu, rows, cols) = f.reconstruct();
            let mut err = 0.0f64;
            let mut norm = 0.0f64;
            for i in 0..12 {
                for j in 0..12 {
                    let a = dense[rows[i] * 12 + cols[j]];
                    err += (lu[i * 12 + j] - a).norm_sqr();
                    norm += a.norm_sqr();
                }
            }
            assert!(err.sqrt() <= 1e-10 * norm.sqrt());
        }
    }

    #[test]
    fn zero_column_reports_pivot() {
        let m =
            ComplexSparseMatrix::from_triplets(3, vec![(0, 0, c(1.0, 0.0)), (1, 0, c(1.0, 0.0)), (2, 2, c(1.0, 0.0))])
                .unwrap();
        for method in [LuMethod::Sparse, LuMethod::Dense] {
            let err = lu_factorize_with(&m, method).unwrap_err();
            assert!(matches!(err, Error::SingularMatrix { .. }), "{err}");
        }
    }

    #[test]
    fn dependent_rows_are_singular() {
        let m = ComplexSparseMatrix::from_dense(2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]).unwrap();
        let err = lu_factorize_with(&m, LuMethod::Sparse).unwrap_err();
        assert!(matches!(err, Error::SingularMatrix { pivot: 1 }));
    }

    #[test]
    fn tiny_pivot_sets_warning() {
        let m = ComplexSparseMatrix::from_triplets(2, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(1e-20, 0.0))]).unwrap();
        let f = lu_factorize_with(&m, LuMethod::Sparse).unwrap();
        assert_eq!(f.near_singular_step(), Some(1));
    }

    #[test]
    fn residual_edge_cases() {
        let m = sample_matrix(6);
        let b = vec![c(1.0, 1.0); 6];
        let zero = vec![Complex64::default(); 6];
        assert!((residual_norm(&m, &zero, &b).unwrap() - 1.0).abs() < 1e-15);
        let x = lu_factorize(&m).unwrap().solve(&b).unwrap();
        assert!(residual_norm(&m, &x, &b).unwrap() <= 1e-10);
        assert!(lu_factorize(&m).unwrap().solve(&b[..3]).is_err());
    }

    #[test]
    fn repeated_factorization_is_bitwise_identical() {
        let m = sample_matrix(60);
        let s = SymbolicAnalysis::new(&m);
        let b: Vec<Complex64> = (0..60).map(|i| c(1.0, i as f64)).collect();
        let x1 = LuFactors::sparse(&s, &m).unwrap().solve(&b).unwrap();
        let x2 = LuFactors::sparse(&s, &m).unwrap().solve(&b).unwrap();
        assert_eq!(x1, x2);
    }
}
