mod common;

use common::*;
use elastic_mcdg::dg::{assemble_system, DgSpace, PhysicalParams};
use elastic_mcdg::linalg::{
    lu_factorize, lu_factorize_with, read_matrix_market, residual_norm, write_matrix_market, ComplexSparseMatrix,
    LuFactors, LuMethod, SymbolicAnalysis,
};
use elastic_mcdg::Error;
use proptest::prelude::*;

fn dg_matrix(n: usize, k: f64) -> ComplexSparseMatrix {
    let space = DgSpace::uniform(n).unwrap();
    assemble_system(&space, &PhysicalParams::standard(k).unwrap(), None).unwrap()
}

fn dense_rows(m: &ComplexSparseMatrix) -> Vec<Vec<C>> {
    let d = m.to_dense();
    d.chunks(m.dim()).map(|r| r.to_vec()).collect()
}

fn rhs(n: usize) -> Vec<C> {
    (0..n).map(|i| c((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect()
}

#[test]
fn sparse_and_dense_paths_agree_with_elimination() {
    let m = dg_matrix(4, 6.0);
    let b = rhs(m.dim());
    let oracle = dense_solve(&dense_rows(&m), &b);
    let scale = oracle.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    for method in [LuMethod::Sparse, LuMethod::Dense, LuMethod::Auto] {
        let f = lu_factorize_with(&m, method).unwrap();
        let x = f.solve(&b).unwrap();
        let err = x.iter().zip(&oracle).fold(0.0f64, |a, (p, q)| a.max((p - q).norm()));
        assert!(err < 1e-10 * scale, "{method:?}: {err:e}");
    }
}

#[test]
fn factors_reconstruct_the_permuted_matrix() {
    let m = dg_matrix(3, 4.0);
    let f = LuFactors::sparse(&SymbolicAnalysis::new(&m), &m).unwrap();
    let (lu, rows, cols) = f.reconstruct();
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let d = lu[i * n + j] - m.get(rows[i], cols[j]);
            assert!(d.norm() < 1e-11 * m.max_abs(), "({i}, {j})");
        }
    }
    let stats = f.stats();
    assert_eq!(stats.dim, n);
    assert_eq!(stats.nnz_matrix, m.nnz());
}

#[test]
fn one_factorization_serves_many_right_hand_sides() {
    let m = dg_matrix(5, 8.0);
    let f = lu_factorize(&m).unwrap();
    for s in 0..5 {
        let b: Vec<C> = rhs(m.dim()).iter().map(|v| v * c(1.0 + s as f64, -(s as f64))).collect();
        let x = f.solve(&b).unwrap();
        let scale = b.iter().fold(0.0f64, |a, v| a.max(v.norm()));
        assert!(residual_norm(&m, &x, &b).unwrap() < 1e-10 * scale);
    }
}

#[test]
fn singular_matrices_are_reported() {
    let m = ComplexSparseMatrix::from_triplets(3, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(2.0, 0.0))]).unwrap();
    for method in [LuMethod::Sparse, LuMethod::Dense] {
        match lu_factorize_with(&m, method) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("{method:?}: {other:?}"),
        }
    }
}

#[test]
fn solve_checks_dimensions() {
    let f = lu_factorize(&ComplexSparseMatrix::identity(4)).unwrap();
    assert!(f.solve(&[c(1.0, 0.0); 3]).is_err());
}

#[test]
fn matrix_market_round_trip_is_exact() {
    let m = dg_matrix(3, 5.0);
    let mut buf = Vec::new();
    write_matrix_market(&m, &mut buf).unwrap();
    let back = read_matrix_market(buf.as_slice()).unwrap();
    assert_eq!(back.dim(), m.dim());
    assert_eq!(back.to_dense(), m.to_dense());
}

#[test]
fn matrix_market_rejects_bad_input() {
    for text in [
        "",
        "%%MatrixMarket matrix array complex general\n1 1\n1 0\n",
        "%%MatrixMarket matrix coordinate complex general\n2 3 0\n",
        "%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1 0\n",
        "%%MatrixMarket matrix coordinate complex general\n2 2 1\n1 1 x 0\n",
    ] {
        assert!(read_matrix_market(text.as_bytes()).is_err(), "{text:?}");
    }
    let sym = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 1 -1\n";
    let m = read_matrix_market(sym.as_bytes()).unwrap();
    assert_eq!(m.get(0, 1), c(-1.0, 0.0));
    assert_eq!(m.get(1, 0), c(-1.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_sparse_systems_solve(n in 2usize..40, seed in any::<u64>(), density in 0.05f64..0.5) {
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, c(n as f64 * 0.5 + next(), next())));
            for j in 0..n {
                if i != j && next() < density {
                    t.push((i, j, c(next() - 0.5, next() - 0.5)));
                }
            }
        }
        let m = ComplexSparseMatrix::from_triplets(n, t).unwrap();
        let b = rhs(n);
        let oracle = dense_solve(&dense_rows(&m), &b);
        for method in [LuMethod::Sparse, LuMethod::Dense] {
            let x = lu_factorize_with(&m, method).unwrap().solve(&b).unwrap();
            for (p, q) in x.iter().zip(&oracle) {
                prop_assert!((p - q).norm() < 1e-10 * (1.0 + q.norm()));
            }
        }
    }

    #[test]
    fn ordering_is_a_permutation(n in 1usize..5) {
        let m = dg_matrix(n, 3.0);
        let mut order = SymbolicAnalysis::new(&m).column_order().to_vec();
        order.sort_unstable();
        prop_assert_eq!(order, (0..m.dim()).collect::<Vec<_>>());
    }
}
