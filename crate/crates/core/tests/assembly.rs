mod common;

use common::*;
use elastic_mcdg::dg::{assemble_system, assemble_system_with, BoundaryAlpha, DgSpace, PhysicalParams};
use elastic_mcdg::mesh::Mesh;
use nalgebra::Matrix2;
use proptest::prelude::*;

fn compare(n: usize, m: &Material, alpha: Option<&[f64]>, boundary: BoundaryAlpha) -> f64 {
    let space = DgSpace::uniform(n).unwrap();
    let params = PhysicalParams::new(
        m.k,
        m.mu,
        m.lambda,
        Matrix2::new(m.a[0][0], m.a[0][1], m.a[1][0], m.a[1][1]),
        m.gamma0,
        m.gamma1,
    )
    .unwrap();
    let lib = assemble_system_with(&space, &params, alpha, boundary).unwrap();
    let oracle = oracle_matrix(space.mesh(), m, alpha, boundary == BoundaryAlpha::Element);
    max_abs_diff_dense(&oracle, &lib.to_dense(), space.num_dofs()) / max_abs(&oracle).max(1.0)
}

#[test]
fn matches_oracle_on_one_and_two_cells() {
    for n in [1, 2] {
        let d = compare(n, &Material::standard(3.0), None, BoundaryAlpha::Unit);
        assert!(d <= 1e-12, "n = {n}: {d:e}");
    }
}

#[test]
fn matches_oracle_with_general_coefficients() {
    let m = Material { k: 7.5, mu: 0.7, lambda: 2.3, a: [[1.5, 0.25], [0.25, 0.8]], gamma0: 4.0, gamma1: 0.35 };
    let alpha: Vec<f64> = (0..18).map(|i| 1.0 + 0.05 * ((i * 7) % 5) as f64 - 0.1).collect();
    for boundary in [BoundaryAlpha::Unit, BoundaryAlpha::Element] {
        let d = compare(3, &m, Some(&alpha), boundary);
        assert!(d <= 1e-12, "{boundary:?}: {d:e}");
    }
}

#[test]
fn comparison_detects_single_term_changes() {
    let space = DgSpace::uniform(2).unwrap();
    let lib = assemble_system(&space, &PhysicalParams::standard(3.0).unwrap(), None).unwrap().to_dense();
    let nd = space.num_dofs();
    let mut tweaks = vec![Material::standard(3.0); 4];
    tweaks[0].gamma0 = 10.5;
    tweaks[1].gamma1 = 0.11;
    tweaks[2].k = 3.01;
    tweaks[3].lambda = 1.01;
    for m in &tweaks {
        let oracle = oracle_matrix(space.mesh(), m, None, false);
        assert!(max_abs_diff_dense(&oracle, &lib, nd) > 1e-4);
    }
}

#[test]
fn oracle_finds_the_same_edges() {
    for n in 1..5 {
        let mesh = Mesh::uniform(n).unwrap();
        let edges = oracle_edges(&mesh);
        assert_eq!(edges.len(), mesh.edges().len());
        let interior = edges.iter().filter(|e| e.elems.len() == 2).count();
        assert_eq!(interior, mesh.interior_edges().count());
    }
}

/// A function continuous across the mesh and affine on the whole domain has
/// zero jumps, so the edge penalty contributes nothing to the imaginary part
/// apart from the boundary term.
#[test]
fn penalty_vanishes_for_global_linears() {
    let space = DgSpace::uniform(4).unwrap();
    let mut p = PhysicalParams::standard(2.0).unwrap();
    let with = assemble_system(&space, &p, None).unwrap();
    p.gamma0 = 0.0;
    p.gamma1 = 0.0;
    let without = assemble_system(&space, &p, None).unwrap();
    let v: Vec<f64> = space
        .interpolate(|x| [c(0.3 * x.x - 1.1 * x.y + 0.2, 0.0), c(0.7 * x.y + 0.4 * x.x, 0.0)])
        .iter()
        .map(|z| z.re)
        .collect();
    let a = with.quadratic_form(&v).unwrap();
    let b = without.quadratic_form(&v).unwrap();
    assert!((a - b).norm() < 1e-12 * a.norm().max(1.0));
}

fn params_strategy() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64, f64)> {
    (0.5f64..20.0, 0.2f64..3.0, 0.0f64..3.0, 0.5f64..2.0, -0.3f64..0.3, 1.0f64..20.0, 0.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn complex_symmetric_with_nonnegative_imaginary_form(
        (k, mu, lambda, a11, a12, g0, g1) in params_strategy(),
        n in 1usize..5,
        seed in any::<u64>(),
    ) {
        let space = DgSpace::uniform(n).unwrap();
        let params = PhysicalParams::new(k, mu, lambda, Matrix2::new(a11, a12, a12, 1.0), g0, g1).unwrap();
        let m = assemble_system(&space, &params, None).unwrap();
        let d = m.to_dense();
        let nd = m.dim();
        let scale = m.max_abs();
        for i in 0..nd {
            for j in 0..i {
                prop_assert!((d[i * nd + j] - d[j * nd + i]).norm() <= 1e-13 * scale);
            }
        }
        // Deterministic pseudo-random real and complex test vectors.
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let v: Vec<f64> = (0..nd).map(|_| next()).collect();
        prop_assert!(m.quadratic_form(&v).unwrap().im >= -1e-12 * scale);
        let z: Vec<C> = (0..nd).map(|_| c(next(), next())).collect();
        let mz = m.mul_vec(&z).unwrap();
        let herm: C = z.iter().zip(&mz).map(|(a, b)| a.conj() * b).sum();
        prop_assert!(herm.im >= -1e-12 * scale);
    }

    #[test]
    fn assembly_is_linear_in_mass_weight(k in 0.5f64..10.0, n in 1usize..4) {
        // M(α) = M(1) − k²(α² − 1)·mass, so M(α) − M(1) scales with α² − 1.
        let space = DgSpace::uniform(n).unwrap();
        let params = PhysicalParams::standard(k).unwrap();
        let nel = space.num_elements();
        let base = assemble_system(&space, &params, None).unwrap().to_dense();
        let a2: Vec<f64> = vec![2f64.sqrt(); nel];
        let a3: Vec<f64> = vec![3f64.sqrt(); nel];
        let m2 = assemble_system(&space, &params, Some(&a2)).unwrap().to_dense();
        let m3 = assemble_system(&space, &params, Some(&a3)).unwrap().to_dense();
        for i in 0..base.len() {
            let d2 = m2[i] - base[i];
            let d3 = m3[i] - base[i];
            prop_assert!((d3 - d2 * 2.0).norm() <= 1e-10 * (1.0 + k * k));
        }
    }
}
