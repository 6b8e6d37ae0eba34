mod common;

use common::*;
use elastic_mcdg::dg::{assemble_load_per_element, assemble_system, l2_norm, DgSpace, PhysicalParams};
use elastic_mcdg::engines::{
    mode_solve_sequence, relative_l2_error, run_classical, run_multimodes, sample_modes, EtaStream, McConfig,
    SourceKind,
};
use elastic_mcdg::linalg::lu_factorize;
use elastic_mcdg::random_field::{build_sampler, CovarianceSpec, EtaBound, FieldSampler, Truncation};
use elastic_mcdg::source::oscillatory_source;
use elastic_mcdg::Error;
use proptest::prelude::*;

fn setup(n: usize) -> (DgSpace, FieldSampler) {
    let space = DgSpace::uniform(n).unwrap();
    let sampler = build_sampler(space.mesh(), CovarianceSpec::exponential(0.5).unwrap(), Truncation::Full).unwrap();
    (space, sampler)
}

fn config(k: f64, samples: usize, modes: usize, eps: f64) -> McConfig {
    let mut c = McConfig::new(PhysicalParams::standard(k).unwrap());
    c.samples = samples;
    c.modes = modes;
    c.epsilon = eps;
    c
}

fn unit_load(space: &DgSpace, k: f64) -> Vec<C> {
    assemble_load_per_element(space, |_, x| oscillatory_source(k, x), 4).unwrap().into_vec()
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (p, q)| m.max((p - q).norm()))
}

#[test]
fn mode_chain_matches_dense_oracle() {
    let (space, sampler) = setup(3);
    let k = 4.0;
    let params = PhysicalParams::standard(k).unwrap();
    let eta = sampler.draw_eta(2, 5).values;
    let f = unit_load(&space, k);
    let factors = lu_factorize(&assemble_system(&space, &params, None).unwrap()).unwrap();
    let seq = mode_solve_sequence(&factors, &space, &params, &eta, &f, 4, 0.1).unwrap();

    let m0 = oracle_matrix(space.mesh(), &Material::standard(k), None, false);
    let zero = vec![C::default(); f.len()];
    let mut modes: Vec<Vec<C>> = vec![dense_solve(&m0, &f)];
    for n in 1..4 {
        let prev2 = if n >= 2 { modes[n - 2].clone() } else { zero.clone() };
        let load = oracle_mode_load(space.mesh(), &eta, &modes[n - 1], &prev2, k);
        modes.push(dense_solve(&m0, &load));
    }
    for (n, (lib, oracle)) in seq.modes.iter().zip(&modes).enumerate() {
        let scale = oracle.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        assert!(max_diff(lib, oracle) < 1e-10 * scale, "mode {n}");
    }
    let sums = seq.partial_sums(0.1);
    assert_eq!(sums.len(), 4);
    assert!(max_diff(&sums[3], &seq.u_sum) < 1e-15);
}

#[test]
fn truncated_expansion_approaches_the_perturbed_solve() {
    // Per sample, U_N differs from the solution of the perturbed operator by
    // O(ε^N). Halving ε should shrink the gap by about 2^N.
    let (space, sampler) = setup(4);
    let k = 3.0;
    let params = PhysicalParams::standard(k).unwrap();
    let eta = sampler.draw_eta(1, 0).values;
    let f = unit_load(&space, k);
    let factors = lu_factorize(&assemble_system(&space, &params, None).unwrap()).unwrap();
    let gap = |eps: f64, modes: usize| {
        let alpha: Vec<f64> = eta.iter().map(|e| 1.0 + eps * e).collect();
        let exact = dense_solve(&oracle_matrix(space.mesh(), &Material::standard(k), Some(&alpha), false), &f);
        let seq = mode_solve_sequence(&factors, &space, &params, &eta, &f, modes, eps).unwrap();
        let diff: Vec<C> = seq.u_sum.iter().zip(&exact).map(|(a, b)| a - b).collect();
        oracle_l2_norm(space.mesh(), &diff) / oracle_l2_norm(space.mesh(), &exact)
    };
    for modes in 1..=3 {
        let ratio = gap(0.04, modes) / gap(0.02, modes);
        let expected = 2f64.powi(modes as i32);
        assert!(ratio > 0.7 * expected && ratio < 1.4 * expected, "N = {modes}: ratio {ratio}");
    }
}

#[test]
fn zero_field_gives_vanishing_higher_modes() {
    let (space, sampler) = setup(4);
    let mut c = config(5.0, 3, 4, 0.2);
    c.eta = EtaStream::Zero;
    let (_, seq) = sample_modes(&space, &sampler, &c, 0).unwrap();
    for u in &seq.modes[1..] {
        assert!(l2_norm(&space, u).unwrap() <= 1e-13);
    }
    assert!(l2_norm(&space, &seq.modes[0]).unwrap() > 1e-3);
}

#[test]
fn counters_are_exact() {
    let (space, sampler) = setup(3);
    let c = config(3.0, 7, 3, 0.05);
    let multi = run_multimodes(&space, &sampler, &c).unwrap();
    assert_eq!((multi.counters.assemblies, multi.counters.factorizations, multi.counters.solves), (1, 1, 21));
    let classical = run_classical(&space, &sampler, &c).unwrap();
    assert_eq!(
        (classical.counters.assemblies, classical.counters.factorizations, classical.counters.solves),
        (7, 7, 7)
    );
    assert_eq!(multi.partial_means.len(), 3);
    assert_eq!(classical.partial_means.len(), 1);
}

#[test]
fn single_sample_run_matches_sample_modes() {
    let (space, sampler) = setup(3);
    let mut c = config(3.0, 1, 3, 0.1);
    c.base_seed = 17;
    let run = run_multimodes(&space, &sampler, &c).unwrap();
    let (_, seq) = sample_modes(&space, &sampler, &c, 0).unwrap();
    assert!(max_diff(&run.psi, &seq.u_sum) < 1e-14);
}

#[test]
fn shared_samples_make_the_gap_small() {
    let (space, sampler) = setup(4);
    let c = config(3.0, 12, 4, 0.05);
    let multi = run_multimodes(&space, &sampler, &c).unwrap();
    let classical = run_classical(&space, &sampler, &c).unwrap();
    let errs: Vec<f64> =
        multi.partial_means.iter().map(|p| relative_l2_error(&space, p, &classical.psi).unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(errs[3] < 1e-5, "{errs:?}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (space, sampler) = setup(4);
    let c = config(4.0, 70, 3, 0.1);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| (run_multimodes(&space, &sampler, &c).unwrap(), run_classical(&space, &sampler, &c).unwrap()))
    };
    let (m1, c1) = run(1);
    for threads in [2, 5] {
        let (m, cl) = run(threads);
        assert_eq!(m.psi, m1.psi);
        assert_eq!(m.partial_means, m1.partial_means);
        assert_eq!(cl.psi, c1.psi);
    }
}

#[test]
fn retained_samples_average_to_the_mean() {
    let (space, sampler) = setup(3);
    let mut c = config(3.0, 5, 2, 0.1);
    c.retain_samples = true;
    let r = run_multimodes(&space, &sampler, &c).unwrap();
    let samples = r.samples.as_ref().unwrap();
    assert_eq!(samples.len(), 5);
    let mut mean = vec![C::default(); space.num_dofs()];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s.iter()) {
            *m += v / 5.0;
        }
    }
    assert!(max_diff(&mean, &r.psi) < 1e-14);
}

#[test]
fn invalid_configurations_are_rejected() {
    let (space, sampler) = setup(2);
    let mut bad = vec![config(3.0, 0, 2, 0.1), config(3.0, 2, 0, 0.1), config(3.0, 2, 2, -0.1)];
    let mut nan = config(3.0, 2, 2, 0.1);
    nan.epsilon = f64::NAN;
    bad.push(nan);
    for c in &bad {
        assert!(matches!(run_multimodes(&space, &sampler, c), Err(Error::InvalidParameter(_))));
    }
    let (wrong, _) = setup(3);
    assert!(run_multimodes(&wrong, &sampler, &config(3.0, 2, 2, 0.1)).is_err());
}

#[test]
fn large_perturbations_carry_a_warning() {
    let (space, sampler) = setup(2);
    let r = run_multimodes(&space, &sampler, &config(10.0, 2, 2, 0.5)).unwrap();
    assert_eq!(r.warnings.len(), 1);
    let r = run_multimodes(&space, &sampler, &config(1.0, 2, 2, 0.01)).unwrap();
    assert!(r.warnings.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn runs_are_reproducible(seed in any::<u64>(), eps in 0.0f64..0.3, source in 0usize..3, clamp in any::<bool>()) {
        let (space, sampler) = setup(3);
        let mut c = config(3.0, 4, 3, eps);
        c.base_seed = seed;
        c.source = [SourceKind::Oscillatory, SourceKind::OscillatoryUnit, SourceKind::Perturbed][source];
        c.eta_bound = if clamp { EtaBound::Clamp } else { EtaBound::Rescale };
        let a = run_multimodes(&space, &sampler, &c).unwrap();
        let b = run_multimodes(&space, &sampler, &c).unwrap();
        prop_assert_eq!(a.psi, b.psi);
        prop_assert!(a.partial_means.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn mode_loads_are_linear_in_the_previous_mode(scale in -3.0f64..3.0, seed in any::<u64>()) {
        let (space, sampler) = setup(2);
        let eta = sampler.draw_eta(seed, 0).values;
        let u: Vec<C> = (0..space.num_dofs()).map(|i| c((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let zero = vec![C::default(); u.len()];
        let su: Vec<C> = u.iter().map(|v| v * scale).collect();
        let a = elastic_mcdg::dg::assemble_load_mode(&space, &eta, &u, &zero, 2.0).unwrap();
        let b = elastic_mcdg::dg::assemble_load_mode(&space, &eta, &su, &zero, 2.0).unwrap();
        let oracle = oracle_mode_load(space.mesh(), &eta, &u, &zero, 2.0);
        for ((x, y), o) in a.iter().zip(b.iter()).zip(&oracle) {
            prop_assert!((x * scale - y).norm() < 1e-12);
            prop_assert!((x - o).norm() < 1e-12);
        }
    }
}
