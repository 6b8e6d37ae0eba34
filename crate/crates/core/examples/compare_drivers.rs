//! Run the classical and multi-modes Monte Carlo drivers on the same samples
//! and compare their means and costs.
//!
//! `cargo run --release --example compare_drivers -- 0.1 100`

use elastic_mcdg::dg::{DgSpace, PhysicalParams};
use elastic_mcdg::engines::{relative_l2_error, run_classical, run_multimodes, McConfig};
use elastic_mcdg::random_field::{build_sampler, CovarianceSpec, Truncation};

fn main() -> elastic_mcdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let samples: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let space = DgSpace::uniform(20)?;
    let sampler = build_sampler(space.mesh(), CovarianceSpec::exponential(0.5)?, Truncation::Auto)?;
    let mut config = McConfig::new(PhysicalParams::standard(10.0)?);
    config.epsilon = eps;
    config.samples = samples;
    config.modes = 5;

    let multi = run_multimodes(&space, &sampler, &config)?;
    let classical = run_classical(&space, &sampler, &config)?;
    for (n, mean) in multi.partial_means.iter().enumerate() {
        println!("N = {}: relative error {:.4e}", n + 1, relative_l2_error(&space, mean, &classical.psi)?);
    }
    for (name, r) in [("classical", &classical), ("multi-modes", &multi)] {
        println!(
            "{name:>12}: {:.2} s total, {} factorizations, {} solves",
            r.timings.total, r.counters.factorizations, r.counters.solves
        );
    }
    println!("speedup {:.1}", classical.timings.total / multi.timings.total);
    Ok(())
}
