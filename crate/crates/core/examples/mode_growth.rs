//! Norms of the individual modes for one field realization. Their growth
//! rate decides for which perturbation sizes the expansion converges.

use elastic_mcdg::dg::{l2_norm, DgSpace, PhysicalParams};
use elastic_mcdg::engines::{sample_modes, McConfig};
use elastic_mcdg::random_field::{build_sampler, CovarianceSpec, Truncation};

fn main() -> elastic_mcdg::Result<()> {
    let k: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let space = DgSpace::uniform(20)?;
    let sampler = build_sampler(space.mesh(), CovarianceSpec::exponential(0.5)?, Truncation::Auto)?;
    let mut config = McConfig::new(PhysicalParams::standard(k)?);
    config.modes = 8;

    let (eta, seq) = sample_modes(&space, &sampler, &config, 0)?;
    println!("sample {} of seed {}", eta.index, eta.seed);
    let mut prev: Option<f64> = None;
    for (n, u) in seq.modes.iter().enumerate() {
        let norm = l2_norm(&space, u)?;
        match prev {
            Some(p) => println!("u_{n}: {norm:.4e} (x{:.2})", norm / p),
            None => println!("u_{n}: {norm:.4e}"),
        }
        prev = Some(norm);
    }
    Ok(())
}
