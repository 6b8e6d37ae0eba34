//! Assemble and solve the deterministic problem with the oscillatory source.

use std::time::Instant;

use elastic_mcdg::dg::{assemble_load_function, assemble_system, l2_norm, DgSpace, PhysicalParams};
use elastic_mcdg::linalg::{lu_factorize, residual_norm};
use elastic_mcdg::source::oscillatory_source;

fn main() -> elastic_mcdg::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let k = 10.0;
    let space = DgSpace::uniform(n)?;
    let params = PhysicalParams::standard(k)?;

    let t = Instant::now();
    let m = assemble_system(&space, &params, None)?;
    let t_assemble = t.elapsed();
    let b = assemble_load_function(&space, |x| oscillatory_source(k, x), 4)?;

    let t = Instant::now();
    let lu = lu_factorize(&m)?;
    let t_factor = t.elapsed();
    let t = Instant::now();
    let u = lu.solve(&b)?;
    let t_solve = t.elapsed();

    let stats = lu.stats();
    println!("dofs {} nnz {} fill {}", m.dim(), m.nnz(), stats.fill_in());
    println!("assemble {t_assemble:?} factor {t_factor:?} solve {t_solve:?}");
    println!("residual {:.3e}", residual_norm(&m, &u, &b)?);
    println!("|u|_L2 {:.6e}", l2_norm(&space, &u)?);
    Ok(())
}
