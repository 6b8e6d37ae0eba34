//! Factorize once, then solve for many right-hand sides. This is what makes
//! the multi-modes driver cheap.

use std::time::Instant;

use elastic_mcdg::dg::{assemble_load_per_element, assemble_system, DgSpace, PhysicalParams};
use elastic_mcdg::linalg::{LuFactors, SymbolicAnalysis};
use elastic_mcdg::source::oscillatory_source;

fn main() -> elastic_mcdg::Result<()> {
    let space = DgSpace::uniform(20)?;
    let k = 10.0;
    let m = assemble_system(&space, &PhysicalParams::standard(k)?, None)?;

    let t = Instant::now();
    let symbolic = SymbolicAnalysis::new(&m);
    let ordering = t.elapsed();
    let t = Instant::now();
    let lu = LuFactors::sparse(&symbolic, &m)?;
    let factor = t.elapsed();
    let stats = lu.stats();
    let (lo, hi) = lu.pivot_range();
    println!("ordering {ordering:?}, factorization {factor:?}");
    println!(
        "nnz(A) {} nnz(L) {} nnz(U) {} fill {}",
        stats.nnz_matrix,
        stats.nnz_lower,
        stats.nnz_upper,
        stats.fill_in()
    );
    println!("pivot magnitudes in [{lo:.3e}, {hi:.3e}]");

    let rhs: Vec<_> = (0..50)
        .map(|j| {
            let kappa = k * (1.0 + 0.01 * j as f64);
            assemble_load_per_element(&space, |_, x| oscillatory_source(kappa, x), 4)
        })
        .collect::<Result<_, _>>()?;
    let t = Instant::now();
    for b in &rhs {
        lu.solve(b)?;
    }
    println!("{} solves in {:?} ({:?} each)", rhs.len(), t.elapsed(), t.elapsed() / rhs.len() as u32);
    Ok(())
}
