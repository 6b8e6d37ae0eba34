//! Convergence against a smooth manufactured solution.
//!
//! `cargo run --release --example mms_convergence`

use elastic_mcdg::dg::{DgSpace, PhysicalParams};
use elastic_mcdg::experiments::log_log_slope;
use elastic_mcdg::manufactured::{solve_manufactured, TrigSolution};

fn main() -> elastic_mcdg::Result<()> {
    let params = PhysicalParams::standard(5.0)?;
    let exact = TrigSolution::default();
    let (mut hs, mut l2, mut energy) = (Vec::new(), Vec::new(), Vec::new());
    println!("{:>4} {:>12} {:>12}", "n", "L2", "energy");
    for n in [8, 16, 32, 64] {
        let run = solve_manufactured(&DgSpace::uniform(n)?, &params, &exact, 6)?;
        println!("{n:>4} {:>12.4e} {:>12.4e}", run.l2_error, run.energy_error);
        hs.push(1.0 / n as f64);
        l2.push(run.l2_error);
        energy.push(run.energy_error);
    }
    println!("fitted rates: L2 {:.3}, energy {:.3}", log_log_slope(&hs, &l2), log_log_slope(&hs, &energy));
    Ok(())
}
