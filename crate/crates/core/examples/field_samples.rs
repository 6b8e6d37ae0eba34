//! Draw realizations of the random field on element centroids and write
//! them as CSV.
//!
//! `cargo run --example field_samples -- 20 3`

use std::fs::File;
use std::io::{BufWriter, Write};

use elastic_mcdg::mesh::Mesh;
use elastic_mcdg::random_field::{build_sampler, CovarianceSpec, EtaBound, Truncation};

fn main() -> elastic_mcdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let count: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let seed = 7;

    let mesh = Mesh::uniform(n)?;
    let sampler = build_sampler(&mesh, CovarianceSpec::exponential(0.5)?, Truncation::Auto)?;
    let ev = sampler.eigenvalues();
    println!(
        "{} points, rank {} (largest eigenvalue {:.3}, smallest kept {:.3e})",
        sampler.len(),
        sampler.rank(),
        ev[0],
        ev[sampler.rank() - 1]
    );

    for index in 0..count {
        let raw = sampler.draw_raw(seed, index);
        let clipped = raw.iter().filter(|v| v.abs() > 1.0).count();
        let eta = sampler.draw_eta_with(seed, index, EtaBound::Rescale);
        let path = format!("eta_{index}.csv");
        let mut w = BufWriter::new(File::create(&path)?);
        eta.write_csv(&mut w)?;
        w.flush()?;
        println!("{path}: {clipped} of {} raw values outside [-1, 1]", raw.len());
    }
    Ok(())
}
