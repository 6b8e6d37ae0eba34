//! Assemble the background system and write it as a Matrix Market file
//! together with the load vector as CSV, then read the matrix back.
//!
//! `cargo run --example export_system -- 8 out/`

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use elastic_mcdg::dg::{assemble_load_function, assemble_system, DgSpace, PhysicalParams};
use elastic_mcdg::linalg::{read_matrix_market, write_matrix_market};
use elastic_mcdg::source::oscillatory_source;

fn main() -> elastic_mcdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "system_export".into()));
    fs::create_dir_all(&dir)?;

    let k = 10.0;
    let space = DgSpace::uniform(n)?;
    let m = assemble_system(&space, &PhysicalParams::standard(k)?, None)?;
    let b = assemble_load_function(&space, |x| oscillatory_source(k, x), 4)?;

    let mtx = dir.join("system.mtx");
    let mut w = BufWriter::new(File::create(&mtx)?);
    write_matrix_market(&m, &mut w)?;
    w.flush()?;
    let mut w = BufWriter::new(File::create(dir.join("load.csv"))?);
    b.write_csv(&mut w)?;
    w.flush()?;

    let back = read_matrix_market(BufReader::new(File::open(&mtx)?))?;
    let same = back.to_dense() == m.to_dense();
    println!("{} unknowns, {} nonzeros, round trip exact: {same}", m.dim(), m.nnz());
    println!("wrote {} and load.csv", mtx.display());
    Ok(())
}
