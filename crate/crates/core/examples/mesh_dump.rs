//! Build a uniform mesh and write its vertices, triangles and edges.
//!
//! `cargo run --example mesh_dump -- 4 mesh.txt`

use std::fs::File;
use std::io::{self, BufWriter, Write};

use elastic_mcdg::mesh::Mesh;

fn main() -> elastic_mcdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let mesh = Mesh::uniform(n)?;
    eprintln!(
        "h = {}, {} vertices, {} triangles, {} edges ({} on the boundary)",
        mesh.h(),
        mesh.vertices().len(),
        mesh.num_elements(),
        mesh.edges().len(),
        mesh.boundary_edges().count()
    );
    match args.next() {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            mesh.write_dump(&mut w)?;
            w.flush()?;
        }
        None => mesh.write_dump(io::stdout().lock())?,
    }
    Ok(())
}
