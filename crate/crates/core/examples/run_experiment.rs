//! Drive an experiment from a config file, as the command-line tool does.
//!
//! `cargo run --release --example run_experiment -- decay my.cfg`

use std::path::Path;

use elastic_mcdg::experiments::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> elastic_mcdg::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind: ExperimentKind =
        args.next().unwrap_or_else(|| "decay".into()).parse().map_err(elastic_mcdg::Error::InvalidParameter)?;
    let mut config = match args.next() {
        Some(path) => ExperimentConfig::from_file(Path::new(&path), Some(kind))?,
        None => {
            let mut c = ExperimentConfig::defaults(kind);
            c.samples = 50;
            c
        }
    };
    config.out = Path::new("runs").join(kind.name());
    print!("{}", config.render());
    let report = run_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    Ok(())
}
