//! Reproducible experiment runs behind the command-line verbs.
//!
//! Each run writes its CSV tables, the canonical config (`config.txt`) and a
//! JSON report into the configured output directory. Numbers in the CSVs are
//! printed with a fixed format so that reruns with the same config and seed
//! give byte-identical files (timing tables excepted).

mod config;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::dg::{evaluate_field, DgSpace, DgVector};
use crate::engines::{relative_l2_error, run_classical, run_multimodes, sample_modes, Counters, McResult, Timings};
use crate::error::Result;
use crate::manufactured::{solve_manufactured, TrigSolution};
use crate::mesh::{Point, DOMAIN_MAX, DOMAIN_MIN};
use crate::random_field::{build_sampler, FieldSampler};

pub use config::{ExperimentConfig, ExperimentKind};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub config_file: String,
    pub files: Vec<String>,
    pub summary: Value,
    pub runs: Vec<RunRecord>,
    pub warnings: Vec<String>,
}

/// Cost record of one Monte Carlo run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub epsilon: f64,
    pub samples: usize,
    pub modes: usize,
    pub timings: Timings,
    pub counters: Counters,
}

impl RunRecord {
    fn new(label: &str, epsilon: f64, r: &McResult) -> Self {
        Self {
            label: label.into(),
            epsilon,
            samples: r.sample_count,
            modes: r.modes,
            timings: r.timings,
            counters: r.counters,
        }
    }
}

/// Runs the experiment selected by `config.kind`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunReport> {
    match config.kind {
        ExperimentKind::Decay => run_decay(config),
        ExperimentKind::EpsSweep => run_eps_sweep(config),
        ExperimentKind::Timing => run_timing(config),
        ExperimentKind::Convergence => run_convergence(config),
        ExperimentKind::FieldDemo => run_field_demo(config),
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

struct Output {
    dir: PathBuf,
    header: String,
    files: Vec<String>,
}

impl Output {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(&config.out)?;
        fs::write(config.out.join("config.txt"), config.render())?;
        Ok(Self {
            dir: config.out.clone(),
            header: format!(
                "# {TOOL_NAME} {TOOL_VERSION} experiment={} seed={} config=config.txt",
                config.kind.name(),
                config.seed
            ),
            files: vec!["config.txt".into()],
        })
    }

    /// Writes a CSV with the provenance line, the column names and `rows`.
    fn csv(&mut self, name: &str, columns: &str, rows: &[String]) -> Result<()> {
        let mut w = BufWriter::new(File::create(self.dir.join(name))?);
        writeln!(w, "{}", self.header)?;
        writeln!(w, "{columns}")?;
        for r in rows {
            writeln!(w, "{r}")?;
        }
        w.flush()?;
        self.files.push(name.into());
        Ok(())
    }

    fn finish(
        mut self,
        config: &ExperimentConfig,
        summary: Value,
        runs: Vec<RunRecord>,
        mut warnings: Vec<String>,
    ) -> Result<RunReport> {
        warnings.sort();
        warnings.dedup();
        self.files.push("report.json".into());
        let report = RunReport {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            experiment: config.kind.name().into(),
            seed: config.seed,
            config_file: "config.txt".into(),
            files: self.files,
            summary,
            runs,
            warnings,
        };
        let mut w = BufWriter::new(File::create(self.dir.join("report.json"))?);
        serde_json::to_writer_pretty(&mut w, &report)?;
        writeln!(w)?;
        w.flush()?;
        Ok(report)
    }
}

fn e(x: f64) -> String {
    format!("{x:.10e}")
}

fn setup(config: &ExperimentConfig, mesh_n: usize) -> Result<(DgSpace, FieldSampler)> {
    let space = DgSpace::uniform(mesh_n)?;
    let sampler = build_sampler(space.mesh(), config.covariance_spec()?, config.truncation)?;
    Ok((space, sampler))
}

/// Errors of the multi-modes partial means against the classical mean at
/// one perturbation size.
struct SweepPoint {
    errors: Vec<f64>,
    runs: Vec<RunRecord>,
    warnings: Vec<String>,
}

fn sweep_point(space: &DgSpace, sampler: &FieldSampler, config: &ExperimentConfig, epsilon: f64) -> Result<SweepPoint> {
    let mc = config.mc_config(epsilon, config.modes)?;
    let multi = run_multimodes(space, sampler, &mc)?;
    let classical = run_classical(space, sampler, &mc)?;
    let errors =
        multi.partial_means.iter().map(|p| relative_l2_error(space, p, &classical.psi)).collect::<Result<Vec<_>>>()?;
    let mut warnings = multi.warnings.clone();
    warnings.extend(classical.warnings.iter().cloned());
    Ok(SweepPoint {
        errors,
        runs: vec![RunRecord::new("multimodes", epsilon, &multi), RunRecord::new("classical", epsilon, &classical)],
        warnings,
    })
}

/// Error against the classical mean as the number of modes grows.
pub fn run_decay(config: &ExperimentConfig) -> Result<RunReport> {
    let mut out = Output::new(config)?;
    let (space, sampler) = setup(config, config.mesh_n)?;
    let point = sweep_point(&space, &sampler, config, config.epsilon)?;
    let rows: Vec<String> = point
        .errors
        .iter()
        .enumerate()
        .map(|(i, err)| {
            let n = i + 1;
            format!("{n},{},{}", e(*err), e(5.0 * config.epsilon.powi(n as i32)))
        })
        .collect();
    out.csv("decay.csv", "modes,error,reference", &rows)?;
    let summary = json!({ "epsilon": config.epsilon, "errors": point.errors });
    out.finish(config, summary, point.runs, point.warnings)
}

/// Error table over perturbation sizes and mode counts.
pub fn run_eps_sweep(config: &ExperimentConfig) -> Result<RunReport> {
    let mut out = Output::new(config)?;
    let (space, sampler) = setup(config, config.mesh_n)?;
    let mut rows = Vec::new();
    let mut runs = Vec::new();
    let mut warnings = Vec::new();
    let mut table = Vec::new();
    for &eps in &config.epsilons {
        let point = sweep_point(&space, &sampler, config, eps)?;
        for (i, err) in point.errors.iter().enumerate() {
            rows.push(format!("{},{},{}", e(eps), i + 1, e(*err)));
        }
        table.push(json!({ "epsilon": eps, "errors": point.errors }));
        runs.extend(point.runs);
        warnings.extend(point.warnings);
    }
    out.csv("eps_sweep.csv", "epsilon,modes,error", &rows)?;
    out.finish(config, json!({ "table": table }), runs, warnings)
}

/// Wall-clock comparison of the two drivers on identical samples.
pub fn run_timing(config: &ExperimentConfig) -> Result<RunReport> {
    let mut out = Output::new(config)?;
    let (space, sampler) = setup(config, config.mesh_n)?;
    let mut runs = Vec::new();
    let mut warnings = Vec::new();

    let mut classical_cfg = config.mc_config(config.epsilon, 1)?;
    classical_cfg.modes = 1;
    let classical = run_classical(&space, &sampler, &classical_cfg)?;
    warnings.extend(classical.warnings.iter().cloned());
    runs.push(RunRecord::new("classical", config.epsilon, &classical));
    let mut multis = Vec::new();
    for &modes in &config.timing_modes {
        let r = run_multimodes(&space, &sampler, &config.mc_config(config.epsilon, modes)?)?;
        warnings.extend(r.warnings.iter().cloned());
        runs.push(RunRecord::new("multimodes", config.epsilon, &r));
        multis.push(r);
    }

    let row = |label: &str, r: &McResult| {
        let t = &r.timings;
        let c = &r.counters;
        format!(
            "{label},{},{},{},{},{},{},{},{},{},{}",
            r.modes,
            r.sample_count,
            e(t.assembly),
            e(t.factorization),
            e(t.solves),
            e(t.sampling),
            e(t.total),
            c.assemblies,
            c.factorizations,
            c.solves
        )
    };
    let mut rows = vec![row("classical", &classical)];
    rows.extend(multis.iter().map(|r| row("multimodes", r)));
    out.csv(
        "timing.csv",
        "algorithm,modes,samples,assembly_s,factorization_s,solves_s,sampling_s,total_s,assemblies,factorizations,solves",
        &rows,
    )?;

    let speedups: Vec<Value> = multis
        .iter()
        .map(|r| json!({ "modes": r.modes, "speedup": classical.timings.total / r.timings.total }))
        .collect();
    let mut growth = Vec::new();
    for a in &multis {
        if let Some(b) = multis.iter().find(|b| b.modes == 2 * a.modes) {
            growth.push(json!({ "from": a.modes, "to": b.modes, "solve_ratio": b.timings.solves / a.timings.solves }));
        }
    }
    out.finish(config, json!({ "speedup": speedups, "solve_growth": growth }), runs, warnings)
}

/// Mesh refinement study against a smooth manufactured solution.
pub fn run_convergence(config: &ExperimentConfig) -> Result<RunReport> {
    let mut out = Output::new(config)?;
    let params = config.physical_params()?;
    let exact = TrigSolution::default();
    let mut hs: Vec<f64> = Vec::new();
    let mut l2: Vec<f64> = Vec::new();
    let mut energy: Vec<f64> = Vec::new();
    let mut rows = Vec::new();
    for &n in &config.meshes {
        let space = DgSpace::uniform(n)?;
        let run = solve_manufactured(&space, &params, &exact, config.quad_degree)?;
        let h = space.mesh().h();
        let rate = |errs: &[f64], new: f64| match (hs.last(), errs.last()) {
            (Some(&h0), Some(&e0)) => e((e0 / new).ln() / (h0 / h).ln()),
            _ => String::new(),
        };
        rows.push(format!(
            "{n},{},{},{},{},{}",
            e(h),
            e(run.l2_error),
            rate(&l2, run.l2_error),
            e(run.energy_error),
            rate(&energy, run.energy_error)
        ));
        hs.push(h);
        l2.push(run.l2_error);
        energy.push(run.energy_error);
    }
    out.csv("convergence.csv", "mesh_n,h,l2_error,l2_rate,energy_error,energy_rate", &rows)?;
    let summary = if hs.len() >= 2 {
        json!({ "l2_slope": log_log_slope(&hs, &l2), "energy_slope": log_log_slope(&hs, &energy) })
    } else {
        json!({})
    };
    out.finish(config, summary, Vec::new(), Vec::new())
}

fn field_row(x: &Point, fields: &[&DgVector], space: &DgSpace) -> Result<String> {
    let mut s = format!("{},{}", e(x.x), e(x.y));
    for f in fields {
        let v: [Complex64; 2] = evaluate_field(space, f, x)?;
        for c in v {
            s.push_str(&format!(",{},{}", e(c.re), e(c.im)));
        }
    }
    Ok(s)
}

fn write_eta(out: &mut Output, name: &str, space: &DgSpace, values: &[f64]) -> Result<()> {
    let rows: Vec<String> = space
        .mesh()
        .centroids()
        .iter()
        .zip(values)
        .enumerate()
        .map(|(k, (c, v))| format!("{k},{},{},{}", e(c.x), e(c.y), e(*v)))
        .collect();
    out.csv(name, "element,x,y,eta", &rows)
}

/// Field realizations, the expected displacement and one sample solution on
/// a grid and along the diagonal `y = x`.
pub fn run_field_demo(config: &ExperimentConfig) -> Result<RunReport> {
    let mut out = Output::new(config)?;
    let (space, sampler) = setup(config, config.mesh_n)?;
    let mc = config.mc_config(config.epsilon, config.modes)?;
    let (eta0, sample0) = sample_modes(&space, &sampler, &mc, 0)?;
    let (eta1, _) = sample_modes(&space, &sampler, &mc, 1)?;
    write_eta(&mut out, "eta_0.csv", &space, &eta0.values)?;
    write_eta(&mut out, "eta_1.csv", &space, &eta1.values)?;

    let result = run_multimodes(&space, &sampler, &mc)?;
    let fields = [&result.psi, &sample0.u_sum];
    let columns = "x,y,mean_u1_re,mean_u1_im,mean_u2_re,mean_u2_im,sample_u1_re,sample_u1_im,sample_u2_re,sample_u2_im";
    let g = config.grid;
    let coord = |i: usize| DOMAIN_MIN + (DOMAIN_MAX - DOMAIN_MIN) * i as f64 / (g - 1) as f64;
    let mut grid_rows = Vec::with_capacity(g * g);
    for j in 0..g {
        for i in 0..g {
            grid_rows.push(field_row(&Point::new(coord(i), coord(j)), &fields, &space)?);
        }
    }
    out.csv("field_grid.csv", columns, &grid_rows)?;
    let diagonal =
        (0..g).map(|i| field_row(&Point::new(coord(i), coord(i)), &fields, &space)).collect::<Result<Vec<_>>>()?;
    out.csv("cross_section.csv", columns, &diagonal)?;

    let summary = json!({
        "epsilon": config.epsilon,
        "modes": config.modes,
        "sampler_rank": sampler.rank(),
    });
    let runs = vec![RunRecord::new("multimodes", config.epsilon, &result)];
    out.finish(config, summary, runs, result.warnings.clone())
}
