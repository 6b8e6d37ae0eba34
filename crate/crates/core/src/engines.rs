//! Monte Carlo drivers.
//!
//! The classical driver assembles and factorizes the perturbed operator once
//! per sample. The multi-modes driver factorizes the background operator once
//! and, per sample, solves a short recursion of mode problems that differ
//! only in their right-hand sides.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::dg::{
    assemble_load_mode, assemble_load_per_element, assemble_system_with, l2_norm, BoundaryAlpha, DgSpace, DgVector,
    PhysicalParams, DEFAULT_LOAD_DEGREE,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexSparseMatrix, LuFactors, SymbolicAnalysis, DENSE_THRESHOLD};
use crate::random_field::{EtaBound, EtaRealization, FieldSampler};
use crate::source::oscillatory_source;

/// Samples evaluated concurrently before being folded into the mean.
const CHUNK: usize = 32;

/// Offset applied to the base seed by the classical driver when it does not
/// share samples with the multi-modes driver.
const CLASSICAL_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

/// Family of right-hand sides drawn per sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Oscillatory source with wavenumber `k α_j` on each element.
    #[default]
    Oscillatory,
    /// Oscillatory source with wavenumber `k`, the same for every sample.
    OscillatoryUnit,
    /// Oscillatory source with wavenumber `k` scaled by `1 + η_j`; its mean
    /// over samples is the unscaled source.
    Perturbed,
}

/// Where each sample's field `η_j` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaStream {
    /// Stream `(seed, j)` for sample `j`.
    #[default]
    Sampled,
    /// Stream `(seed, index)` for every sample.
    Frozen(u64),
    /// `η ≡ 0`.
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub params: PhysicalParams,
    pub epsilon: f64,
    pub samples: usize,
    pub modes: usize,
    pub base_seed: u64,
    pub source: SourceKind,
    pub eta: EtaStream,
    /// Classical driver consumes the same streams as the multi-modes driver.
    pub shared_samples: bool,
    /// Keep every per-sample field in the result.
    pub retain_samples: bool,
    pub quad_degree: usize,
    pub boundary_alpha: BoundaryAlpha,
    /// Force `η = 0` on elements touching the boundary.
    pub boundary_mask: bool,
    /// How each Gaussian draw is brought into `[-1, 1]`.
    pub eta_bound: EtaBound,
}

impl McConfig {
    pub fn new(params: PhysicalParams) -> Self {
        Self {
            params,
            epsilon: 0.1,
            samples: 1000,
            modes: 3,
            base_seed: 0,
            source: SourceKind::default(),
            eta: EtaStream::default(),
            shared_samples: true,
            retain_samples: false,
            quad_degree: DEFAULT_LOAD_DEGREE,
            boundary_alpha: BoundaryAlpha::default(),
            boundary_mask: false,
            eta_bound: EtaBound::Rescale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.samples == 0 {
            return Err(Error::InvalidParameter("need at least one sample".into()));
        }
        if self.modes == 0 {
            return Err(Error::InvalidParameter("need at least one mode".into()));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be non-negative, got {}", self.epsilon)));
        }
        Ok(())
    }

    /// Heuristic check on the size of the perturbation; `None` when it looks safe.
    pub fn validity_warning(&self) -> Option<String> {
        let c = 4.0 * self.epsilon * (1.0 + self.params.k);
        (c >= 1.0).then(|| {
            format!(
                "epsilon = {} is large for k = {} (4ε(1+k) = {c:.3} ≥ 1); the mode expansion may not converge",
                self.epsilon, self.params.k
            )
        })
    }

    fn seed_for(&self, classical: bool) -> u64 {
        if classical && !self.shared_samples {
            self.base_seed.wrapping_add(CLASSICAL_SEED_OFFSET)
        } else {
            self.base_seed
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timings {
    pub assembly: f64,
    pub factorization: f64,
    pub solves: f64,
    pub sampling: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub assemblies: usize,
    pub factorizations: usize,
    pub solves: usize,
}

#[derive(Debug, Clone)]
pub struct McResult {
    /// Sample mean of the per-sample fields.
    pub psi: DgVector,
    /// Multi-modes driver: means of the partial sums `Σ_{n<m} ε^n u_n`
    /// for `m = 1..=N`; the last one equals `psi`. Classical: just `psi`.
    pub partial_means: Vec<DgVector>,
    pub samples: Option<Vec<DgVector>>,
    pub timings: Timings,
    pub counters: Counters,
    pub sample_count: usize,
    pub modes: usize,
    pub warnings: Vec<String>,
}

/// Neumaier-compensated running sums of complex vectors.
#[derive(Debug, Clone)]
pub struct CompensatedSum {
    sum: Vec<Complex64>,
    carry: Vec<Complex64>,
}

fn two_sum(sum: &mut f64, carry: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *carry += (*sum - t) + x;
    } else {
        *carry += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new(len: usize) -> Self {
        Self { sum: vec![Complex64::default(); len], carry: vec![Complex64::default(); len] }
    }

    pub fn add(&mut self, x: &[Complex64]) {
        for ((s, c), x) in self.sum.iter_mut().zip(&mut self.carry).zip(x) {
            two_sum(&mut s.re, &mut c.re, x.re);
            two_sum(&mut s.im, &mut c.im, x.im);
        }
    }

    pub fn mean(&self, count: usize) -> DgVector {
        let inv = 1.0 / count as f64;
        self.sum.iter().zip(&self.carry).map(|(s, c)| (s + c) * inv).collect::<Vec<_>>().into()
    }
}

/// Mode fields of one sample and their weighted sum.
#[derive(Debug, Clone)]
pub struct ModeSequence {
    pub modes: Vec<DgVector>,
    /// `Σ_{n<N} ε^n u_n`.
    pub u_sum: DgVector,
}

impl ModeSequence {
    /// `Σ_{n<m} ε^n u_n` for `m = 1..=N`.
    pub fn partial_sums(&self, epsilon: f64) -> Vec<DgVector> {
        let mut acc = DgVector::zeros(self.u_sum.len());
        let mut weight = 1.0;
        let mut out = Vec::with_capacity(self.modes.len());
        for u in &self.modes {
            acc.axpy(Complex64::new(weight, 0.0), u);
            out.push(acc.clone());
            weight *= epsilon;
        }
        out
    }
}

fn checked_solve(factors: &LuFactors, b: &[Complex64]) -> Result<DgVector> {
    let x = DgVector::from_vec(factors.solve(b)?);
    if !x.is_finite() {
        return Err(Error::NonFinite("triangular solve"));
    }
    Ok(x)
}

/// Solves the mode recursion for one sample with factors of the background
/// operator: `u_0` from `f_load`, then `u_n` from
/// `(2k²η u_{n-1} + k²η² u_{n-2}, φ)`.
pub fn mode_solve_sequence(
    factors: &LuFactors,
    space: &DgSpace,
    params: &PhysicalParams,
    eta: &[f64],
    f_load: &[Complex64],
    modes: usize,
    epsilon: f64,
) -> Result<ModeSequence> {
    if modes == 0 {
        return Err(Error::InvalidParameter("need at least one mode".into()));
    }
    space.check_len(f_load.len(), "sample load")?;
    space.check_len(factors.dim(), "factorization")?;
    space.check_per_element(eta.len(), "eta per element")?;
    let tagged = |n: usize| move |e: Error| Error::SampleSolve { sample: 0, mode: n, source: Box::new(e) };

    let mut out: Vec<DgVector> = Vec::with_capacity(modes);
    out.push(checked_solve(factors, f_load).map_err(tagged(0))?);
    let zero = space.zeros();
    for n in 1..modes {
        let prev2 = if n >= 2 { &out[n - 2] } else { &zero };
        let load = assemble_load_mode(space, eta, &out[n - 1], prev2, params.k)?;
        out.push(checked_solve(factors, &load).map_err(tagged(n))?);
    }
    let mut u_sum = space.zeros();
    let mut weight = 1.0;
    for u in &out {
        u_sum.axpy(Complex64::new(weight, 0.0), u);
        weight *= epsilon;
    }
    Ok(ModeSequence { modes: out, u_sum })
}

/// Field and load for one sample.
struct SampleInput {
    eta: EtaRealization,
    load: DgVector,
}

fn draw_sample(
    space: &DgSpace,
    sampler: &FieldSampler,
    config: &McConfig,
    seed: u64,
    index: usize,
    unit_load: Option<&DgVector>,
    boundary: &[bool],
) -> Result<SampleInput> {
    let nel = space.num_elements();
    let mut eta = match config.eta {
        EtaStream::Sampled => sampler.draw_eta_with(seed, index as u64, config.eta_bound),
        EtaStream::Frozen(i) => sampler.draw_eta_with(seed, i, config.eta_bound),
        EtaStream::Zero => EtaRealization::zeros(nel, seed, index as u64),
    };
    if eta.values.len() != nel {
        return Err(Error::mismatch(nel, eta.values.len(), "field sampler points"));
    }
    if config.boundary_mask {
        eta.mask(boundary)?;
    }
    let k = config.params.k;
    let load = match config.source {
        SourceKind::OscillatoryUnit => unit_load.expect("unit load is precomputed").clone(),
        SourceKind::Oscillatory => {
            let alpha = eta.alpha(config.epsilon);
            assemble_load_per_element(space, |e, x| oscillatory_source(k * alpha[e], x), config.quad_degree)?
        }
        SourceKind::Perturbed => {
            let v = &eta.values;
            assemble_load_per_element(
                space,
                |e, x| {
                    let f = oscillatory_source(k, x);
                    [f[0] * (1.0 + v[e]), f[1] * (1.0 + v[e])]
                },
                config.quad_degree,
            )?
        }
    };
    Ok(SampleInput { eta, load })
}

fn unit_load(space: &DgSpace, config: &McConfig) -> Result<Option<DgVector>> {
    if config.source != SourceKind::OscillatoryUnit {
        return Ok(None);
    }
    let k = config.params.k;
    assemble_load_per_element(space, |_, x| oscillatory_source(k, x), config.quad_degree).map(Some)
}

fn factorize(symbolic: Option<&SymbolicAnalysis>, m: &ComplexSparseMatrix) -> Result<LuFactors> {
    match symbolic {
        Some(s) => LuFactors::sparse(s, m),
        None => LuFactors::dense(m),
    }
}

fn symbolic_for(m: &ComplexSparseMatrix) -> Option<SymbolicAnalysis> {
    (m.dim() >= DENSE_THRESHOLD).then(|| SymbolicAnalysis::new(m))
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn prepare(config: &McConfig) -> Result<Vec<String>> {
    config.validate()?;
    let mut warnings = Vec::new();
    if let Some(w) = config.validity_warning() {
        log::warn!("{w}");
        warnings.push(w);
    }
    Ok(warnings)
}

struct MultiSample {
    partial: Vec<DgVector>,
    sampling: Duration,
    solves: Duration,
}

/// Multi-modes Monte Carlo: one factorization, `M·N` triangular solves.
pub fn run_multimodes(space: &DgSpace, sampler: &FieldSampler, config: &McConfig) -> Result<McResult> {
    let start = Instant::now();
    let warnings = prepare(config)?;
    let mut timings = Timings::default();
    let mut counters = Counters::default();

    let t = Instant::now();
    let matrix = assemble_system_with(space, &config.params, None, config.boundary_alpha)?;
    timings.assembly += secs(t.elapsed());
    counters.assemblies += 1;

    let t = Instant::now();
    let symbolic = symbolic_for(&matrix);
    let factors = factorize(symbolic.as_ref(), &matrix).map_err(|e| Error::SampleSolve {
        sample: 0,
        mode: 0,
        source: Box::new(e),
    })?;
    timings.factorization += secs(t.elapsed());
    counters.factorizations += 1;

    let t = Instant::now();
    let unit = unit_load(space, config)?;
    timings.sampling += secs(t.elapsed());
    let boundary = space.mesh().boundary_elements();
    let seed = config.seed_for(false);
    let n_modes = config.modes;
    let mut sums: Vec<CompensatedSum> = (0..n_modes).map(|_| CompensatedSum::new(space.num_dofs())).collect();
    let mut retained = config.retain_samples.then(Vec::new);

    for chunk_start in (0..config.samples).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(config.samples);
        let outputs: Vec<MultiSample> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|j| {
                let t = Instant::now();
                let input = draw_sample(space, sampler, config, seed, j, unit.as_ref(), &boundary)?;
                let sampling = t.elapsed();
                let t = Instant::now();
                let seq = mode_solve_sequence(
                    &factors,
                    space,
                    &config.params,
                    &input.eta.values,
                    &input.load,
                    n_modes,
                    config.epsilon,
                )
                .map_err(|e| match e {
                    Error::SampleSolve { mode, source, .. } => Error::SampleSolve { sample: j, mode, source },
                    other => other,
                })?;
                let solves = t.elapsed();
                Ok(MultiSample { partial: seq.partial_sums(config.epsilon), sampling, solves })
            })
            .collect::<Result<_>>()?;
        for out in outputs {
            timings.sampling += secs(out.sampling);
            timings.solves += secs(out.solves);
            counters.solves += n_modes;
            for (sum, p) in sums.iter_mut().zip(&out.partial) {
                sum.add(p);
            }
            if let Some(r) = retained.as_mut() {
                r.push(out.partial.last().expect("at least one mode").clone());
            }
        }
    }

    let partial_means: Vec<DgVector> = sums.iter().map(|s| s.mean(config.samples)).collect();
    timings.total = secs(start.elapsed());
    Ok(McResult {
        psi: partial_means.last().expect("at least one mode").clone(),
        partial_means,
        samples: retained,
        timings,
        counters,
        sample_count: config.samples,
        modes: n_modes,
        warnings,
    })
}

struct ClassicalSample {
    u: DgVector,
    sampling: Duration,
    assembly: Duration,
    factorization: Duration,
    solve: Duration,
}

/// Classical Monte Carlo: assemble, factorize and solve the perturbed
/// operator for every sample.
pub fn run_classical(space: &DgSpace, sampler: &FieldSampler, config: &McConfig) -> Result<McResult> {
    let start = Instant::now();
    let warnings = prepare(config)?;
    let mut timings = Timings::default();
    let mut counters = Counters::default();

    // The ordering depends only on the pattern, which is the same for all samples.
    let t = Instant::now();
    let pattern = assemble_system_with(space, &config.params, None, config.boundary_alpha)?;
    let symbolic = symbolic_for(&pattern);
    timings.factorization += secs(t.elapsed());
    drop(pattern);

    let t = Instant::now();
    let unit = unit_load(space, config)?;
    timings.sampling += secs(t.elapsed());
    let boundary = space.mesh().boundary_elements();
    let seed = config.seed_for(true);
    let mut sum = CompensatedSum::new(space.num_dofs());
    let mut retained = config.retain_samples.then(Vec::new);

    for chunk_start in (0..config.samples).step_by(CHUNK) {
        let chunk_end = (chunk_start + CHUNK).min(config.samples);
        let outputs: Vec<ClassicalSample> = (chunk_start..chunk_end)
            .into_par_iter()
            .map(|j| {
                let tag = |e: Error| Error::SampleSolve { sample: j, mode: 0, source: Box::new(e) };
                let t = Instant::now();
                let input = draw_sample(space, sampler, config, seed, j, unit.as_ref(), &boundary)?;
                let sampling = t.elapsed();
                let t = Instant::now();
                let alpha = input.eta.alpha(config.epsilon);
                let m = assemble_system_with(space, &config.params, Some(&alpha), config.boundary_alpha)?;
                let assembly = t.elapsed();
                let t = Instant::now();
                let factors = factorize(symbolic.as_ref(), &m).map_err(tag)?;
                let factorization = t.elapsed();
                let t = Instant::now();
                let u = checked_solve(&factors, &input.load).map_err(tag)?;
                Ok(ClassicalSample { u, sampling, assembly, factorization, solve: t.elapsed() })
            })
            .collect::<Result<_>>()?;
        for out in outputs {
            timings.sampling += secs(out.sampling);
            timings.assembly += secs(out.assembly);
            timings.factorization += secs(out.factorization);
            timings.solves += secs(out.solve);
            counters.assemblies += 1;
            counters.factorizations += 1;
            counters.solves += 1;
            sum.add(&out.u);
            if let Some(r) = retained.as_mut() {
                r.push(out.u);
            }
        }
    }

    let psi = sum.mean(config.samples);
    timings.total = secs(start.elapsed());
    Ok(McResult {
        partial_means: vec![psi.clone()],
        psi,
        samples: retained,
        timings,
        counters,
        sample_count: config.samples,
        modes: 1,
        warnings,
    })
}

/// One multi-modes sample: its field realization and mode sequence, drawn
/// exactly as `run_multimodes` draws sample `index`.
pub fn sample_modes(
    space: &DgSpace,
    sampler: &FieldSampler,
    config: &McConfig,
    index: usize,
) -> Result<(EtaRealization, ModeSequence)> {
    config.validate()?;
    let matrix = assemble_system_with(space, &config.params, None, config.boundary_alpha)?;
    let factors = factorize(symbolic_for(&matrix).as_ref(), &matrix)?;
    let unit = unit_load(space, config)?;
    let boundary = space.mesh().boundary_elements();
    let input = draw_sample(space, sampler, config, config.seed_for(false), index, unit.as_ref(), &boundary)?;
    let seq = mode_solve_sequence(
        &factors,
        space,
        &config.params,
        &input.eta.values,
        &input.load,
        config.modes,
        config.epsilon,
    )?;
    Ok((input.eta, seq))
}

/// Solves `a_h(u, φ) = (f, φ)` once for a given load vector.
pub fn solve_deterministic(space: &DgSpace, params: &PhysicalParams, load: &[Complex64]) -> Result<DgVector> {
    space.check_len(load.len(), "load")?;
    let m = assemble_system_with(space, params, None, BoundaryAlpha::Unit)?;
    let factors = factorize(symbolic_for(&m).as_ref(), &m)?;
    checked_solve(&factors, load)
}

/// `‖a − b‖ / ‖b‖` in the broken L² norm.
pub fn relative_l2_error(space: &DgSpace, a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    space.check_len(a.len(), "first field")?;
    space.check_len(b.len(), "second field")?;
    let diff: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    Ok(l2_norm(space, &diff)? / l2_norm(space, b)?.max(1e-300))
}
