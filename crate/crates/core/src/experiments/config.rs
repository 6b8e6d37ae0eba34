//! Flat `key = value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; missing keys take the defaults of the experiment kind. The
//! canonical rendering from [`ExperimentConfig::render`] parses back to an
//! equal configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Matrix2;

use crate::dg::quadrature::triangle_rule;
use crate::dg::{BoundaryAlpha, PhysicalParams};
use crate::engines::{EtaStream, McConfig, SourceKind};
use crate::error::{Error, Result};
use crate::random_field::{CovarianceKind, CovarianceSpec, EtaBound, Truncation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Decay,
    EpsSweep,
    Timing,
    Convergence,
    FieldDemo,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::Decay,
        ExperimentKind::EpsSweep,
        ExperimentKind::Timing,
        ExperimentKind::Convergence,
        ExperimentKind::FieldDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Decay => "decay",
            ExperimentKind::EpsSweep => "eps-sweep",
            ExperimentKind::Timing => "timing",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::FieldDemo => "field-demo",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Cells per side of the uniform mesh (`h = 1/mesh_n`).
    pub mesh_n: usize,
    pub k: f64,
    pub mu: f64,
    pub lambda: f64,
    pub a: Matrix2<f64>,
    pub gamma0: f64,
    pub gamma1: f64,
    pub epsilon: f64,
    pub epsilons: Vec<f64>,
    pub samples: usize,
    pub modes: usize,
    pub timing_modes: Vec<usize>,
    pub meshes: Vec<usize>,
    pub seed: u64,
    pub source: SourceKind,
    pub eta: EtaStream,
    pub eta_bound: EtaBound,
    pub shared_samples: bool,
    pub boundary_alpha: BoundaryAlpha,
    pub boundary_mask: bool,
    pub covariance: CovarianceKind,
    pub correlation_length: f64,
    pub truncation: Truncation,
    pub quad_degree: usize,
    /// Points per side of the evaluation grid in the field demo.
    pub grid: usize,
    pub out: PathBuf,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = Self {
            kind,
            mesh_n: 20,
            k: 10.0,
            mu: 1.0,
            lambda: 1.0,
            a: Matrix2::identity(),
            gamma0: 10.0,
            gamma1: 0.1,
            epsilon: 0.1,
            epsilons: vec![0.05, 0.1, 0.5, 0.8],
            samples: 1000,
            modes: 3,
            timing_modes: vec![3, 6],
            meshes: vec![8, 16, 32, 64],
            seed: 0,
            source: SourceKind::Oscillatory,
            eta: EtaStream::Sampled,
            eta_bound: EtaBound::Rescale,
            shared_samples: true,
            boundary_alpha: BoundaryAlpha::Unit,
            boundary_mask: false,
            covariance: CovarianceKind::Exponential,
            correlation_length: 0.5,
            truncation: Truncation::Auto,
            quad_degree: 4,
            grid: 41,
            out: PathBuf::from("out"),
        };
        match kind {
            ExperimentKind::Decay => {
                c.k = 5.0;
                c.modes = 7;
            }
            ExperimentKind::EpsSweep => c.modes = 7,
            ExperimentKind::Timing => c.samples = 100,
            ExperimentKind::Convergence => {
                c.k = 5.0;
                c.quad_degree = 6;
            }
            ExperimentKind::FieldDemo => {
                c.epsilon = 0.05;
                c.modes = 7;
            }
        }
        c
    }

    pub fn from_file(path: &Path, kind: Option<ExperimentKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path, kind)
    }

    /// Parses `text`; `kind` (from the command line) takes precedence over a
    /// missing `experiment` key and must agree with a present one.
    pub fn parse(text: &str, path: &Path, kind: Option<ExperimentKind>) -> Result<Self> {
        let err = |line: usize, message: String| Error::Config { path: path.to_path_buf(), line, message };
        let mut entries: Vec<(usize, String, String)> = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) =
                trimmed.split_once('=').ok_or_else(|| err(line, format!("expected 'key = value', got '{trimmed}'")))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if !KEYS.contains(&key.as_str()) {
                return Err(err(line, format!("unknown key '{key}'")));
            }
            if let Some(first) = seen.insert(key.clone(), line) {
                return Err(err(line, format!("duplicate key '{key}' (first set on line {first})")));
            }
            entries.push((line, key, value));
        }

        let file_kind = match entries.iter().find(|(_, k, _)| k == "experiment") {
            Some((line, _, v)) => Some((*line, v.parse::<ExperimentKind>().map_err(|m| err(*line, m))?)),
            None => None,
        };
        let kind = match (kind, file_kind) {
            (Some(cli), Some((line, file))) if cli != file => {
                return Err(err(line, format!("config is for '{}' but '{}' was requested", file.name(), cli.name())))
            }
            (Some(cli), _) => cli,
            (None, Some((_, file))) => file,
            (None, None) => return Err(err(0, "no experiment given".into())),
        };

        let mut c = Self::defaults(kind);
        for (line, key, value) in &entries {
            c.apply(key, value).map_err(|m| err(*line, format!("{key}: {m}")))?;
        }
        c.check().map_err(|(keys, m)| {
            let line = keys.iter().filter_map(|k| seen.get(*k)).max().copied().unwrap_or(0);
            err(line, m)
        })?;
        Ok(c)
    }

    fn apply(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "experiment" => {}
            "mesh_n" => self.mesh_n = parse_num(v)?,
            "h" => self.mesh_n = parse_h(v)?,
            "k" => self.k = parse_num(v)?,
            "mu" => self.mu = parse_num(v)?,
            "lambda" => self.lambda = parse_num(v)?,
            "a11" => self.a[(0, 0)] = parse_num(v)?,
            "a12" => {
                let x = parse_num(v)?;
                self.a[(0, 1)] = x;
                self.a[(1, 0)] = x;
            }
            "a22" => self.a[(1, 1)] = parse_num(v)?,
            "gamma0" => self.gamma0 = parse_num(v)?,
            "gamma1" => self.gamma1 = parse_num(v)?,
            "epsilon" => self.epsilon = parse_num(v)?,
            "epsilons" => self.epsilons = parse_list(v)?,
            "samples" => self.samples = parse_num(v)?,
            "modes" => self.modes = parse_num(v)?,
            "timing_modes" => self.timing_modes = parse_list(v)?,
            "meshes" => self.meshes = parse_list(v)?,
            "seed" => self.seed = parse_num(v)?,
            "source" => {
                self.source = match v {
                    "oscillatory" => SourceKind::Oscillatory,
                    "oscillatory-unit" => SourceKind::OscillatoryUnit,
                    "perturbed" => SourceKind::Perturbed,
                    _ => return Err(format!("expected oscillatory, oscillatory-unit or perturbed, got '{v}'")),
                }
            }
            "eta" => {
                self.eta = match v {
                    "sampled" => EtaStream::Sampled,
                    "zero" => EtaStream::Zero,
                    _ => match v.strip_prefix("frozen:") {
                        Some(i) => EtaStream::Frozen(parse_num(i)?),
                        None => return Err(format!("expected sampled, zero or frozen:<index>, got '{v}'")),
                    },
                }
            }
            "eta_bound" => {
                self.eta_bound = match v {
                    "clamp" => EtaBound::Clamp,
                    "rescale" => EtaBound::Rescale,
                    _ => return Err(format!("expected clamp or rescale, got '{v}'")),
                }
            }
            "shared_samples" => self.shared_samples = parse_num(v)?,
            "boundary_alpha" => {
                self.boundary_alpha = match v {
                    "unit" => BoundaryAlpha::Unit,
                    "element" => BoundaryAlpha::Element,
                    _ => return Err(format!("expected unit or element, got '{v}'")),
                }
            }
            "boundary_mask" => self.boundary_mask = parse_num(v)?,
            "covariance" => {
                self.covariance = match v {
                    "exponential" => CovarianceKind::Exponential,
                    "squared-exponential" => CovarianceKind::SquaredExponential,
                    _ => return Err(format!("expected exponential or squared-exponential, got '{v}'")),
                }
            }
            "correlation_length" => self.correlation_length = parse_num(v)?,
            "truncation" => {
                self.truncation = match v {
                    "auto" => Truncation::Auto,
                    "full" => Truncation::Full,
                    _ => Truncation::Rank(parse_num(v)?),
                }
            }
            "quad_degree" => self.quad_degree = parse_num(v)?,
            "grid" => self.grid = parse_num(v)?,
            "out" => self.out = PathBuf::from(v),
            _ => unreachable!("key list and match arms agree"),
        }
        Ok(())
    }

    /// Range checks; the error lists the keys that may be at fault.
    fn check(&self) -> std::result::Result<(), (&'static [&'static str], String)> {
        const PHYSICAL: &[&str] = &["k", "mu", "lambda", "a11", "a12", "a22", "gamma0", "gamma1"];
        self.physical_params().map_err(|e| (PHYSICAL, e.to_string()))?;
        CovarianceSpec::new(self.covariance, self.correlation_length)
            .map_err(|e| (&["correlation_length"][..], e.to_string()))?;
        let positive =
            [(&["mesh_n", "h"][..], self.mesh_n), (&["samples"][..], self.samples), (&["modes"][..], self.modes)];
        for (key, v) in positive {
            if v == 0 {
                return Err((key, format!("{} must be at least 1", key[0])));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err((&["epsilon"], "epsilon must be non-negative".into()));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err((&["epsilons"], "epsilons must be a non-empty list of non-negative values".into()));
        }
        if self.meshes.is_empty() || self.meshes.contains(&0) {
            return Err((&["meshes"], "meshes must be a non-empty list of positive sizes".into()));
        }
        if self.timing_modes.is_empty() || self.timing_modes.contains(&0) {
            return Err((&["timing_modes"], "timing_modes must be a non-empty list of positive counts".into()));
        }
        if self.grid < 2 {
            return Err((&["grid"], "grid needs at least 2 points".into()));
        }
        triangle_rule(self.quad_degree).map_err(|e| (&["quad_degree"][..], e.to_string()))?;
        Ok(())
    }

    pub fn physical_params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.k, self.mu, self.lambda, self.a, self.gamma0, self.gamma1)
    }

    pub fn covariance_spec(&self) -> Result<CovarianceSpec> {
        CovarianceSpec::new(self.covariance, self.correlation_length)
    }

    /// Monte Carlo settings at perturbation size `epsilon` with `modes` modes.
    pub fn mc_config(&self, epsilon: f64, modes: usize) -> Result<McConfig> {
        let mut mc = McConfig::new(self.physical_params()?);
        mc.epsilon = epsilon;
        mc.samples = self.samples;
        mc.modes = modes;
        mc.base_seed = self.seed;
        mc.source = self.source;
        mc.eta = self.eta;
        mc.eta_bound = self.eta_bound;
        mc.shared_samples = self.shared_samples;
        mc.quad_degree = self.quad_degree;
        mc.boundary_alpha = self.boundary_alpha;
        mc.boundary_mask = self.boundary_mask;
        mc.validate()?;
        Ok(mc)
    }

    /// Canonical `key = value` text listing every setting.
    pub fn render(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let ulist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("experiment", self.kind.name().into());
        put("mesh_n", self.mesh_n.to_string());
        put("k", self.k.to_string());
        put("mu", self.mu.to_string());
        put("lambda", self.lambda.to_string());
        put("a11", self.a[(0, 0)].to_string());
        put("a12", self.a[(0, 1)].to_string());
        put("a22", self.a[(1, 1)].to_string());
        put("gamma0", self.gamma0.to_string());
        put("gamma1", self.gamma1.to_string());
        put("epsilon", self.epsilon.to_string());
        put("epsilons", list(&self.epsilons));
        put("samples", self.samples.to_string());
        put("modes", self.modes.to_string());
        put("timing_modes", ulist(&self.timing_modes));
        put("meshes", ulist(&self.meshes));
        put("seed", self.seed.to_string());
        put(
            "source",
            match self.source {
                SourceKind::Oscillatory => "oscillatory",
                SourceKind::OscillatoryUnit => "oscillatory-unit",
                SourceKind::Perturbed => "perturbed",
            }
            .into(),
        );
        put(
            "eta",
            match self.eta {
                EtaStream::Sampled => "sampled".into(),
                EtaStream::Zero => "zero".into(),
                EtaStream::Frozen(i) => format!("frozen:{i}"),
            },
        );
        put(
            "eta_bound",
            match self.eta_bound {
                EtaBound::Clamp => "clamp",
                EtaBound::Rescale => "rescale",
            }
            .into(),
        );
        put("shared_samples", self.shared_samples.to_string());
        put(
            "boundary_alpha",
            match self.boundary_alpha {
                BoundaryAlpha::Unit => "unit",
                BoundaryAlpha::Element => "element",
            }
            .into(),
        );
        put("boundary_mask", self.boundary_mask.to_string());
        put(
            "covariance",
            match self.covariance {
                CovarianceKind::Exponential => "exponential",
                CovarianceKind::SquaredExponential => "squared-exponential",
            }
            .into(),
        );
        put("correlation_length", self.correlation_length.to_string());
        put(
            "truncation",
            match self.truncation {
                Truncation::Auto => "auto".into(),
                Truncation::Full => "full".into(),
                Truncation::Rank(r) => r.to_string(),
            },
        );
        put("quad_degree", self.quad_degree.to_string());
        put("grid", self.grid.to_string());
        put("out", self.out.display().to_string());
        s
    }
}

const KEYS: &[&str] = &[
    "experiment",
    "mesh_n",
    "h",
    "k",
    "mu",
    "lambda",
    "a11",
    "a12",
    "a22",
    "gamma0",
    "gamma1",
    "epsilon",
    "epsilons",
    "samples",
    "modes",
    "timing_modes",
    "meshes",
    "seed",
    "source",
    "eta",
    "eta_bound",
    "shared_samples",
    "boundary_alpha",
    "boundary_mask",
    "covariance",
    "correlation_length",
    "truncation",
    "quad_degree",
    "grid",
    "out",
];

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse '{v}'"))
}

fn parse_list<T: FromStr>(v: &str) -> std::result::Result<Vec<T>, String> {
    v.split(',').map(|s| parse_num(s.trim())).collect()
}

/// `"1/20"` or `"0.05"` → 20.
fn parse_h(v: &str) -> std::result::Result<usize, String> {
    let h = match v.split_once('/') {
        Some((a, b)) => parse_num::<f64>(a.trim())? / parse_num::<f64>(b.trim())?,
        None => parse_num::<f64>(v)?,
    };
    if !(h.is_finite() && h > 0.0) {
        return Err(format!("mesh size must be positive, got '{v}'"));
    }
    let n = (1.0 / h).round();
    if (n * h - 1.0).abs() > 1e-9 || n < 1.0 {
        return Err(format!("1/h must be an integer, got h = {h}"));
    }
    Ok(n as usize)
}
