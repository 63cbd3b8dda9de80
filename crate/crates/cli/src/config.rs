//! Run configuration: a TOML file with one `[section]` per run and flat keys
//! inside each section.
//!
//! ```toml
//! [fig1]
//! class = "I"
//! alpha = 2.0
//! z1 = 1.0
//! z2 = 4.0
//! a1 = 1.0
//! a2 = 0.5
//! times = [0.3, 0.4, 0.5]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use fpe_similarity::solutions::{build_solution, ModelSpec, SimilaritySolution, SolutionClass};
use serde::{Deserialize, Serialize};
use toml::Spanned;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{origin}:{line}:{column}: {message}")]
    At { origin: String, line: usize, column: usize, message: String },
    #[error("{origin}: {message}")]
    General { origin: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassTag {
    I,
    II,
    III,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::I => "I",
            ClassTag::II => "II",
            ClassTag::III => "III",
        })
    }
}

impl std::str::FromStr for ClassTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ClassTag::I),
            "II" | "2" => Ok(ClassTag::II),
            "III" | "3" => Ok(ClassTag::III),
            other => Err(format!("unknown class {other:?}; expected \"I\", \"II\" or \"III\"")),
        }
    }
}

/// One validated run. Field order is the order keys are written out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub name: String,
    pub class: ClassTag,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z2: Option<f64>,
    pub a1: f64,
    pub a2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub mirrored: bool,
    pub times: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    /// Finest PDE grid; the refinement study also uses n/2 and n/4.
    pub n_cells: usize,
    /// Monte Carlo paths; 0 skips the sampling check.
    pub n_paths: usize,
    pub seed: u64,
    /// x-grid points per time in `eval`.
    pub n_points: usize,
    pub n_bins: usize,
    pub dt: f64,
    /// Builds ρ₁ from a1 + offset instead of a1 (mutation testing).
    pub drift_a1_offset: f64,
    pub tol_mass: f64,
    pub tol_identity: f64,
    pub tol_ratio: f64,
    pub tol_pde_l1: f64,
    pub tol_mc_l1: f64,
    pub tol_order: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    class: Spanned<String>,
    alpha: Spanned<f64>,
    z1: Option<Spanned<f64>>,
    z2: Option<Spanned<f64>>,
    a1: Spanned<f64>,
    a2: Spanned<f64>,
    beta: Option<Spanned<f64>>,
    mirrored: Option<bool>,
    times: Spanned<Vec<f64>>,
    output: Option<String>,
    n_cells: Option<Spanned<usize>>,
    n_paths: Option<usize>,
    seed: Option<u64>,
    n_points: Option<Spanned<usize>>,
    n_bins: Option<Spanned<usize>>,
    dt: Option<Spanned<f64>>,
    drift_a1_offset: Option<Spanned<f64>>,
    tol_mass: Option<Spanned<f64>>,
    tol_identity: Option<Spanned<f64>>,
    tol_ratio: Option<Spanned<f64>>,
    tol_pde_l1: Option<Spanned<f64>>,
    tol_mc_l1: Option<Spanned<f64>>,
    tol_order: Option<Spanned<f64>>,
}

struct Source<'a> {
    origin: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn at(&self, span: Range<usize>, message: impl Into<String>) -> ConfigError {
        let before = &self.text[..span.start.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        ConfigError::At { origin: self.origin.to_string(), line, column, message: message.into() }
    }
}

/// Parses every run in `text`; `origin` names the source in messages.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<RunConfig>, ConfigError> {
    let src = Source { origin, text };
    let raw: BTreeMap<String, Spanned<RawRun>> = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => src.at(span, e.message().to_string()),
        None => ConfigError::General { origin: origin.to_string(), message: e.message().to_string() },
    })?;
    if raw.is_empty() {
        return Err(ConfigError::General { origin: origin.to_string(), message: "no [run] sections".into() });
    }
    raw.into_iter().map(|(name, run)| validate(&src, name, run)).collect()
}

pub fn load_config(path: &Path) -> Result<Vec<RunConfig>, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_config(&text, &path.display().to_string())
}

/// Serializes runs to the same format `parse_config` reads.
pub fn write_config(runs: &[RunConfig]) -> String {
    let mut out = String::new();
    for run in runs {
        let mut table = toml::Table::new();
        table.insert(run.name.clone(), toml::Value::try_from(run).expect("run config serializes"));
        out.push_str(&toml::to_string(&table).expect("run config serializes"));
        out.push('\n');
    }
    out
}

fn positive(src: &Source, v: &Option<Spanned<f64>>, name: &str, default: f64) -> Result<f64, ConfigError> {
    match v {
        None => Ok(default),
        Some(s) if *s.get_ref() > 0.0 && s.get_ref().is_finite() => Ok(*s.get_ref()),
        Some(s) => Err(src.at(s.span(), format!("{name} must be positive and finite, got {}", s.get_ref()))),
    }
}

fn validate(src: &Source, name: String, run: Spanned<RawRun>) -> Result<RunConfig, ConfigError> {
    let section = run.span();
    let run = run.into_inner();
    let class: ClassTag = run.class.get_ref().parse().map_err(|m: String| src.at(run.class.span(), m))?;

    let alpha = *run.alpha.get_ref();
    if !(alpha.is_finite() && alpha != 0.0) {
        return Err(src.at(run.alpha.span(), format!("alpha must be finite and nonzero, got {alpha}")));
    }
    for (v, key) in [(&run.a1, "a1"), (&run.a2, "a2")] {
        if !(*v.get_ref() > 0.0 && v.get_ref().is_finite()) {
            return Err(src.at(v.span(), format!("{key} must be positive, got {}", v.get_ref())));
        }
    }
    let (needed, forbidden): (&[&str], &str) = match class {
        ClassTag::I => (&["z1", "z2"], "beta"),
        ClassTag::II => (&["z2", "beta"], "z1"),
        ClassTag::III => (&["z1", "beta"], "z2"),
    };
    let lookup = |key: &str| match key {
        "z1" => &run.z1,
        "z2" => &run.z2,
        _ => &run.beta,
    };
    for key in needed {
        match lookup(key) {
            None => return Err(src.at(section.clone(), format!("[{name}]: Class {class} needs `{key}`"))),
            Some(v) if !v.get_ref().is_finite() => {
                return Err(src.at(v.span(), format!("{key} must be finite")));
            }
            _ => {}
        }
    }
    if let Some(v) = lookup(forbidden) {
        return Err(src.at(v.span(), format!("`{forbidden}` is not a Class {class} parameter")));
    }
    let get = |v: &Option<Spanned<f64>>| v.as_ref().map(|s| *s.get_ref());
    let (z1, z2, beta) = (get(&run.z1), get(&run.z2), get(&run.beta));
    match class {
        ClassTag::I => {
            let z2s = run.z2.as_ref().unwrap();
            if !(z1.unwrap() < z2.unwrap()) {
                return Err(src
                    .at(z2s.span(), format!("Class I needs z1 < z2, got z1 = {}, z2 = {}", z1.unwrap(), z2.unwrap())));
            }
        }
        ClassTag::II => {
            if !(z2.unwrap() > 0.0) {
                return Err(src.at(run.z2.as_ref().unwrap().span(), "Class II needs z2 > 0"));
            }
        }
        ClassTag::III => {
            if !(z1.unwrap() >= 0.0) {
                return Err(src.at(run.z1.as_ref().unwrap().span(), "Class III needs z1 >= 0"));
            }
            if !(beta.unwrap() > 0.0) {
                return Err(src.at(run.beta.as_ref().unwrap().span(), "Class III needs beta > 0"));
            }
        }
    }

    let times = run.times.get_ref().clone();
    if times.is_empty() {
        return Err(src.at(run.times.span(), "times must not be empty"));
    }
    if times.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(src.at(run.times.span(), "all times must be positive and finite"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(src.at(run.times.span(), "times must be strictly increasing"));
    }

    let n_cells = run.n_cells.as_ref().map_or(400, |s| *s.get_ref());
    if n_cells < 16 || !n_cells.is_multiple_of(4) {
        let span = run.n_cells.as_ref().map_or(section.clone(), |s| s.span());
        return Err(src.at(span, format!("n_cells must be a multiple of 4 and at least 16, got {n_cells}")));
    }
    let n_points = run.n_points.as_ref().map_or(201, |s| *s.get_ref());
    if n_points < 2 {
        return Err(src.at(run.n_points.as_ref().unwrap().span(), "n_points must be at least 2"));
    }
    let n_bins = run.n_bins.as_ref().map_or(60, |s| *s.get_ref());
    if n_bins < 10 {
        return Err(src.at(run.n_bins.as_ref().unwrap().span(), "n_bins must be at least 10"));
    }
    let drift_a1_offset = run.drift_a1_offset.as_ref().map_or(0.0, |s| *s.get_ref());
    if !(drift_a1_offset.is_finite() && *run.a1.get_ref() + drift_a1_offset > 0.0) {
        return Err(src.at(run.drift_a1_offset.as_ref().unwrap().span(), "a1 + drift_a1_offset must be positive"));
    }

    let config = RunConfig {
        name,
        class,
        alpha,
        z1,
        z2,
        a1: *run.a1.get_ref(),
        a2: *run.a2.get_ref(),
        beta,
        mirrored: run.mirrored.unwrap_or(false),
        times,
        output: run.output,
        n_cells,
        n_paths: run.n_paths.unwrap_or(0),
        seed: run.seed.unwrap_or(1),
        n_points,
        n_bins,
        dt: positive(src, &run.dt, "dt", 1e-3)?,
        drift_a1_offset,
        tol_mass: positive(src, &run.tol_mass, "tol_mass", 1e-8)?,
        tol_identity: positive(src, &run.tol_identity, "tol_identity", 1e-10)?,
        tol_ratio: positive(src, &run.tol_ratio, "tol_ratio", 0.4)?,
        tol_pde_l1: positive(src, &run.tol_pde_l1, "tol_pde_l1", 1e-3)?,
        tol_mc_l1: positive(src, &run.tol_mc_l1, "tol_mc_l1", 0.05)?,
        tol_order: positive(src, &run.tol_order, "tol_order", 0.2)?,
    };
    config.class_params().validate().map_err(|e| src.at(section, format!("[{}]: {e}", config.name)))?;
    Ok(config)
}

impl RunConfig {
    pub fn class_params(&self) -> SolutionClass {
        self.class_with_a1(self.a1)
    }

    fn class_with_a1(&self, a1: f64) -> SolutionClass {
        let (a2, nan) = (self.a2, f64::NAN);
        match self.class {
            ClassTag::I => SolutionClass::ClassI { z1: self.z1.unwrap_or(nan), z2: self.z2.unwrap_or(nan), a1, a2 },
            ClassTag::II => {
                SolutionClass::ClassII { z2: self.z2.unwrap_or(nan), a1, a2, beta: self.beta.unwrap_or(nan) }
            }
            ClassTag::III => {
                SolutionClass::ClassIII { z1: self.z1.unwrap_or(nan), a1, a2, beta: self.beta.unwrap_or(nan) }
            }
        }
    }

    pub fn model(&self) -> ModelSpec {
        let spec = ModelSpec::from(self.class_params());
        if self.mirrored {
            spec.reflect()
        } else {
            spec
        }
    }

    /// The solvable model, with ρ₁ replaced by the drift of the a1 +
    /// `drift_a1_offset` model when the offset is nonzero.
    pub fn build(&self) -> fpe_similarity::Result<SimilaritySolution> {
        let sol = build_solution(self.alpha, self.model())?;
        if self.drift_a1_offset == 0.0 {
            return Ok(sol);
        }
        let mut donor = ModelSpec::from(self.class_with_a1(self.a1 + self.drift_a1_offset));
        if self.mirrored {
            donor = donor.reflect();
        }
        let donor = build_solution(self.alpha, donor)?;
        Ok(sol.with_drift(donor.profile().rho1.clone()))
    }
}
