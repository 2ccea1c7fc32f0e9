//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;

use crate::error::{Result, SpecError};
use crate::isentropic::PressureLaw;
use crate::timestepping::DEFAULT_CFL;

/// Registered experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Experiment {
    LinearWeakInstability,
    LinearResolvedDecay,
    BurgersSmoothRate,
    BurgersPostshockTv,
    BurgersSv,
    Euler2dConserve,
    Euler2dTaylorGreen,
    IsentropicEntropy,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Self::LinearWeakInstability,
        Self::LinearResolvedDecay,
        Self::BurgersSmoothRate,
        Self::BurgersPostshockTv,
        Self::BurgersSv,
        Self::Euler2dConserve,
        Self::Euler2dTaylorGreen,
        Self::IsentropicEntropy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::LinearWeakInstability => "linear-weak-instability",
            Self::LinearResolvedDecay => "linear-resolved-decay",
            Self::BurgersSmoothRate => "burgers-smooth-rate",
            Self::BurgersPostshockTv => "burgers-postshock-tv",
            Self::BurgersSv => "burgers-sv",
            Self::Euler2dConserve => "euler2d-conserve",
            Self::Euler2dTaylorGreen => "euler2d-taylor-green",
            Self::IsentropicEntropy => "isentropic-entropy",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::LinearWeakInstability => "u_t + (qu)_x = 0, q = -sin x, under-resolved bump data: growth of max |b_k|",
            Self::LinearResolvedDecay => "u_t + (qu)_x = 0, q = -sin x, b_k(0) = k^-3: decay of the top mode",
            Self::BurgersSmoothRate => "Burgers before the shock: error against the exact solution and fitted rate",
            Self::BurgersPostshockTv => "Burgers after the shock, 2/3 method: TV(u_m) and max|u_m| TV^2 / sqrt(m)",
            Self::BurgersSv => "Burgers after the shock, spectral viscosity: distance to a Godunov reference",
            Self::Euler2dConserve => "2D Euler: drift of the conserved energy and divergence",
            Self::Euler2dTaylorGreen => "2D Euler: stationarity of the Taylor-Green vortex",
            Self::IsentropicEntropy => "Lagrangian isentropic system: total entropy drift",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|e| e.name()).collect();
            SpecError::Config(format!("unknown experiment '{s}'; registered: {}", names.join(", ")))
        })
    }

    /// Variants the experiment accepts.
    pub fn allowed_variants(&self) -> &'static [Variant] {
        use Variant::*;
        match self {
            Self::LinearWeakInstability | Self::LinearResolvedDecay => &[Pseudospectral, LastModeZero, Spectral, TwoThirds],
            Self::BurgersSmoothRate | Self::BurgersPostshockTv | Self::BurgersSv => &[Spectral, TwoThirds, Sv],
            Self::Euler2dConserve | Self::Euler2dTaylorGreen => &[Spectral, TwoThirds, Sv],
            Self::IsentropicEntropy => &[Spectral],
        }
    }

    pub fn defaults(&self) -> ExperimentConfig {
        use Variant::*;
        let (variants, n_list, t_end, initial): (Vec<Variant>, Vec<usize>, f64, &str) = match self {
            Self::LinearWeakInstability => (vec![Pseudospectral, LastModeZero], vec![100, 200, 400], 1.0, "bump"),
            Self::LinearResolvedDecay => (vec![Pseudospectral], vec![100, 200, 400, 800], 3.0, "cubic"),
            Self::BurgersSmoothRate => (vec![Spectral, TwoThirds], vec![16, 32, 64], 1.0, "sin:0.5"),
            Self::BurgersPostshockTv => (vec![TwoThirds], vec![64, 128, 256, 512], 2.0, "sin:1"),
            Self::BurgersSv => (vec![Sv], vec![64, 128, 256], 2.0, "sin:1"),
            Self::Euler2dConserve => (vec![Spectral, TwoThirds], vec![128], 2.0, "shear_layer_smooth"),
            Self::Euler2dTaylorGreen => (vec![Spectral, TwoThirds], vec![32], 1.0, "taylor_green"),
            Self::IsentropicEntropy => (vec![Spectral], vec![64], 1.0, "wave:0.1"),
        };
        ExperimentConfig {
            experiment: *self,
            variants,
            n_list,
            dt: None,
            cfl: DEFAULT_CFL,
            t_end,
            snapshots: None,
            initial: initial.to_string(),
            order: 1,
            law: PressureLaw::Exponential,
            reference_cells: 1 << 14,
            seed: 1,
            out: PathBuf::from("out").join(self.name()),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Solver variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Spectral,
    Pseudospectral,
    TwoThirds,
    Sv,
    /// Pseudo-spectral with the top mode held at zero.
    LastModeZero,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectral => "spectral",
            Self::Pseudospectral => "pseudospectral",
            Self::TwoThirds => "two-thirds",
            Self::Sv => "sv",
            Self::LastModeZero => "last-mode-zero",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Spectral, Self::Pseudospectral, Self::TwoThirds, Self::Sv, Self::LastModeZero]
            .into_iter()
            .find(|v| v.name() == s)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One experiment invocation: a sweep over `variants × n_list`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub variants: Vec<Variant>,
    pub n_list: Vec<usize>,
    /// `None` selects the CFL-based default per run.
    pub dt: Option<f64>,
    pub cfl: f64,
    pub t_end: f64,
    /// `None` records at `0, t/4, t/2, 3t/4, t`.
    pub snapshots: Option<Vec<f64>>,
    pub initial: String,
    /// Spectral viscosity order `r`.
    pub order: u32,
    pub law: PressureLaw,
    /// Cells of the Godunov reference.
    pub reference_cells: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Keys in emission order.
pub const KEYS: [&str; 13] = [
    "experiment",
    "variant",
    "N",
    "dt",
    "cfl",
    "tend",
    "snapshots",
    "initial",
    "r",
    "law",
    "reference_cells",
    "seed",
    "out",
];

fn bad(key: &str, value: &str, what: &str) -> SpecError {
    SpecError::Config(format!("{key} = {value}: {what}"))
}

fn parse_list<T>(key: &str, value: &str, item: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    let out: Option<Vec<T>> = value.split(',').map(|s| item(s.trim())).collect();
    match out {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(bad(key, value, "expected a comma-separated list")),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(key, value, "not a number"))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Splits the text into `(line, key, value)` entries. Unknown keys, repeated
/// keys and lines without `=` are errors carrying the line number.
pub fn parse_entries(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| SpecError::Config(format!("line {line_no}: expected 'key = value', got '{line}'")))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(SpecError::Config(format!(
                "line {line_no}: unknown key '{k}'; known keys: {}",
                KEYS.join(", ")
            )));
        }
        if v.is_empty() {
            return Err(SpecError::Config(format!("line {line_no}: empty value for '{k}'")));
        }
        if out.iter().any(|e| e.1 == k) {
            return Err(SpecError::Config(format!("line {line_no}: '{k}' given twice")));
        }
        out.push((line_no, k.to_string(), v.to_string()));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => {
                let e = Experiment::parse(value)?;
                if e != self.experiment {
                    return Err(bad(key, value, "experiment must be chosen before other keys"));
                }
            }
            "variant" => self.variants = parse_list(key, value, Variant::parse)?,
            "N" => self.n_list = parse_list(key, value, |s| s.parse().ok())?,
            "dt" => self.dt = if value == "auto" { None } else { Some(parse_num(key, value)?) },
            "cfl" => self.cfl = parse_num(key, value)?,
            "tend" => self.t_end = parse_num(key, value)?,
            "snapshots" => {
                self.snapshots = if value == "auto" {
                    None
                } else {
                    Some(parse_list(key, value, |s| s.parse().ok())?)
                }
            }
            "initial" => self.initial = value.to_string(),
            "r" => self.order = parse_num(key, value)?,
            "law" => self.law = PressureLaw::parse(value).ok_or_else(|| bad(key, value, "expected linear, exp or gamma:<g> with g > 1"))?,
            "reference_cells" => self.reference_cells = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            _ => return Err(SpecError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Checks the invariants that individual keys cannot.
    pub fn validate(&self) -> Result<()> {
        let allowed = self.experiment.allowed_variants();
        for v in &self.variants {
            if !allowed.contains(v) {
                return Err(SpecError::Config(format!(
                    "variant '{v}' is not available for {}; allowed: {}",
                    self.experiment,
                    join(allowed)
                )));
            }
        }
        if self.n_list.is_empty() || self.n_list.iter().any(|&n| n < 3) {
            return Err(SpecError::Config(format!("N must be a nonempty list of degrees >= 3, got {}", join(&self.n_list))));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SpecError::Config(format!("tend must be >= 0, got {}", self.t_end)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(SpecError::Config(format!("dt must be positive, got {dt}")));
            }
        }
        if !(self.cfl > 0.0 && self.cfl.is_finite()) {
            return Err(SpecError::Config(format!("cfl must be positive, got {}", self.cfl)));
        }
        if let Some(s) = &self.snapshots {
            if s.iter().any(|&t| !(t >= 0.0 && t <= self.t_end)) {
                return Err(SpecError::Config(format!("snapshot times must lie in [0, tend], got {}", join(s))));
            }
        }
        if self.order < 1 {
            return Err(SpecError::Config("r must be >= 1".into()));
        }
        if self.reference_cells < 128 {
            return Err(SpecError::Config(format!("reference_cells must be >= 128, got {}", self.reference_cells)));
        }
        super::experiments::check_initial(self)
    }

    /// Recording times: sorted, deduplicated, always containing `0` and `tend`.
    pub fn snapshot_times(&self) -> Vec<f64> {
        let mut t: Vec<f64> = match &self.snapshots {
            Some(s) => s.clone(),
            None => (0..=4).map(|i| self.t_end * i as f64 / 4.0).collect(),
        };
        t.push(0.0);
        t.push(self.t_end);
        t.sort_by(|a, b| a.total_cmp(b));
        t.dedup();
        t
    }

    /// Canonical text form; parsing it gives back `self`.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        for key in KEYS {
            s.push_str(key);
            s.push_str(" = ");
            s.push_str(&self.value_of(key));
            s.push('\n');
        }
        s
    }

    /// `(key, value)` pairs in emission order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        KEYS.iter().map(|&k| (k, self.value_of(k))).collect()
    }

    fn value_of(&self, key: &str) -> String {
        match key {
            "experiment" => self.experiment.to_string(),
            "variant" => join(&self.variants),
            "N" => join(&self.n_list),
            "dt" => self.dt.map_or("auto".into(), |d| d.to_string()),
            "cfl" => self.cfl.to_string(),
            "tend" => self.t_end.to_string(),
            "snapshots" => self.snapshots.as_ref().map_or("auto".into(), |s| join(s)),
            "initial" => self.initial.clone(),
            "r" => self.order.to_string(),
            "law" => self.law.to_string(),
            "reference_cells" => self.reference_cells.to_string(),
            "seed" => self.seed.to_string(),
            "out" => self.out.display().to_string(),
            _ => unreachable!("not a config key: {key}"),
        }
    }
}

/// Builds a config from file text and command-line overrides. The experiment
/// comes from `experiment` when given, else from the text; the remaining keys
/// start at that experiment's defaults, then the text, then the overrides.
pub fn build_config(experiment: Option<&str>, text: &str, overrides: &[(&str, String)]) -> Result<ExperimentConfig> {
    let entries = parse_entries(text)?;
    let from_text = entries.iter().find(|e| e.1 == "experiment").map(|e| e.2.as_str());
    let name = experiment
        .or(from_text)
        .ok_or_else(|| SpecError::Config("no experiment given".into()))?;
    let mut cfg = Experiment::parse(name)?.defaults();
    for (line, k, v) in &entries {
        if k == "experiment" {
            continue;
        }
        cfg.set(k, v).map_err(|e| SpecError::Config(format!("line {line}: {}", strip(e))))?;
    }
    for (k, v) in overrides {
        if *k == "experiment" {
            continue;
        }
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn strip(e: SpecError) -> String {
    match e {
        SpecError::Config(m) => m,
        other => other.to_string(),
    }
}

/// Parses a complete config file; the text must name the experiment.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    build_config(None, text, &[])
}
