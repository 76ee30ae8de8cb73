//! Scenario files (TOML). Unknown keys are rejected at every level.

use std::path::{Path, PathBuf};

use ctrwkit_core::processes::ProcessConfig;
use ctrwkit_core::rng::{InnovationLaw, InnovationMode, WaitingLaw};
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Simulate,
    Attraction,
    Gd,
    Gdca,
    Gdci,
    Integrals,
    Adversarial,
    Sde,
    Sdde,
    Metrics,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Simulate => "simulate",
            Kind::Attraction => "attraction",
            Kind::Gd => "gd",
            Kind::Gdca => "gdca",
            Kind::Gdci => "gdci",
            Kind::Integrals => "integrals",
            Kind::Adversarial => "adversarial",
            Kind::Sde => "sde",
            Kind::Sdde => "sdde",
            Kind::Metrics => "metrics",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Symmetric,
    Centered,
    Raw,
    Gaussian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pareto,
    Compensated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingSpec {
    #[default]
    Uncoupled,
    Magnitude,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaitingSpec {
    pub beta: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "default_family")]
    pub family: Family,
}

fn default_family() -> Family {
    Family::Pareto
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub alpha: f64,
    pub mode: Mode,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default = "unit_coefficients")]
    pub coefficients: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub past_horizon: Option<usize>,
    #[serde(default)]
    pub coupling: CouplingSpec,
    /// Absent for a moving average.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waiting: Option<WaitingSpec>,
}

fn unit_coefficients() -> Vec<f64> {
    vec![1.0]
}

impl ProcessSpec {
    pub fn build(&self, n: u64) -> Result<ProcessConfig> {
        let mode = match self.mode {
            Mode::Symmetric => InnovationMode::Symmetric,
            Mode::Centered => InnovationMode::Centered,
            Mode::Raw => InnovationMode::Raw,
            Mode::Gaussian => InnovationMode::Gaussian,
        };
        let law = InnovationLaw::new(self.alpha, mode, self.scale)?;
        let c = self.coefficients.clone();
        let mut cfg = match &self.waiting {
            None => ProcessConfig::moving_average(law, c, n)?,
            Some(w) => {
                let wl = match w.family {
                    Family::Pareto => WaitingLaw::new(w.beta, w.scale)?,
                    Family::Compensated => WaitingLaw::compensated(w.beta, w.scale)?,
                };
                ProcessConfig::ctrw(law, wl, c, n)?
            }
        };
        if self.coupling == CouplingSpec::Magnitude {
            cfg = cfg.coupled()?;
        }
        if let Some(p) = self.past_horizon {
            if p < cfg.order() {
                return Err(config(format!("past_horizon {p} is below the coefficient order {}", cfg.order())));
            }
            cfg = cfg.with_past_horizon(p);
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Directory for per-path CSVs (simulate only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<PathBuf>,
}

/// Reference simulation of limit processes on a uniform grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitSpec {
    /// Grid step; defaults to horizon / 4096.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Number of limit samples; defaults to `reps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdSpec {
    /// Truncation level a.
    pub a: f64,
    pub r_grid: Vec<f64>,
    pub c_grid: Vec<f64>,
    #[serde(default = "default_bn_reps")]
    pub bn_reps: usize,
}

fn default_bn_reps() -> usize {
    100_000
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdcaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GdciSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Threshold multiplier K in the moment sums.
    #[serde(default = "default_k")]
    pub k: f64,
}

fn default_k() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegralSpec {
    /// `const`, `lipschitz`, `adversarial` or `deterministic:<expr in t>`.
    pub integrand: String,
    /// Value of the `const` integrand.
    #[serde(default = "one")]
    pub value: f64,
    /// g(y) of the `lipschitz` integrand.
    #[serde(default = "default_base")]
    pub base: String,
    /// sup |g|.
    #[serde(default = "one")]
    pub base_sup: f64,
    /// Lipschitz constant multiplier C.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Defaults to 0.5·β/α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub compare_limit: bool,
}

fn default_base() -> String {
    "tanh(y)".into()
}

fn default_c() -> f64 {
    20.0
}

fn default_m() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub k: f64,
    pub c: f64,
    pub p: f64,
}

/// dX = b dt + μ dD + σ dZ with coefficients in t, ytilde (= D) and y (= X).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeSection {
    pub b: String,
    pub mu: String,
    pub sigma: String,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "default_mesh")]
    pub mesh_divisions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthSpec>,
    #[serde(default)]
    pub compare_limit: bool,
}

fn default_mesh() -> usize {
    ctrwkit_core::sde::DEFAULT_MESH_DIVISIONS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    /// Φ(t, s, y).
    pub phi: String,
    pub bound: f64,
    pub lipschitz: f64,
}

/// dX = b(t, X_{t-r}) dt + σ(t, X_{t-r}) dZ with η constant on [-r, 0].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SddeSection {
    pub b: String,
    pub sigma: String,
    pub delay: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_mesh")]
    pub mesh_divisions: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelSpec>,
    #[serde(default)]
    pub compare_limit: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<PathBuf>,
    /// Horizon of both paths; defaults to the later last breakpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    /// Evaluate the M1/J1 separation witness for each n instead of files.
    #[serde(default)]
    pub witness: bool,
}

fn default_resolution() -> usize {
    ctrwkit_core::metrics::DEFAULT_M1_RESOLUTION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub n: Vec<u64>,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Output>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub process: Option<ProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gd: Option<GdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gdca: Option<GdcaSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gdci: Option<GdciSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integral: Option<IntegralSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sde: Option<SdeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdde: Option<SddeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsSpec>,
}

fn default_reps() -> usize {
    1000
}

impl Scenario {
    /// Parse and validate. `kind` comes from the subcommand when given; a
    /// conflicting `kind` key in the file is an error.
    pub fn from_toml(text: &str, kind: Option<Kind>) -> Result<Self> {
        let sc = Self::parse(text, kind)?;
        sc.validate()?;
        Ok(sc)
    }

    /// Parse without the cross-field validation (for callers that patch the
    /// scenario before validating it).
    pub fn parse(text: &str, kind: Option<Kind>) -> Result<Self> {
        let mut sc: Scenario = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            if msg.contains("unknown field") {
                CliError::UnknownKey(msg)
            } else {
                config(e.to_string())
            }
        })?;
        match (sc.kind, kind) {
            (Some(a), Some(b)) if a != b => {
                return Err(config(format!("scenario kind `{}` does not match subcommand `{}`", a.name(), b.name())))
            }
            (None, None) => return Err(config("missing `kind`")),
            (None, Some(b)) => sc.kind = Some(b),
            _ => {}
        }
        Ok(sc)
    }

    pub fn load(path: &Path, kind: Option<Kind>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        Self::from_toml(&text, kind)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    pub fn kind(&self) -> Kind {
        self.kind.expect("validated scenario has a kind")
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind().name().to_string())
    }

    pub fn process(&self) -> Result<&ProcessSpec> {
        self.process.as_ref().ok_or_else(|| config("missing [process] section"))
    }

    pub fn limit_step(&self) -> f64 {
        self.limit.as_ref().and_then(|l| l.step).unwrap_or(self.horizon / 4096.0)
    }

    pub fn limit_reps(&self) -> usize {
        self.limit.as_ref().and_then(|l| l.reps).unwrap_or(self.reps)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind.ok_or_else(|| config("missing `kind`"))?;
        if self.reps == 0 {
            return Err(config("reps must be at least 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.n.contains(&0) {
            return Err(config("every n must be positive"));
        }
        if let Some(l) = &self.limit {
            if l.step.is_some_and(|s| !(s > 0.0 && s <= self.horizon)) {
                return Err(config("limit.step must lie in (0, horizon]"));
            }
            if l.reps == Some(0) {
                return Err(config("limit.reps must be at least 1"));
            }
        }
        let needs_process = !matches!(kind, Kind::Metrics);
        if needs_process {
            let p = self.process()?;
            p.build(self.n.first().copied().unwrap_or(1))?;
            if self.n.is_empty() {
                return Err(config(format!("kind `{}` needs a non-empty n list", kind.name())));
            }
        }
        let section = |present: bool, name: &str| {
            if present {
                Ok(())
            } else {
                Err(config(format!("kind `{}` needs a [{name}] section", kind.name())))
            }
        };
        match kind {
            Kind::Gd => section(self.gd.is_some(), "gd")?,
            Kind::Integrals => section(self.integral.is_some(), "integral")?,
            Kind::Sde => section(self.sde.is_some(), "sde")?,
            Kind::Sdde => section(self.sdde.is_some(), "sdde")?,
            Kind::Metrics => section(self.metrics.is_some(), "metrics")?,
            _ => {}
        }
        if let Some(i) = &self.integral {
            if !matches!(i.integrand.as_str(), "const" | "lipschitz" | "adversarial")
                && !i.integrand.starts_with("deterministic:")
            {
                return Err(config(format!("unknown integrand `{}`", i.integrand)));
            }
            if i.m == 0 || i.eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
                return Err(config("integral.m must be positive and every eps > 0"));
            }
        }
        if let Some(m) = &self.metrics {
            if !m.witness && (m.x.is_none() || m.y.is_none()) {
                return Err(config("metrics needs x and y paths, or witness = true"));
            }
            if m.witness && self.n.is_empty() {
                return Err(config("the metrics witness needs an n list"));
            }
        }
        Ok(())
    }
}
