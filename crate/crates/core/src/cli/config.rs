//! Study configuration file (TOML). Relative paths resolve against the
//! directory holding the file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::grid::{Case, DlrCoefficients, GridModel, RenewableKind, DEFAULT_THETA_BOUND};
use crate::milp::SolverConfig;
use crate::profiles::{BuildOptions, TerminalPolicy};
use crate::scuc::{ScucOptions, DEFAULT_SHED_PENALTY};
use crate::tep::Variant;

fn all_cases() -> Vec<Case> {
    Case::ALL.to_vec()
}

fn yes() -> bool {
    true
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_theta() -> f64 {
    DEFAULT_THETA_BOUND
}

fn default_penalty() -> f64 {
    DEFAULT_SHED_PENALTY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(default = "all_cases")]
    pub cases: Vec<Case>,
    pub paths: StudyPaths,
    #[serde(default)]
    pub profiles: ProfileConfig,
    #[serde(default)]
    pub tep: TepConfig,
    #[serde(default)]
    pub scuc: ScucConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyPaths {
    pub grid: PathBuf,
    #[serde(default)]
    pub weather: Option<PathBuf>,
    #[serde(default)]
    pub load: Option<PathBuf>,
    /// Generation-investment file; absent means no new units.
    #[serde(default)]
    pub generation: Option<PathBuf>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    #[serde(default)]
    pub policy: TerminalPolicy,
    #[serde(default = "yes")]
    pub require_full_coverage: bool,
    /// Rating model for lines that carry no coefficients of their own.
    #[serde(default)]
    pub dlr: Option<DlrCoefficients>,
    /// Applied to every wind plant.
    #[serde(default)]
    pub hub_height_m: Option<f64>,
    #[serde(default)]
    pub roughness_m: Option<f64>,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            policy: TerminalPolicy::default(),
            require_full_coverage: true,
            dlr: None,
            hub_height_m: None,
            roughness_m: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum VariantChoice {
    #[default]
    Ci,
    Traditional,
    Both,
}

impl VariantChoice {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::Ci => vec![Variant::Ci],
            VariantChoice::Traditional => vec![Variant::Traditional],
            VariantChoice::Both => vec![Variant::Ci, Variant::Traditional],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default)]
    pub relative_gap: Option<f64>,
    #[serde(default)]
    pub node_limit: Option<usize>,
    /// Seconds per solve.
    #[serde(default)]
    pub time_limit: Option<f64>,
}

impl SolverSettings {
    pub fn to_config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(g) = self.relative_gap {
            c.relative_gap = g;
        }
        if let Some(n) = self.node_limit {
            c.node_limit = n;
        }
        c.time_limit = self.time_limit;
        c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TepConfig {
    #[serde(default)]
    pub variant: VariantChoice,
    /// Fleet the plan is made for: FR (existing units) or FGI.
    #[serde(default = "fgi")]
    pub case: Case,
    #[serde(default = "default_theta")]
    pub theta_bound: f64,
    #[serde(default)]
    pub shed_allowed: bool,
    #[serde(default = "default_penalty")]
    pub shed_penalty: f64,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn fgi() -> Case {
    Case::FGI
}

impl Default for TepConfig {
    fn default() -> Self {
        TepConfig {
            variant: VariantChoice::Ci,
            case: Case::FGI,
            theta_bound: DEFAULT_THETA_BOUND,
            shed_allowed: false,
            shed_penalty: DEFAULT_SHED_PENALTY,
            solver: SolverSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScucConfig {
    #[serde(default = "default_penalty")]
    pub shed_penalty: f64,
    #[serde(default)]
    pub reserve_required: bool,
    /// Units on before the first interval; all others start off.
    #[serde(default)]
    pub initially_on: Vec<String>,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl Default for ScucConfig {
    fn default() -> Self {
        ScucConfig {
            shed_penalty: DEFAULT_SHED_PENALTY,
            reserve_required: false,
            initially_on: Vec::new(),
            solver: SolverSettings::default(),
        }
    }
}

impl ScucConfig {
    pub fn options(&self) -> ScucOptions {
        ScucOptions {
            shed_penalty: self.shed_penalty,
            reserve_required: self.reserve_required,
            initially_on: self.initially_on.clone(),
        }
    }
}

impl ProfileConfig {
    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            policy: self.policy,
            require_full_coverage: self.require_full_coverage,
        }
    }

    /// Push the model overrides into the grid.
    pub fn apply(&self, grid: &mut GridModel) {
        if let Some(d) = &self.dlr {
            for l in grid.lines.iter_mut().filter(|l| l.dlr.is_none()) {
                l.dlr = Some(d.clone());
            }
        }
        for r in grid.renewables.iter_mut().filter(|r| r.kind == RenewableKind::Wind) {
            if let Some(h) = self.hub_height_m {
                r.hub_height_m = h;
            }
            if let Some(z) = self.roughness_m {
                r.roughness_m = z;
            }
        }
    }
}

impl StudyConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: StudyConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.paths.resolve(base);
        Ok(cfg)
    }

    /// Every range violation, one line each.
    pub fn problems(&self) -> Vec<String> {
        let mut e = Vec::new();
        if self.cases.is_empty() {
            e.push("cases must name at least one of FR, FGI, FGTI".to_string());
        }
        let mut seen = self.cases.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.cases.len() {
            e.push("cases lists a case twice".into());
        }
        if !(self.tep.theta_bound > 0.0 && self.tep.theta_bound <= std::f64::consts::FRAC_PI_2) {
            e.push(format!("tep.theta_bound {} outside (0, pi/2]", self.tep.theta_bound));
        }
        if self.tep.case == Case::FGTI {
            e.push("tep.case must be FR or FGI; FGTI is the outcome of planning".into());
        }
        for (what, v) in [("tep.shed_penalty", self.tep.shed_penalty), ("scuc.shed_penalty", self.scuc.shed_penalty)] {
            if !(v > 0.0 && v.is_finite()) {
                e.push(format!("{what} must be positive"));
            }
        }
        for (what, s) in [("tep.solver", &self.tep.solver), ("scuc.solver", &self.scuc.solver)] {
            if let Err(m) = s.to_config().validate() {
                e.push(format!("{what}: {m}"));
            }
        }
        if let Some(d) = &self.profiles.dlr {
            e.extend(d.check().into_iter().map(|m| format!("profiles.dlr: {m}")));
        }
        if let Some(z) = self.profiles.roughness_m {
            if !(z > 0.0 && z <= 2.0) {
                e.push(format!("profiles.roughness_m {z} outside (0, 2]"));
            }
        }
        if let Some(h) = self.profiles.hub_height_m {
            if !(h > self.profiles.roughness_m.unwrap_or(0.0) && h.is_finite()) {
                e.push(format!("profiles.hub_height_m {h} must exceed the roughness length"));
            }
        }
        e
    }
}

impl StudyPaths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.grid);
        fix(&mut self.output);
        for p in [&mut self.weather, &mut self.load, &mut self.generation].into_iter().flatten() {
            fix(p);
        }
    }
}
