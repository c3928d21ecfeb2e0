//! The TOML run description.

use std::fmt;
use std::path::{Path, PathBuf};

use plapmix_core::eigensolver::Direction;
use plapmix_core::{Domain, Grid, Kernel, LambdaCase, Profile, SolverOptions, WeightTable};
use serde::{Deserialize, Serialize};

/// `(R_Ω, R_J)` pairs covering the four cases of the `Λ` formula.
pub const CANONICAL_TUPLES: [[f64; 2]; 4] = [[3.0, 1.0], [0.5, 1.0], [5.5, 2.0], [4.6, 2.0]];

/// Tasks run in declaration order, whatever order the file lists them in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Solve,
    Sweep,
    VerifyFormulas,
    ViscosityCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tasks: Vec<Task>,
    pub domain: DomainConfig,
    pub kernel: KernelConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub viscosity: ViscosityConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainConfig {
    Interval {
        lo: f64,
        hi: f64,
    },
    Rect {
        lo: [f64; 2],
        hi: [f64; 2],
    },
    Ball {
        center: [f64; 2],
        radius: f64,
    },
    /// Counterclockwise vertices as `[x0, y0, x1, y1, ...]`.
    Polygon {
        vertices: Vec<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileName {
    Tent,
    Bump,
    TruncatedQuadratic,
}

impl From<ProfileName> for Profile {
    fn from(p: ProfileName) -> Profile {
        match p {
            ProfileName::Tent => Profile::Tent,
            ProfileName::Bump => Profile::Bump,
            ProfileName::TruncatedQuadratic => Profile::TruncatedQuadratic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub profile: ProfileName,
    pub r_j: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DirectionName {
    Lbfgs,
    Steepest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub p: Vec<f64>,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    /// Grid spacing; give this or `nodes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Interior nodes across the widest extent of the domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default = "default_tol_lambda")]
    pub tol_lambda: f64,
    #[serde(default = "default_tol_grad")]
    pub tol_grad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default = "default_direction")]
    pub direction: DirectionName,
    #[serde(default = "default_memory")]
    pub memory: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Largest accepted `|λ₁(p)^{1/p} - Λ| / Λ` at the last `p`.
    #[serde(default = "default_max_rel_gap")]
    pub max_rel_gap: f64,
    #[serde(default = "yes")]
    pub require_monotone: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { max_rel_gap: default_max_rel_gap(), require_monotone: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// `[R_Ω, R_J]` pairs.
    #[serde(default = "canonical_tuples")]
    pub tuples: Vec<[f64; 2]>,
    /// Also check `(R_Ω, R_J)` of the configured domain and kernel.
    #[serde(default = "yes")]
    pub include_domain: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { tuples: canonical_tuples(), include_domain: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViscosityConfig {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Exponent of the eigenfield; the largest `p` of the solver block by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl Default for ViscosityConfig {
    fn default() -> Self {
        ViscosityConfig { threshold: default_threshold(), p: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_report")]
    pub report: String,
    /// Write the CSV plot data.
    #[serde(default = "yes")]
    pub plots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_dir(), report: default_report(), plots: true }
    }
}

fn one() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_tol_lambda() -> f64 {
    1e-10
}
fn default_tol_grad() -> f64 {
    1e-8
}
fn default_direction() -> DirectionName {
    DirectionName::Lbfgs
}
fn default_memory() -> usize {
    12
}
fn default_max_rel_gap() -> f64 {
    0.15
}
fn default_threshold() -> f64 {
    0.15
}
fn default_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_report() -> String {
    "report.json".into()
}
fn canonical_tuples() -> Vec<[f64; 2]> {
    CANONICAL_TUPLES.to_vec()
}

/// A rejected config, located by a dotted field path or a TOML position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError { field: field.into(), message: message.to_string() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "field `{}`: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string().trim_end()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
            .map_err(|e| ConfigError { message: format!("{}: {}", path.display(), e.message), ..e })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Tasks in execution order, without repeats.
    pub fn ordered_tasks(&self) -> Vec<Task> {
        let mut t = self.tasks.clone();
        t.sort();
        t.dedup();
        t
    }

    pub fn has(&self, task: Task) -> bool {
        self.tasks.contains(&task)
    }

    /// Checks what can be checked without building the grid.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.tasks.is_empty() {
            return Err(ConfigError::new("tasks", "at least one task is required"));
        }
        let s = &self.solver;
        if s.p.is_empty() {
            return Err(ConfigError::new("solver.p", "the p list is empty"));
        }
        for (i, &p) in s.p.iter().enumerate() {
            if !(p >= 2.0 && p.is_finite()) {
                return Err(ConfigError::new(format!("solver.p[{i}]"), format!("p = {p} is not a finite value >= 2")));
            }
        }
        if self.has(Task::Sweep) && s.p.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::new("solver.p", "a sweep needs a strictly ascending p list"));
        }
        for (name, v) in [("solver.alpha", s.alpha), ("solver.beta", s.beta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::new(name, format!("{v} is not a finite nonnegative weight")));
            }
        }
        if s.alpha + s.beta == 0.0 {
            return Err(ConfigError::new("solver.alpha", "alpha and beta cannot both vanish"));
        }
        match (s.h, s.nodes) {
            (Some(_), Some(_)) => return Err(ConfigError::new("solver.h", "give either h or nodes, not both")),
            (None, None) => return Err(ConfigError::new("solver.h", "one of h or nodes is required")),
            (Some(h), None) if !(h > 0.0 && h.is_finite()) => {
                return Err(ConfigError::new("solver.h", format!("h = {h} is not positive")))
            }
            (None, Some(0)) => return Err(ConfigError::new("solver.nodes", "node count must be positive")),
            _ => {}
        }
        if !(self.kernel.r_j > 0.0 && self.kernel.r_j.is_finite()) {
            return Err(ConfigError::new("kernel.r_j", format!("R_J = {} is not positive", self.kernel.r_j)));
        }
        self.solver_options().validate().map_err(|e| ConfigError::new("solver", e))?;
        if !(self.sweep.max_rel_gap > 0.0) {
            return Err(ConfigError::new("sweep.max_rel_gap", "must be positive"));
        }
        if !(self.viscosity.threshold > 0.0) {
            return Err(ConfigError::new("viscosity.threshold", "must be positive"));
        }
        if let Some(p) = self.viscosity.p {
            if !(p >= 2.0 && p.is_finite()) {
                return Err(ConfigError::new("viscosity.p", format!("p = {p} is not a finite value >= 2")));
            }
        }
        for (i, t) in self.verify.tuples.iter().enumerate() {
            if !t.iter().all(|v| *v > 0.0 && v.is_finite()) {
                return Err(ConfigError::new(format!("verify.tuples[{i}]"), "radii must be positive"));
            }
        }
        if self.output.report.is_empty() {
            return Err(ConfigError::new("output.report", "file name is empty"));
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions {
            max_iters: s.max_iters,
            tol_lambda: s.tol_lambda,
            tol_grad: s.tol_grad,
            direction: match s.direction {
                DirectionName::Lbfgs => Direction::Lbfgs { memory: s.memory },
                DirectionName::Steepest => Direction::Steepest,
            },
            ..SolverOptions::default()
        }
    }

    pub fn build_domain(&self) -> Result<Domain, ConfigError> {
        let d = match &self.domain {
            DomainConfig::Interval { lo, hi } => Domain::interval(*lo, *hi),
            DomainConfig::Rect { lo, hi } => Domain::rect(*lo, *hi),
            DomainConfig::Ball { center, radius } => Domain::ball(*center, *radius),
            DomainConfig::Polygon { vertices } => {
                if vertices.len() % 2 != 0 {
                    return Err(ConfigError::new("domain.vertices", "needs an even number of coordinates"));
                }
                Domain::polygon(vertices.chunks(2).map(|c| [c[0], c[1]]).collect())
            }
        };
        d.map_err(|e| ConfigError::new("domain", e))
    }
}

/// Everything the tasks share: lattice, kernel weights and the limit value.
#[derive(Clone, Debug)]
pub struct Setup {
    pub grid: Grid,
    pub kernel: Kernel,
    pub weights: WeightTable,
    pub options: SolverOptions,
    pub case: LambdaCase,
}

impl Setup {
    pub fn new(cfg: &RunConfig) -> Result<Self, ConfigError> {
        let domain = cfg.build_domain()?;
        let r_j = cfg.kernel.r_j;
        let kernel =
            Kernel::new(cfg.kernel.profile.into(), r_j, domain.dim()).map_err(|e| ConfigError::new("kernel", e))?;
        let (h, field) = match (cfg.solver.h, cfg.solver.nodes) {
            (Some(h), _) => (h, "solver.h"),
            (None, Some(n)) => (Grid::spacing_for_nodes(&domain, n), "solver.nodes"),
            (None, None) => return Err(ConfigError::new("solver.h", "one of h or nodes is required")),
        };
        let grid = Grid::new(&domain, h, r_j).map_err(|e| ConfigError::new(field, e))?;
        let weights = WeightTable::new(&kernel, h).map_err(|e| ConfigError::new(field, e))?;
        let case = LambdaCase::from_radii(grid.inradius().0, r_j).map_err(|e| ConfigError::new("domain", e))?;
        Ok(Setup { grid, kernel, weights, options: cfg.solver_options(), case })
    }
}
