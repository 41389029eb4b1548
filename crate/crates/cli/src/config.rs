//! Scenario files.
//!
//! ```json
//! {
//!   "transform": { "kind": "exp_ratio", "theta": 0.5 },
//!   "grid_n": 256,
//!   "seed": 7
//! }
//! ```
//!
//! or, for random variables,
//!
//! ```json
//! {
//!   "marginals": {
//!     "f": { "kind": "exponential", "rate": 2.0 },
//!     "g": { "kind": "exponential", "rate": 1.0 },
//!     "s": { "kind": "identity" }
//!   },
//!   "samples": 1000000
//! }
//! ```
//!
//! Exactly one of `transform` and `marginals` must be present. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use endomass::oracle::{MAX_GRID, MIN_GRID};
use endomass::{LinkFunction, Marginal, UnitFunction};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_GRID_N: usize = 256;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_EPS: f64 = 0.01;
pub const DEFAULT_FIGURE_POINTS: usize = 1000;
pub const MAX_SAMPLES: usize = 1_000_000_000;
pub const MAX_FIGURE_POINTS: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformSpec {
    ExpRatio { theta: f64 },
    ExGegen { n_param: u32 },
    Parabola,
    Identity,
    Constant { value: f64 },
    Power { p: f64 },
    /// Right-continuous steps; `cuts` (interior breakpoints) default to equal cells.
    Step {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cuts: Option<Vec<f64>>,
    },
    PiecewiseLinear { points: Vec<[f64; 2]> },
    Gridded { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarginalSpec {
    Exponential { rate: f64 },
    Uniform { a: f64, b: f64 },
    PiecewiseLinearCdf { nodes: Vec<[f64; 2]> },
    Empirical { sample: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinkSpec {
    Identity,
    Affine { slope: f64, intercept: f64 },
    Gridded { breakpoints: Vec<f64>, values: Vec<f64> },
    Polynomial { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalsSpec {
    pub f: MarginalSpec,
    pub g: MarginalSpec,
    #[serde(default = "identity_link")]
    pub s: LinkSpec,
}

fn identity_link() -> LinkSpec {
    LinkSpec::Identity
}

/// Which map fills the optional `g` column of figure data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureG {
    /// `phi` when it is not the identity, otherwise no column.
    Auto,
    None,
    /// The rearranging map `phi` with `T* . phi = T`.
    Phi,
    /// The eps-minimizer.
    EpsMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marginals: Option<MarginalsSpec>,
    /// Oracle grid size.
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    /// Monte Carlo sample count; 0 disables the MC block.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_figure_points")]
    pub figure_points: usize,
    #[serde(default = "default_figure_g")]
    pub figure_g: FigureG,
    /// Put the optimal map (and the eps-minimizer for `min`) into the report.
    #[serde(default = "default_true")]
    pub include_map: bool,
    /// Output path; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_grid_n() -> usize {
    DEFAULT_GRID_N
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn default_eps() -> f64 {
    DEFAULT_EPS
}
fn default_figure_points() -> usize {
    DEFAULT_FIGURE_POINTS
}
fn default_figure_g() -> FigureG {
    FigureG::Auto
}
fn default_true() -> bool {
    true
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            transform: None,
            marginals: None,
            grid_n: DEFAULT_GRID_N,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            eps: DEFAULT_EPS,
            figure_points: DEFAULT_FIGURE_POINTS,
            figure_g: FigureG::Auto,
            include_map: true,
            out: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub theta: Option<f64>,
    pub grid_n: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub eps: Option<f64>,
    pub out: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::Config(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// `--theta` selects (or re-parametrizes) an `exp_ratio` transform.
    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(theta) = o.theta {
            match (&mut self.transform, &self.marginals) {
                (_, Some(_)) => {
                    return Err(CliError::Config("--theta cannot be combined with a marginals scenario".into()))
                }
                (Some(TransformSpec::ExpRatio { theta: t }), None) => *t = theta,
                (None, None) => self.transform = Some(TransformSpec::ExpRatio { theta }),
                (Some(_), None) => {
                    return Err(CliError::Config("--theta needs an exp_ratio transform".into()))
                }
            }
        }
        if let Some(n) = o.grid_n {
            self.grid_n = n;
        }
        if let Some(n) = o.samples {
            self.samples = n;
        }
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(e) = o.eps {
            self.eps = e;
        }
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.transform, &self.marginals) {
            (Some(_), Some(_)) => return Err(config("exactly one of transform and marginals may be given")),
            (None, None) => return Err(config("one of transform and marginals is required")),
            _ => {}
        }
        if !(MIN_GRID..=MAX_GRID).contains(&self.grid_n) {
            return Err(config(format!("grid_n must be in [{MIN_GRID}, {MAX_GRID}], got {}", self.grid_n)));
        }
        if self.samples > MAX_SAMPLES {
            return Err(config(format!("samples must be at most {MAX_SAMPLES}, got {}", self.samples)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(config(format!("eps must be in (0, 1), got {}", self.eps)));
        }
        if !(2..=MAX_FIGURE_POINTS).contains(&self.figure_points) {
            return Err(config(format!(
                "figure_points must be in [2, {MAX_FIGURE_POINTS}], got {}",
                self.figure_points
            )));
        }
        self.unit_function().map(|_| ())
    }

    /// The transformation of the unit interval the scenario describes.
    pub fn unit_function(&self) -> Result<UnitFunction, CliError> {
        if let Some(t) = &self.transform {
            return build_transform(t).map_err(|e| config(format!("transform: {e}")));
        }
        let (f, g, s) = self.marginals()?;
        Ok(endomass::sklar::unit_transform(&f, &g, &s))
    }

    pub fn marginals(&self) -> Result<(Marginal, Marginal, LinkFunction), CliError> {
        let m = self.marginals.as_ref().ok_or_else(|| config("this command needs a marginals scenario"))?;
        let f = build_marginal(&m.f).map_err(|e| config(format!("marginals.f: {e}")))?;
        let g = build_marginal(&m.g).map_err(|e| config(format!("marginals.g: {e}")))?;
        let s = build_link(&m.s).map_err(|e| config(format!("marginals.s: {e}")))?;
        Ok((f, g, s))
    }
}

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn build_transform(t: &TransformSpec) -> endomass::Result<UnitFunction> {
    match t {
        TransformSpec::ExpRatio { theta } => UnitFunction::exp_ratio(*theta),
        TransformSpec::ExGegen { n_param } => UnitFunction::ex_gegen(*n_param),
        TransformSpec::Parabola => Ok(UnitFunction::parabola()),
        TransformSpec::Identity => Ok(UnitFunction::identity()),
        TransformSpec::Constant { value } => UnitFunction::constant(*value),
        TransformSpec::Power { p } => UnitFunction::power(*p),
        TransformSpec::Step { values, cuts: None } => UnitFunction::step_uniform(values.clone()),
        TransformSpec::Step { values, cuts: Some(cuts) } => UnitFunction::step(cuts.clone(), values.clone()),
        TransformSpec::PiecewiseLinear { points } => {
            let pts: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
            UnitFunction::piecewise_linear(&pts)
        }
        TransformSpec::Gridded { values } => UnitFunction::gridded(values.clone()),
    }
}

fn build_marginal(m: &MarginalSpec) -> endomass::Result<Marginal> {
    match m {
        MarginalSpec::Exponential { rate } => Marginal::exponential(*rate),
        MarginalSpec::Uniform { a, b } => Marginal::uniform(*a, *b),
        MarginalSpec::PiecewiseLinearCdf { nodes } => {
            Marginal::piecewise_linear_cdf(nodes.iter().map(|p| (p[0], p[1])).collect())
        }
        MarginalSpec::Empirical { sample } => Marginal::empirical(sample.clone()),
    }
}

fn build_link(s: &LinkSpec) -> endomass::Result<LinkFunction> {
    match s {
        LinkSpec::Identity => Ok(LinkFunction::Identity),
        LinkSpec::Affine { slope, intercept } => LinkFunction::affine(*slope, *intercept),
        LinkSpec::Gridded { breakpoints, values } => LinkFunction::gridded(breakpoints.clone(), values.clone()),
        LinkSpec::Polynomial { coefficients } => LinkFunction::polynomial(coefficients.clone()),
    }
}
