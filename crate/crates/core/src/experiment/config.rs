//! JSON experiment configuration.

use serde::Deserialize;

use crate::ambiguity::AmbiguitySpec;
use crate::geometry::{GenerationMode, SupportBox, DEFAULT_GRID_PER_DIM};
use crate::problem::{make_portfolio_instance, make_synthetic_1d_instance, LipschitzConstants, ProblemInstance};

use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    Bounds,
    Converge,
    BetaStudy,
    Coverage,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Bounds => "bounds",
            Command::Converge => "converge",
            Command::BetaStudy => "beta-study",
            Command::Coverage => "coverage",
        }
    }
}

fn default_theta() -> f64 {
    0.1
}

fn default_weight_steps() -> usize {
    10
}

/// Problem selection, tagged by `"name"`.
///
/// Every variant accepts an optional `"sampling"` list of generation modes
/// (`"uniform"`, `"greedy"`); the first entry drives sampled solves and the
/// beta study emits one row per listed mode.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase", deny_unknown_fields)]
pub enum InstanceConfig {
    Synthetic1d {
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default)]
        kappa_theta: Option<f64>,
        #[serde(default)]
        c_p: Option<f64>,
        #[serde(default)]
        tau: f64,
        #[serde(default)]
        sampling: Option<Vec<GenerationMode>>,
    },
    Portfolio {
        return_lower: Vec<f64>,
        return_upper: Vec<f64>,
        loss_threshold: f64,
        #[serde(default = "default_theta")]
        theta: f64,
        #[serde(default = "default_weight_steps")]
        weight_steps: usize,
        #[serde(default)]
        sampling: Option<Vec<GenerationMode>>,
    },
    /// A bare support box, usable only by the beta study.
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default)]
        sampling: Option<Vec<GenerationMode>>,
    },
}

impl InstanceConfig {
    pub fn support(&self) -> Result<SupportBox<f64>, ExperimentError> {
        match self {
            InstanceConfig::Synthetic1d { .. } => Ok(SupportBox::unit(1)),
            InstanceConfig::Portfolio {
                return_lower,
                return_upper,
                ..
            } => SupportBox::new(return_lower.clone(), return_upper.clone()).map_err(config_err),
            InstanceConfig::Box { lower, upper, .. } => {
                SupportBox::new(lower.clone(), upper.clone()).map_err(config_err)
            }
        }
    }

    pub fn sampling(&self) -> Result<Vec<GenerationMode>, ExperimentError> {
        let modes = match self {
            InstanceConfig::Synthetic1d { sampling, .. }
            | InstanceConfig::Portfolio { sampling, .. }
            | InstanceConfig::Box { sampling, .. } => sampling.clone(),
        }
        .unwrap_or_else(|| vec![GenerationMode::UniformIid]);
        if modes.is_empty() {
            return Err(ExperimentError::Config("sampling must list at least one mode".into()));
        }
        if modes.contains(&GenerationMode::Explicit) {
            return Err(ExperimentError::Config(
                "explicit sampling cannot be generated from a seed".into(),
            ));
        }
        Ok(modes)
    }

    pub fn build(&self) -> Result<ProblemInstance<f64>, ExperimentError> {
        match self {
            InstanceConfig::Synthetic1d {
                theta,
                kappa_theta,
                c_p,
                tau,
                ..
            } => {
                let inst = make_synthetic_1d_instance::<f64>()
                    .with_theta(*theta)
                    .and_then(|i| i.with_tolerance(*tau))
                    .map_err(config_err)?;
                let lipschitz = LipschitzConstants {
                    kappa_theta: *kappa_theta,
                    c_p: *c_p,
                    ..inst.lipschitz
                };
                Ok(inst.with_lipschitz(lipschitz))
            }
            InstanceConfig::Portfolio {
                loss_threshold,
                theta,
                weight_steps,
                ..
            } => make_portfolio_instance(self.support()?, *loss_threshold, *theta, *weight_steps).map_err(config_err),
            InstanceConfig::Box { .. } => Err(ExperimentError::Config(
                "the box instance has no objective; use it with beta-study only".into(),
            )),
        }
    }
}

fn config_err(e: crate::error::Error) -> ExperimentError {
    ExperimentError::Config(e.to_string())
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replicates() -> usize {
    10
}

fn default_grid() -> usize {
    DEFAULT_GRID_PER_DIM
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub instance: InstanceConfig,
    #[serde(default = "simplex_only")]
    pub spec: AmbiguitySpec<f64>,
    pub omega_sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(rename = "M", default = "default_replicates")]
    pub m: usize,
    #[serde(rename = "M_prime", default = "default_replicates")]
    pub m_prime: usize,
    #[serde(default)]
    pub output_path: Option<String>,
    #[serde(default = "default_grid")]
    pub grid_per_dim: usize,
}

fn simplex_only() -> AmbiguitySpec<f64> {
    AmbiguitySpec::SimplexOnly
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: &str| Err(ExperimentError::Config(m.into()));
        if self.omega_sizes.is_empty() || self.omega_sizes[0] == 0 {
            return bad("omega_sizes must be nonempty and positive");
        }
        if self.omega_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return bad("omega_sizes must be strictly increasing");
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if self.m < 2 || self.m_prime < 2 {
            return bad("M and M_prime must be at least 2");
        }
        if self.grid_per_dim < 2 {
            return bad("grid_per_dim must be at least 2");
        }
        let support = self.instance.support()?;
        self.instance.sampling()?;
        self.spec.validate(support.dim()).map_err(config_err)?;
        if self.command != Command::BetaStudy {
            self.instance.build()?;
        }
        if self.command == Command::Coverage && self.omega_sizes.len() != 1 {
            return bad("coverage takes exactly one omega size");
        }
        Ok(())
    }
}
