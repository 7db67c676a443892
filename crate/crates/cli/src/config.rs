//! JSON run configuration, validated before any computation.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vfp_core::particles::InteractionEvaluation;
use vfp_core::{
    ConfiningPotential, InitialCondition, InteractionPotential, Mode, QuadratureSpec,
    SelfConsistencyProblem,
};

use crate::error::CliError;

const DEFAULT_OUTPUT_DIR: &str = "vfp-output";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `potential[k]` multiplies `x^k`.
    pub potential: Vec<f64>,
    #[serde(default = "one")]
    pub dimension: usize,
    pub interaction: Interaction,
    /// Skips the structural assumptions; the potential still has to confine.
    #[serde(default)]
    pub test_only: bool,
    pub lambda: Option<LambdaSpec>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub lambda_c: Option<LambdaCBlock>,
    pub sim: Option<SimBlock>,
    pub residual: Option<ResidualBlock>,
    pub asymptotics: Option<AsymptoticsBlock>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interaction {
    /// `ψ(x) = (α/2)x²`.
    Quadratic(f64),
    /// Even polynomial coefficients, `g[k]` multiplies `x^k`.
    Polynomial(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    List(Vec<f64>),
    Sweep(Sweep),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaCBlock {
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimBlock {
    pub particles: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Exactly one of `steps` and `total_time`.
    pub steps: Option<u64>,
    pub total_time: Option<f64>,
    pub burn_in_steps: Option<u64>,
    pub mode: Mode,
    pub record_every: Option<u64>,
    #[serde(default)]
    pub interaction_evaluation: InteractionEvaluation,
    #[serde(default = "default_init")]
    pub init: InitialCondition,
    pub histogram_range: Option<(f64, f64)>,
    pub histogram_bins: Option<usize>,
    pub anchor: Option<f64>,
    /// Also run the other mode with the same seed and compare the position marginals.
    #[serde(default)]
    pub compare_modes: bool,
}

fn default_dt() -> f64 {
    1e-3
}

fn default_init() -> InitialCondition {
    InitialCondition::Point(0.0)
}

impl SimBlock {
    pub fn steps(&self) -> Result<u64, CliError> {
        match (self.steps, self.total_time) {
            (Some(s), None) => Ok(s),
            (None, Some(t)) if t > 0.0 && t.is_finite() => Ok((t / self.dt).round() as u64),
            (None, Some(t)) => Err(CliError::Config(format!(
                "sim.total_time must be positive, got {t}"
            ))),
            _ => Err(CliError::Config(
                "sim needs exactly one of steps and total_time".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualBlock {
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    #[serde(default = "default_half_width")]
    pub momentum_half_width: f64,
    /// Momentum variance used in the lift, as a multiple of `λ`.
    #[serde(default = "default_scale")]
    pub p_variance_scale: f64,
    /// Trial mean of the position marginal; defaults to the rightmost stable fixed point.
    pub mean: Option<f64>,
}

impl Default for ResidualBlock {
    fn default() -> Self {
        Self {
            grids: default_grids(),
            momentum_half_width: default_half_width(),
            p_variance_scale: default_scale(),
            mean: None,
        }
    }
}

fn default_grids() -> Vec<usize> {
    vec![64, 128, 256]
}

fn default_half_width() -> f64 {
    8.0
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsBlock {
    /// Wells to expand about; defaults to the local minima of the potential.
    pub wells: Option<Vec<f64>>,
    #[serde(default = "default_small_lambdas")]
    pub lambdas: Vec<f64>,
    /// Concentration moment `E|q − a0|^{2n}`.
    #[serde(default = "one_u32")]
    pub moment_order: u32,
}

impl Default for AsymptoticsBlock {
    fn default() -> Self {
        Self {
            wells: None,
            lambdas: default_small_lambdas(),
            moment_order: 1,
        }
    }
}

fn default_small_lambdas() -> Vec<f64> {
    vec![0.02, 0.01, 0.005]
}

fn one_u32() -> u32 {
    1
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        if self.potential.is_empty() || self.potential.iter().any(|c| !c.is_finite()) {
            return Err(CliError::Config(
                "potential needs finite coefficients".into(),
            ));
        }
        if self.dimension == 0 {
            return Err(CliError::Config("dimension must be at least 1".into()));
        }
        Ok(())
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn potential(&self) -> Result<ConfiningPotential, CliError> {
        Ok(ConfiningPotential::new(self.potential.clone())?)
    }

    pub fn interaction(&self) -> Result<InteractionPotential, CliError> {
        match &self.interaction {
            Interaction::Quadratic(alpha) => Ok(InteractionPotential::quadratic(*alpha)),
            Interaction::Polynomial(g) => Ok(InteractionPotential::even_polynomial(g.clone())?),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.interaction {
            Interaction::Quadratic(alpha) => Some(alpha),
            Interaction::Polynomial(_) => None,
        }
    }

    pub fn require_alpha(&self, command: &str) -> Result<f64, CliError> {
        self.alpha()
            .ok_or_else(|| CliError::Config(format!("{command} needs a quadratic interaction")))
    }

    pub fn problem(&self, lambda: f64) -> Result<SelfConsistencyProblem, CliError> {
        let (v, psi) = (self.potential()?, self.interaction()?);
        let prob = if self.test_only {
            SelfConsistencyProblem::test_only(v, psi, lambda)?
        } else {
            SelfConsistencyProblem::new(v, psi, lambda)?
        };
        Ok(prob.with_quadrature(self.quadrature))
    }

    /// The temperature grid, ascending.
    pub fn lambdas(&self) -> Result<Vec<f64>, CliError> {
        let spec = self
            .lambda
            .as_ref()
            .ok_or_else(|| CliError::Config("lambda is required".into()))?;
        let grid = match spec {
            LambdaSpec::Value(l) => vec![*l],
            LambdaSpec::List(v) => v.clone(),
            LambdaSpec::Sweep(s) => s.grid()?,
        };
        if grid.is_empty() {
            return Err(CliError::Config("lambda grid is empty".into()));
        }
        if grid.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(CliError::Config("lambda values must be positive".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "lambda values must be strictly ascending".into(),
            ));
        }
        Ok(grid)
    }

    pub fn single_lambda(&self, command: &str) -> Result<f64, CliError> {
        match self.lambdas()?.as_slice() {
            [l] => Ok(*l),
            _ => Err(CliError::Config(format!("{command} needs a single lambda"))),
        }
    }

    pub fn is_log_sweep(&self) -> bool {
        matches!(&self.lambda, Some(LambdaSpec::Sweep(s)) if s.spacing == Spacing::Log)
    }
}

impl Sweep {
    fn grid(&self) -> Result<Vec<f64>, CliError> {
        match self.count {
            0 => Err(CliError::Config("lambda sweep has count 0".into())),
            1 => Ok(vec![self.min]),
            n if self.max > self.min => {
                let t = |i: usize| i as f64 / (n - 1) as f64;
                Ok(match self.spacing {
                    Spacing::Linear => (0..n)
                        .map(|i| self.min + (self.max - self.min) * t(i))
                        .collect(),
                    Spacing::Log if self.min > 0.0 => {
                        let (a, b) = (self.min.ln(), self.max.ln());
                        let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * t(i)).exp()).collect();
                        // exact endpoints, free of exp∘ln rounding
                        (g[0], g[n - 1]) = (self.min, self.max);
                        g
                    }
                    Spacing::Log => {
                        return Err(CliError::Config(
                            "log sweep needs a positive minimum".into(),
                        ))
                    }
                })
            }
            _ => Err(CliError::Config("lambda sweep needs max > min".into())),
        }
    }
}
