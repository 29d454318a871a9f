//! Experiment configuration: a versioned TOML schema that round-trips
//! losslessly and resolves into the core library's runtime objects.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use simplex_md::linkfn::catalog;
use simplex_md::problems;
use simplex_md::{DescentConfig, EtaSchedule, Problem, SimplexPoint, Variant};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub problem: ProblemSpec,
    pub family: FamilySpec,
    pub optimizer: OptimizerSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

/// What to optimize. `quadratic` and `cross_entropy` take a `target`
/// distribution; `portfolio` takes exactly one returns source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    /// CSV of gross returns: header row with asset names, one row per round.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub returns_csv: Option<String>,
    /// Repeat this gross-returns vector for `rounds` rounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant_returns: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u32>,
    /// Seeded synthetic 2-asset stream with this many rounds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic_rounds: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub tag: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSpec {
    /// `md` (mirror step through the link) or `mmd` (mirror-less).
    pub variant: String,
    pub eta: f64,
    /// `constant` or `inv_sqrt`.
    #[serde(default = "default_schedule")]
    pub schedule: String,
    pub max_iters: u32,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    pub seed: u64,
    /// `uniform` or `random` (seeded).
    #[serde(default = "default_init")]
    pub init: String,
}

fn default_schedule() -> String {
    "constant".into()
}

fn default_grad_tol() -> f64 {
    1e-8
}

fn default_init() -> String {
    "uniform".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Value grids keyed by parameter name; `eta` sweeps the learning rate,
    /// any other key sweeps the corresponding family parameter.
    pub grids: BTreeMap<String, Vec<f64>>,
}

fn default_cap() -> usize {
    10_000
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Resolve the optimizer section (validates variant/schedule/eta and the
    /// family tag + parameters).
    pub fn descent_config(&self) -> Result<DescentConfig, CliError> {
        let variant = match self.optimizer.variant.as_str() {
            "md" => Variant::Md,
            "mmd" => Variant::Mmd,
            other => {
                return Err(CliError::Config(format!(
                    "optimizer.variant must be \"md\" or \"mmd\", got {other:?}"
                )))
            }
        };
        if !(self.optimizer.eta.is_finite() && self.optimizer.eta > 0.0) {
            return Err(CliError::Config(format!(
                "optimizer.eta must be a positive real, got {}",
                self.optimizer.eta
            )));
        }
        let eta = match self.optimizer.schedule.as_str() {
            "constant" => EtaSchedule::Constant(self.optimizer.eta),
            "inv_sqrt" => EtaSchedule::InvSqrt(self.optimizer.eta),
            other => {
                return Err(CliError::Config(format!(
                    "optimizer.schedule must be \"constant\" or \"inv_sqrt\", got {other:?}"
                )))
            }
        };
        if self.optimizer.max_iters == 0 {
            return Err(CliError::Config(
                "optimizer.max_iters must be at least 1".into(),
            ));
        }
        if !(self.optimizer.grad_tol > 0.0) {
            return Err(CliError::Config(format!(
                "optimizer.grad_tol must be positive, got {}",
                self.optimizer.grad_tol
            )));
        }
        let family = catalog::from_tag_params(&self.family.tag, &self.family.params)
            .map_err(CliError::Config)?;
        let mut cfg = DescentConfig::new(variant, family, eta);
        cfg.max_iters = self.optimizer.max_iters;
        cfg.grad_tol = self.optimizer.grad_tol;
        Ok(cfg)
    }

    /// Resolve the problem section into a benchmark problem. CSV paths are
    /// taken relative to `base` (the config file's directory).
    pub fn problem(&self, base: &Path) -> Result<Problem, CliError> {
        let spec = &self.problem;
        let config_err = |msg: String| CliError::Config(msg);
        let target = || -> Result<SimplexPoint, CliError> {
            let t = spec.target.clone().ok_or_else(|| {
                config_err(format!("problem {:?} requires a target vector", spec.name))
            })?;
            SimplexPoint::new(t)
                .map_err(|e| config_err(format!("problem.target is not a valid simplex point: {e}")))
        };
        match spec.name.as_str() {
            "quadratic" => {
                problems::quadratic(&target()?).map_err(|e| config_err(e.to_string()))
            }
            "cross_entropy" => {
                problems::cross_entropy(&target()?).map_err(|e| config_err(e.to_string()))
            }
            "portfolio" => {
                let sources = spec.returns_csv.is_some() as u8
                    + spec.constant_returns.is_some() as u8
                    + spec.synthetic_rounds.is_some() as u8;
                if sources != 1 {
                    return Err(config_err(
                        "portfolio needs exactly one of returns_csv, constant_returns, \
                         synthetic_rounds"
                            .into(),
                    ));
                }
                let returns = if let Some(csv) = &spec.returns_csv {
                    let (_, rows) = problems::returns_from_csv(&base.join(csv))
                        .map_err(|e| config_err(e.to_string()))?;
                    rows
                } else if let Some(r) = &spec.constant_returns {
                    let rounds = spec.rounds.ok_or_else(|| {
                        config_err("constant_returns requires rounds".into())
                    })?;
                    problems::constant_returns(rounds as usize, r)
                } else {
                    let rounds = spec.synthetic_rounds.unwrap();
                    problems::synthetic_returns(rounds as usize, self.optimizer.seed)
                };
                problems::portfolio(returns).map_err(|e| config_err(e.to_string()))
            }
            other => Err(config_err(format!(
                "unknown problem {other:?} (expected quadratic, cross_entropy, or portfolio)"
            ))),
        }
    }

    /// Starting point on the simplex, determined by `init` and the seed.
    pub fn start_point(&self, dim: usize) -> Result<SimplexPoint, CliError> {
        match self.optimizer.init.as_str() {
            "uniform" => Ok(SimplexPoint::uniform(dim)),
            "random" => {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.optimizer.seed);
                let w: Vec<f64> = (0..dim).map(|_| 0.1 + rng.gen::<f64>()).collect();
                SimplexPoint::new(w)
                    .map_err(|e| CliError::Config(format!("random init failed: {e}")))
            }
            other => Err(CliError::Config(format!(
                "optimizer.init must be \"uniform\" or \"random\", got {other:?}"
            ))),
        }
    }

    /// Full validation pass: every section resolves.
    pub fn validate(&self, base: &Path) -> Result<(), CliError> {
        self.descent_config()?;
        let problem = self.problem(base)?;
        self.start_point(problem.dim())?;
        if let Some(sweep) = &self.sweep {
            if sweep.grids.is_empty() {
                return Err(CliError::Config("sweep.grids must be nonempty".into()));
            }
            for (key, values) in &sweep.grids {
                if values.is_empty() {
                    return Err(CliError::Config(format!(
                        "sweep grid {key:?} has no values"
                    )));
                }
            }
        }
        Ok(())
    }
}
