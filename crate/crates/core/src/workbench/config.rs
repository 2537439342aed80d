//! Experiment configuration: a TOML document with `[solver]`,
//! `[initial_condition]`, `[monitor]` and `[output]` sections. Unknown keys
//! are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::SolverConfig;
use crate::monitor::MonitorConfig;
use crate::spectral::WaveGrid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    TaylorGreen,
    Abc,
    RandomBand,
}

impl FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor_green" => Ok(IcKind::TaylorGreen),
            "abc" => Ok(IcKind::Abc),
            "random_band" => Ok(IcKind::RandomBand),
            other => Err(Error::Config(format!(
                "unknown initial condition {other:?} (expected taylor_green, abc or random_band)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConditionSpec {
    pub kind: IcKind,
    /// Overall scale; for `random_band` the target `‖∇u₀‖`.
    pub amplitude: f64,
    /// `[k_min, k_max]` shell radii for `random_band`.
    pub band: [f64; 2],
    /// Spectral exponent: band amplitudes scale like `|k|^slope`.
    pub slope: f64,
    pub seed: u64,
    /// `[A, B, C]` for the ABC flow, multiplied by `amplitude`.
    pub abc: [f64; 3],
}

impl Default for InitialConditionSpec {
    fn default() -> Self {
        Self {
            kind: IcKind::TaylorGreen,
            amplitude: 1.0,
            band: [4.0, 8.0],
            slope: 0.0,
            seed: 0,
            abc: [1.0, 1.0, 1.0],
        }
    }
}

impl InitialConditionSpec {
    pub fn validate(&self, grid: WaveGrid) -> Result<()> {
        let bad = |msg: String| Err(Error::InitialCondition(msg));
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return bad(format!("amplitude must be positive, got {}", self.amplitude));
        }
        match self.kind {
            IcKind::TaylorGreen | IcKind::Abc if grid.n() < 8 => {
                bad(format!("{:?} needs N >= 8, got {}", self.kind, grid.n()))
            }
            IcKind::RandomBand => {
                let [lo, hi] = self.band;
                let limit = grid.dealias_radius() as f64;
                if !(lo > 0.0 && lo <= hi && hi <= limit) || !self.slope.is_finite() {
                    bad(format!(
                        "band [{lo}, {hi}] must satisfy 0 < k_min <= k_max <= N/3 = {limit}"
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub write_checkpoints: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            write_checkpoints: true,
        }
    }
}

/// A complete experiment: solver, initial condition, monitor constants and
/// output location.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial_condition: InitialConditionSpec,
    #[serde(default)]
    pub monitor: MonitorConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        self.initial_condition.validate(self.solver.grid()?)?;
        self.monitor.validate()
    }
}
