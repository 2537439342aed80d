use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::WaveGrid;

/// Step-size policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Cfl { safety: f64, dt_max: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Modes per axis, `N`.
    pub resolution: usize,
    /// Kinematic viscosity `ν`.
    pub nu: f64,
    /// Fixed step size; exclusive with `cfl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// CFL safety factor in `(0, 1]`; exclusive with `dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cfl: Option<f64>,
    /// Upper limit on CFL-chosen steps.
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    pub t_end: f64,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// Extra checkpoints every this many samples (0: only the initial
    /// sample, interval starts and the final sample).
    #[serde(default)]
    pub checkpoint_every: usize,
}

fn default_dt_max() -> f64 {
    1e-2
}

fn default_sample_every() -> usize {
    1
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            resolution: 32,
            nu: 0.1,
            dt: Some(1e-3),
            cfl: None,
            dt_max: default_dt_max(),
            t_end: 1.0,
            sample_every: 10,
            checkpoint_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn grid(&self) -> Result<WaveGrid> {
        WaveGrid::new(self.resolution).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn time_step(&self) -> Result<TimeStep> {
        match (self.dt, self.cfl) {
            (Some(dt), None) if dt > 0.0 && dt.is_finite() => Ok(TimeStep::Fixed(dt)),
            (None, Some(safety)) if safety > 0.0 && safety <= 1.0 => {
                if self.dt_max > 0.0 && self.dt_max.is_finite() {
                    Ok(TimeStep::Cfl {
                        safety,
                        dt_max: self.dt_max,
                    })
                } else {
                    Err(Error::Config(format!("dt_max must be positive, got {}", self.dt_max)))
                }
            }
            (Some(_), Some(_)) => Err(Error::Config("set either dt or cfl, not both".into())),
            (None, None) => Err(Error::Config("one of dt or cfl is required".into())),
            (Some(dt), None) => Err(Error::Config(format!("dt must be positive, got {dt}"))),
            (None, Some(c)) => Err(Error::Config(format!("cfl must lie in (0, 1], got {c}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.time_step()?;
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Config(format!("nu must be positive, got {}", self.nu)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        Ok(())
    }
}

