//! Interval-subdivision regularity monitor: spectral-mass sign detection,
//! cutoff selection, lattice constants, per-interval bounds and the
//! trajectory verifier.

pub mod bounds;
pub mod intervals;
pub mod lattice;
pub mod report;
pub mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bounds::{
    case1_bound, case1_bound_explicit, case1_constant, case2_margin, case2_margin_from_grad,
    choose_cutoff, envelope_expiry, f_m, local_envelope_W, Envelope,
};
pub use intervals::{
    classify, detect_intervals, CaseLabel, CutoffTracker, IntervalSkeleton, Observation,
    DEFAULT_RELATIVE_HYSTERESIS,
};
pub use lattice::{
    calibrate, default_calibration, lattice_count, lattice_tail, Calibration, LatticeTail,
};
pub use report::{BoundReport, IntervalRecord, WEnvelope};
pub use verify::{chain_check, verify_trajectory, ChainCheck, Provenance};

/// Source of the constants `c₁` and `c₂`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum C1Mode {
    /// Use `c1_value` and `c2_value` as given.
    Integral,
    /// Use the suprema of the exact lattice sums over `1 ≤ m ≤ 64`.
    #[default]
    ExactLattice,
}

impl C1Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            C1Mode::Integral => "integral",
            C1Mode::ExactLattice => "exact_lattice",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonitorConfig {
    pub c1_mode: C1Mode,
    /// `c₁` in integral mode.
    pub c1_value: f64,
    /// `c₂` in integral mode.
    pub c2_value: f64,
    /// `c` in the envelope `W(t)`.
    pub c_local: f64,
    /// Sign-detection band; `None` selects `1e-9·Σ|û(t₀)|`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hysteresis: Option<f64>,
    /// Intervals no longer than this are dropped from the report.
    pub min_interval: f64,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        Self {
            c1_mode: C1Mode::ExactLattice,
            c1_value: 4.0 * std::f64::consts::PI,
            c2_value: 4.0 * std::f64::consts::PI / 3.0,
            c_local: 1.0,
            hysteresis: None,
            min_interval: 0.0,
        }
    }
}

/// Constants actually used by the monitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c_local: f64,
}

impl MonitorConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("monitor.{name} must be positive, got {v}")))
            }
        };
        positive("c1_value", self.c1_value)?;
        positive("c2_value", self.c2_value)?;
        positive("c_local", self.c_local)?;
        if let Some(h) = self.hysteresis {
            if !(h >= 0.0 && h.is_finite()) {
                return Err(Error::Config(format!("monitor.hysteresis must be >= 0, got {h}")));
            }
        }
        if !(self.min_interval >= 0.0 && self.min_interval.is_finite()) {
            return Err(Error::Config(format!(
                "monitor.min_interval must be >= 0, got {}",
                self.min_interval
            )));
        }
        Ok(())
    }

    pub fn constants(&self) -> Constants {
        let (c1, c2) = match self.c1_mode {
            C1Mode::Integral => (self.c1_value, self.c2_value),
            C1Mode::ExactLattice => {
                let cal = default_calibration();
                (cal.c1, cal.c2)
            }
        };
        Constants {
            c1,
            c2,
            c_local: self.c_local,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = MonitorConfig::default();
        cfg.validate().unwrap();
        let c = cfg.constants();
        assert_eq!(c.c2, 7.0);
        assert!(c.c1 > 1.0 && c.c1.is_finite());
        let integral = MonitorConfig {
            c1_mode: C1Mode::Integral,
            ..cfg
        };
        assert_eq!(integral.constants().c1, 4.0 * std::f64::consts::PI);
    }

    #[test]
    fn rejects_bad_constants() {
        for bad in [
            MonitorConfig { c1_value: 0.0, ..Default::default() },
            MonitorConfig { c_local: -1.0, ..Default::default() },
            MonitorConfig { hysteresis: Some(-1e-3), ..Default::default() },
            MonitorConfig { min_interval: f64::NAN, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
