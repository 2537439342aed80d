//! Segmentation of a sampled `F_m` series into sign-constant intervals,
//! and the online tracker that re-chooses the cutoff at each reversal.

use serde::Serialize;

use super::bounds::{choose_cutoff, f_m};
use crate::spectral::SpectralField;
use crate::Real;

/// Which side of the spectral-mass split dominates on an interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// `F_m ≥ 0`: low modes dominate (Case 1).
    LowDominant,
    /// `F_m ≤ 0`: high modes dominate (Case 2).
    HighDominant,
    /// The series never left the hysteresis band.
    Mixed,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::LowDominant => "low_dominant",
            CaseLabel::HighDominant => "high_dominant",
            CaseLabel::Mixed => "mixed",
        }
    }
}

/// Sign class of one value: `None` inside the band `(-ε, ε)`. With `ε = 0`
/// an exact zero is also treated as in-band.
pub fn classify(value: f64, hysteresis: f64) -> Option<CaseLabel> {
    if value >= hysteresis && value > 0.0 {
        Some(CaseLabel::LowDominant)
    } else if value <= -hysteresis && value < 0.0 {
        Some(CaseLabel::HighDominant)
    } else {
        None
    }
}

/// One interval of [`detect_intervals`]: it owns samples `start..next` and
/// spans `[t_start, t_end]`, where `t_end` is the time of the next
/// interval's first sample (or the last sample).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalSkeleton {
    pub start: usize,
    /// Sample index at `t_end`.
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub label: CaseLabel,
}

/// Maximal runs where `f ≥ ε` (low-dominant) or `f ≤ −ε` (high-dominant).
///
/// In-band values extend the current run; leading in-band values join the
/// first run. A new run starts at the first sample beyond the band on the
/// opposite side. A series that never leaves the band is a single `Mixed`
/// interval. `series` must be sorted by time.
pub fn detect_intervals(series: &[(f64, f64)], hysteresis: f64) -> Vec<IntervalSkeleton> {
    if series.is_empty() {
        return Vec::new();
    }
    let mut starts: Vec<(usize, Option<CaseLabel>)> = vec![(0, None)];
    for (i, &(_, v)) in series.iter().enumerate() {
        let Some(class) = classify(v, hysteresis) else {
            continue;
        };
        let current = starts.last_mut().expect("non-empty");
        match current.1 {
            None => current.1 = Some(class),
            Some(label) if label != class => starts.push((i, Some(class))),
            Some(_) => {}
        }
    }
    let last = series.len() - 1;
    starts
        .iter()
        .enumerate()
        .map(|(j, &(start, label))| {
            let end = starts.get(j + 1).map_or(last, |s| s.0);
            IntervalSkeleton {
                start,
                end,
                t_start: series[start].0,
                t_end: series[end].0,
                label: label.unwrap_or(CaseLabel::Mixed),
            }
        })
        .collect()
}

/// What the tracker recorded for one sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    /// Cutoff used for `f_m` at this sample.
    pub active_m: f64,
    pub f_m: f64,
    /// This sample opens a new interval (`t₀` or a sign reversal).
    pub interval_start: bool,
}

#[derive(Clone, Copy, Debug)]
struct Active {
    m: f64,
    label: Option<CaseLabel>,
    hysteresis: f64,
}

/// Online form of the interval procedure, fed one sample at a time.
///
/// The sample at `t = 0` is only recorded; the first sample with `t > 0` is
/// `t₀` and receives `m₀ = choose_cutoff(‖∇u(t₀)‖²)`. When `F_m` reverses
/// sign beyond the hysteresis band at `t_j`, that sample is recorded with the
/// old cutoff (it is the first sample beyond the band) and the new cutoff
/// `choose_cutoff(‖∇u(t_j)‖²)` applies from the next sample. The recorded
/// `(t, f_m)` series therefore segments identically under
/// [`detect_intervals`].
#[derive(Clone, Debug)]
pub struct CutoffTracker {
    nu: f64,
    c1: f64,
    hysteresis: Option<f64>,
    relative_hysteresis: f64,
    state: Option<Active>,
}

/// Default band half-width relative to `Σ|û(t₀)|`.
pub const DEFAULT_RELATIVE_HYSTERESIS: f64 = 1e-9;

impl CutoffTracker {
    /// `hysteresis = None` selects `ε = 1e-9·Σ|û(t₀)|`.
    pub fn new(nu: f64, c1: f64, hysteresis: Option<f64>) -> Self {
        Self {
            nu,
            c1,
            hysteresis,
            relative_hysteresis: DEFAULT_RELATIVE_HYSTERESIS,
            state: None,
        }
    }

    /// Band half-width in use, once `t₀` has been seen.
    pub fn hysteresis(&self) -> Option<f64> {
        self.state.map(|s| s.hysteresis)
    }

    fn cutoff(&self, grad_sq: f64) -> f64 {
        if grad_sq > 0.0 {
            choose_cutoff(grad_sq, self.nu, self.c1)
        } else {
            0.0
        }
    }

    pub fn observe<T: Real>(&mut self, t: f64, u: &SpectralField<T>, grad_sq: f64) -> Observation {
        if t <= 0.0 || (self.state.is_none() && grad_sq <= 0.0) {
            let m = self.cutoff(grad_sq);
            return Observation {
                active_m: m,
                f_m: f_m(u, m),
                interval_start: false,
            };
        }
        match self.state {
            None => {
                let m = self.cutoff(grad_sq);
                let hysteresis = self
                    .hysteresis
                    .unwrap_or_else(|| self.relative_hysteresis * u.abs_sum().f64());
                let f = f_m(u, m);
                self.state = Some(Active {
                    m,
                    label: classify(f, hysteresis),
                    hysteresis,
                });
                Observation {
                    active_m: m,
                    f_m: f,
                    interval_start: true,
                }
            }
            Some(mut active) => {
                let f = f_m(u, active.m);
                let mut obs = Observation {
                    active_m: active.m,
                    f_m: f,
                    interval_start: false,
                };
                if let Some(class) = classify(f, active.hysteresis) {
                    match active.label {
                        None => active.label = Some(class),
                        Some(label) if label != class => {
                            active.label = Some(class);
                            active.m = self.cutoff(grad_sq);
                            obs.interval_start = true;
                        }
                        Some(_) => {}
                    }
                }
                self.state = Some(active);
                obs
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: &[f64]) -> Vec<(f64, f64)> {
        values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect()
    }

    #[test]
    fn reversal_splits() {
        let iv = detect_intervals(&series(&[1.0, 1.0, -1.0, -1.0]), 0.0);
        assert_eq!(iv.len(), 2);
        assert_eq!(iv[0].label, CaseLabel::LowDominant);
        assert_eq!((iv[0].start, iv[0].end), (0, 2));
        assert_eq!(iv[1].label, CaseLabel::HighDominant);
        assert_eq!((iv[1].start, iv[1].end), (2, 3));
        assert_eq!((iv[1].t_start, iv[1].t_end), (2.0, 3.0));
    }

    #[test]
    fn band_values_extend_the_run() {
        let eps = 0.5;
        let iv = detect_intervals(&series(&[1.0, 0.1 * eps, -0.4, 0.2, 1.0]), eps);
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].label, CaseLabel::LowDominant);
        assert_eq!((iv[0].start, iv[0].end), (0, 4));
    }

    #[test]
    fn constant_sign_and_all_band() {
        let iv = detect_intervals(&series(&[-3.0, -2.0, -1.0]), 0.0);
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].label, CaseLabel::HighDominant);
        let iv = detect_intervals(&series(&[0.0, 1e-3, -1e-3]), 1e-2);
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].label, CaseLabel::Mixed);
        assert!(detect_intervals(&[], 0.0).is_empty());
    }

    #[test]
    fn leading_band_joins_first_run() {
        let iv = detect_intervals(&series(&[0.0, 0.0, -1.0, 1.0]), 0.0);
        assert_eq!(iv.len(), 2);
        assert_eq!(iv[0].label, CaseLabel::HighDominant);
        assert_eq!(iv[0].start, 0);
        assert_eq!(iv[1].start, 3);
        assert_eq!(iv[1].t_start, iv[1].t_end);
    }
}
