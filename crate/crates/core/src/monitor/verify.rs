//! Replays the interval procedure on a recorded trajectory and checks every
//! bound it claims.

use std::collections::BTreeMap;

use super::bounds::{
    case1_bound, case2_margin_from_grad, choose_cutoff, envelope_expiry, local_envelope_W, Envelope,
};
use super::intervals::{detect_intervals, CaseLabel, DEFAULT_RELATIVE_HYSTERESIS};
use super::lattice::lattice_count;
use super::report::{BoundReport, ConstantsUsed, IntervalRecord, WEnvelope};
use super::MonitorConfig;
use crate::integrator::{Checkpoint, Trajectory, TrajectorySample};
use crate::spectral::{norm_sq, Fft3, SpectralField};
use crate::Real;

/// Relative slack for inequalities that hold exactly in real arithmetic.
pub const CHAIN_TOLERANCE: f64 = 1e-12;

/// Cutoffs at which the chain inequalities are evaluated besides the
/// active one.
pub const CHAIN_CUTOFFS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Allowed relative increase of `‖∇u‖²` between samples that still counts
/// as non-increase.
pub const NONINCREASE_TOLERANCE: f64 = 1e-13;

/// Energy inequality tolerance relative to `‖u₀‖²`.
pub const ENERGY_TOLERANCE: f64 = 1e-8;

/// Optional run metadata copied into `constants_used`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub rng: Option<String>,
    pub seed: Option<u64>,
}

/// Both sides of the three pointwise estimates at one cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainCheck {
    pub m: f64,
    /// `max_x |u(x)|` over collocation points.
    pub sup_norm: f64,
    /// `Σ|û|`.
    pub abs_sum: f64,
    /// `Σ_{|k|≤m}|û|`.
    pub low: f64,
    /// `(Σ_{|k|≤m}1)^{1/2}·‖u‖`.
    pub low_bound: f64,
    /// `Σ_{|k|>m}|û|`.
    pub high: f64,
    /// `(Σ_{|k|>m}|k|⁻⁴)^{1/2}·‖Δu‖` over the grid's wavevectors.
    pub high_bound: f64,
}

impl ChainCheck {
    /// Names of the inequalities that fail by more than `rel_tol`.
    pub fn failures(&self, rel_tol: f64) -> Vec<&'static str> {
        let holds = |lhs: f64, rhs: f64| lhs <= rhs * (1.0 + rel_tol) + f64::MIN_POSITIVE;
        let mut out = Vec::new();
        if !holds(self.sup_norm, self.abs_sum) {
            out.push("linf");
        }
        if !holds(self.low, self.low_bound) {
            out.push("low_split");
        }
        if !holds(self.high, self.high_bound) {
            out.push("high_split");
        }
        out
    }
}

/// Evaluates the chain inequalities for `u` at cutoff `m` in double
/// precision.
pub fn chain_check<T: Real>(u: &SpectralField<T>, m: f64) -> ChainCheck {
    let u = u.cast::<f64>();
    let grid = u.grid();
    let sup_norm = u.max_speed(&mut Fft3::new(grid.n()));
    let split = u.spectral_mass_split(m);
    let count = lattice_count(m.min(grid.max_resolved_radius()));
    let r2 = crate::spectral::ball_sq_radius(m);
    let tail: f64 = grid
        .retained()
        .map(|(_, k)| norm_sq(k))
        .filter(|&k2| k2 > r2)
        .map(|k2| 1.0 / (k2 as f64 * k2 as f64))
        .sum();
    ChainCheck {
        m,
        sup_norm,
        abs_sum: u.abs_sum(),
        low: split.low,
        low_bound: (count as f64).sqrt() * u.l2_sq().sqrt(),
        high: split.high,
        high_bound: tail.sqrt() * u.lap_sq().sqrt(),
    }
}

fn cutoff(grad_sq: f64, nu: f64, c1: f64) -> f64 {
    if grad_sq > 0.0 {
        choose_cutoff(grad_sq, nu, c1)
    } else {
        0.0
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Runs the interval procedure on `traj` and checks its claims.
///
/// Violations become entries of [`BoundReport::notes`]; nothing here fails.
/// `checkpoints` must come from the same run (`nu` is the run's viscosity).
pub fn verify_trajectory<T: Real>(
    traj: &Trajectory,
    checkpoints: &[Checkpoint<T>],
    nu: f64,
    monitor: &MonitorConfig,
    provenance: &Provenance,
) -> BoundReport {
    let constants = monitor.constants();
    let (c1, c_local) = (constants.c1, constants.c_local);
    let samples: &[TrajectorySample] = &traj.samples;
    let mut notes = Vec::new();
    let by_sample: BTreeMap<usize, &Checkpoint<T>> = checkpoints.iter().map(|c| (c.sample, c)).collect();

    let (e0, g0) = samples.first().map_or((0.0, 0.0), |s| (s.energy, s.grad_sq));
    if samples.is_empty() {
        notes.push("empty_trajectory".to_string());
    }

    // energy inequality
    let energy_residual = samples
        .iter()
        .map(|s| s.energy + s.dissipation_integral - e0)
        .fold(0.0f64, f64::max);
    if !(energy_residual <= ENERGY_TOLERANCE * e0) {
        notes.push("energy_inequality_violated".to_string());
    }

    // checkpoints: consistency with the trajectory and chain inequalities
    let mut chain_failures = 0usize;
    for ck in checkpoints {
        let Some(s) = samples.get(ck.sample) else {
            notes.push(format!("checkpoint_mismatch:sample={}", ck.sample));
            continue;
        };
        let grad_sq = ck.field.grad_sq().f64();
        if ck.t != s.t || ck.nu != nu || !rel_close(grad_sq, s.grad_sq, 1e-12) {
            notes.push(format!("checkpoint_mismatch:sample={}", ck.sample));
        }
        let mut cutoffs = vec![s.active_m];
        cutoffs.extend(CHAIN_CUTOFFS);
        for m in cutoffs.into_iter().filter(|&m| m > 0.0) {
            for name in chain_check(&ck.field, m).failures(CHAIN_TOLERANCE) {
                chain_failures += 1;
                notes.push(format!("chain_check_failed:{name}:sample={}:m={m:e}", ck.sample));
            }
        }
    }

    // interval procedure from t₀, the first sample after t = 0
    let first = samples.iter().position(|s| s.t > 0.0);
    let mut intervals = Vec::new();
    let mut hysteresis = monitor.hysteresis.unwrap_or(0.0);
    if let Some(first) = first.filter(|&i| samples[i].grad_sq > 0.0) {
        hysteresis = monitor
            .hysteresis
            .unwrap_or(DEFAULT_RELATIVE_HYSTERESIS * samples[first].abs_sum_total);
        let series: Vec<(f64, f64)> = samples[first..].iter().map(|s| (s.t, s.f_m)).collect();
        for sk in detect_intervals(&series, hysteresis) {
            let (start, end) = (sk.start + first, sk.end + first);
            let j = intervals.len();
            if sk.t_end - sk.t_start <= monitor.min_interval {
                continue;
            }
            let s0 = &samples[start];
            let m = cutoff(s0.grad_sq, nu, c1);
            let recorded_m = if j == 0 && sk.start == 0 {
                Some(s0.active_m)
            } else {
                samples.get(start + 1).filter(|_| start < end).map(|s| s.active_m)
            };
            if recorded_m.is_some_and(|r| r != m) {
                notes.push(format!("cutoff_mismatch:interval={j}"));
            }
            if !(m * c1 * nu * nu > 4.0 * s0.grad_sq) {
                notes.push(format!("cutoff_threshold_violated:interval={j}"));
            }
            let verifiable = by_sample.contains_key(&start);
            if !verifiable {
                notes.push(format!("interval_unverifiable:interval={j}"));
            }
            let run = &samples[start..=end];
            let mut record = IntervalRecord {
                j,
                t_start: sk.t_start,
                t_end: sk.t_end,
                m_j: m,
                case_label: sk.label,
                grad_sq_start: s0.grad_sq,
                grad_sq_end: samples[end].grad_sq,
                bound_value_at_end: samples[end].grad_sq,
                satisfied: true,
                margin_min: None,
                verifiable,
            };
            match sk.label {
                CaseLabel::LowDominant => {
                    let bound = |s: &TrajectorySample| case1_bound(s0.grad_sq, m, e0, nu, s.t - s0.t);
                    record.bound_value_at_end = bound(&samples[end]);
                    record.satisfied = run
                        .iter()
                        .all(|s| s.grad_sq <= bound(s) * (1.0 + CHAIN_TOLERANCE));
                    if !record.satisfied {
                        notes.push(format!("case1_bound_violated:interval={j}"));
                    }
                }
                CaseLabel::HighDominant => {
                    let margin = |s: &TrajectorySample| case2_margin_from_grad(s.grad_sq.sqrt(), m, nu, c1);
                    record.margin_min = run.iter().map(margin).reduce(f64::min);
                    if !(margin(s0) > 0.0) {
                        notes.push(format!("case2_margin_nonpositive:interval={j}"));
                    }
                    let violations = run
                        .windows(2)
                        .filter(|w| margin(&w[0]) > 0.0)
                        .filter(|w| w[1].grad_sq > w[0].grad_sq * (1.0 + NONINCREASE_TOLERANCE))
                        .count();
                    if violations > 0 {
                        notes.push(format!("case2_nonincrease_violated:interval={j}:pairs={violations}"));
                    }
                    record.bound_value_at_end = s0.grad_sq;
                    let capped = run
                        .iter()
                        .all(|s| s.grad_sq <= s0.grad_sq * (1.0 + NONINCREASE_TOLERANCE));
                    if !capped {
                        notes.push(format!("case2_bound_violated:interval={j}"));
                    }
                    record.satisfied = violations == 0 && capped;
                }
                CaseLabel::Mixed => {}
            }
            intervals.push(record);
        }
    }

    // local envelope W(t)
    let (valid_until, satisfied_within_window) = if g0 > 0.0 {
        let expiry = envelope_expiry(g0, c_local);
        let ok = samples.iter().all(|s| match local_envelope_W(s.t, g0, c_local) {
            Envelope::Value(w) => s.grad_sq <= w * (1.0 + CHAIN_TOLERANCE),
            Envelope::Expired => true,
        });
        (expiry, ok)
    } else {
        let ok = samples.iter().all(|s| s.grad_sq == 0.0);
        (f64::INFINITY, ok)
    };
    if !satisfied_within_window {
        notes.push("w_envelope_violated".to_string());
    }
    let case2_time = intervals
        .iter()
        .filter(|r| r.case_label == CaseLabel::HighDominant)
        .map(|r| r.t_end - r.t_start)
        .fold(0.0, |a, b| a + b);

    BoundReport {
        intervals,
        energy_residual,
        chain_failures,
        w_envelope: WEnvelope {
            valid_until,
            satisfied_within_window,
            case2_time,
            extended_valid_until: valid_until + case2_time,
        },
        global_sup_grad_sq: samples.iter().map(|s| s.grad_sq).fold(0.0, f64::max),
        notes,
        constants_used: ConstantsUsed {
            c1,
            c1_mode: monitor.c1_mode.as_str().to_string(),
            c2: constants.c2,
            c_local,
            hysteresis,
            nu,
            u0_l2_sq: e0,
            rng: provenance.rng.clone(),
            seed: provenance.seed,
        },
    }
}
