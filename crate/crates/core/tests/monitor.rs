use proptest::prelude::*;
use tns_core::integrator::{self, SolverConfig, Trajectory};
use tns_core::monitor::lattice::{calibrate, default_calibration, lattice_tail, CALIBRATION_M_MAX};
use tns_core::monitor::{
    case1_bound, case1_bound_explicit, case2_margin_from_grad, choose_cutoff, classify,
    detect_intervals, envelope_expiry, lattice_count, local_envelope_W, verify_trajectory, CaseLabel,
    Envelope, MonitorConfig, Provenance,
};
use tns_core::spectral::WaveGrid;
use tns_core::workbench::config::{IcKind, InitialConditionSpec};
use tns_core::workbench::ic;
use tns_core::Field;

fn w(t: f64, g0: f64, c: f64) -> f64 {
    match local_envelope_W(t, g0, c) {
        Envelope::Value(v) => v,
        Envelope::Expired => panic!("expired at {t}"),
    }
}

#[test]
fn envelope_solves_its_ode() {
    for c in [0.5, 1.0, 2.0] {
        for g0 in [0.3, 1.0, 2.0] {
            let expiry = envelope_expiry(g0, c);
            for frac in [0.05, 0.2, 0.4, 0.6, 0.9] {
                let t = frac * expiry;
                let h = 1e-3 * (expiry - t);
                // fourth-order centered difference
                let d = (-w(t + 2.0 * h, g0, c) + 8.0 * w(t + h, g0, c) - 8.0 * w(t - h, g0, c)
                    + w(t - 2.0 * h, g0, c))
                    / (12.0 * h);
                let rhs = c * w(t, g0, c).powi(3);
                assert!(((d - rhs) / rhs).abs() <= 1e-10, "c={c} g0={g0} t={t}: {d} vs {rhs}");
            }
            assert_eq!(local_envelope_W(0.0, g0, c), Envelope::Value(g0));
            assert_eq!(local_envelope_W(expiry, g0, c), Envelope::Expired);
            assert!(matches!(local_envelope_W(expiry.next_down(), g0, c), Envelope::Value(v) if v > 1e6 * g0));
        }
    }
}

#[test]
fn calibration_is_stable_under_radius_doubling() {
    let base = default_calibration();
    let doubled = calibrate(CALIBRATION_M_MAX, 2.0);
    assert!(base.c1.is_finite() && base.c1 > 0.0);
    assert!(base.c2.is_finite() && base.c2 > 0.0);
    assert!(((base.c1 - doubled.c1) / base.c1).abs() <= 1e-6);
    assert!(((base.c2 - doubled.c2) / base.c2).abs() <= 1e-6);
    assert_eq!(base.c2, 7.0);
}

#[test]
fn calibrated_constants_bound_the_lattice_sums() {
    let cal = default_calibration();
    let mut m = 1.0;
    while m <= CALIBRATION_M_MAX {
        let count = lattice_count(m) as f64;
        assert!(count <= cal.c2 * m * m * m, "count at m = {m}");
        if m <= 16.0 || (m * 4.0).fract() == 0.0 {
            let tail = lattice_tail(m);
            assert!(m * tail.value <= cal.c1, "m·value at m = {m}");
            assert!(m * tail.completed() <= cal.c1 * (1.0 + 1e-12), "m·tail at m = {m}");
            assert!(tail.remainder >= -1e-12 && tail.remainder <= tail.remainder_bound);
        }
        m += 1.0 / 64.0;
    }
    // the supremum is approached from the left at |k|² = 2
    let near = 2f64.sqrt().next_down();
    assert!(near * lattice_tail(near).completed() > 0.999 * cal.c1);
}

#[test]
fn explicit_case1_bound_dominates_count_bound() {
    let cal = default_calibration();
    let (nu, u0) = (0.5, 0.8);
    for g in [0.5, 1.0, 2.0] {
        let m = choose_cutoff(g, nu, cal.c1);
        assert!(lattice_count(m) as f64 <= cal.c2 * m.powi(3));
        for dt in [0.0, 0.01, 0.1] {
            let counted = case1_bound(g, m, u0, nu, dt);
            let explicit = case1_bound_explicit(g, u0, nu, cal.c1, cal.c2, dt);
            assert!(explicit >= counted * (1.0 - 1e-12), "g={g} dt={dt}: {explicit} < {counted}");
        }
    }
}

proptest! {
    #[test]
    fn cutoff_exceeds_threshold(g in 1e-6f64..1e6, nu in 1e-3f64..10.0, c1 in 1e-2f64..100.0) {
        let m = choose_cutoff(g, nu, c1);
        prop_assert!(m * c1 * nu * nu > 4.0 * g);
        prop_assert!(((m - 8.0 * g / (c1 * nu * nu)) / m).abs() < 1e-14);
    }

    #[test]
    fn case1_bound_is_monotone(
        g in 0.01f64..2.0, m in 1.0f64..6.0, u0 in 0.01f64..1.0, nu in 0.5f64..2.0,
        dt in 0.0f64..0.05, extra in 0.0f64..0.05,
    ) {
        let b = case1_bound(g, m, u0, nu, dt);
        prop_assert!(case1_bound(g, m, u0, nu, dt + extra) >= b);
        prop_assert!(case1_bound(g, m + 1.0, u0, nu, dt) >= b);
        prop_assert!(case1_bound(g, m, u0 * 1.5, nu, dt) >= b);
        prop_assert_eq!(case1_bound(g, m, u0, nu, 0.0), g);
    }

    #[test]
    fn intervals_are_ordered_and_cover_out_of_band_samples(
        values in prop::collection::vec(-2.0f64..2.0, 1..60),
        eps in 0.0f64..0.5,
    ) {
        let series: Vec<(f64, f64)> = values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
        let iv = detect_intervals(&series, eps);
        prop_assert!(!iv.is_empty());
        prop_assert_eq!(iv[0].start, 0);
        prop_assert_eq!(iv.last().unwrap().end, series.len() - 1);
        for pair in iv.windows(2) {
            prop_assert_eq!(pair[0].end, pair[1].start);
            prop_assert!(pair[0].start < pair[1].start);
            prop_assert!(pair[0].label != pair[1].label);
        }
        for (i, &(_, v)) in series.iter().enumerate() {
            let owner = iv.iter().rev().find(|s| s.start <= i).unwrap();
            if let Some(label) = classify(v, eps) {
                prop_assert_eq!(owner.label, label);
            }
        }
        let mixed = iv.iter().any(|s| s.label == CaseLabel::Mixed);
        prop_assert_eq!(mixed, values.iter().all(|&v| classify(v, eps).is_none()));
    }
}

fn solver(n: usize, nu: f64, dt: f64, t_end: f64, sample_every: usize) -> SolverConfig {
    SolverConfig {
        resolution: n,
        nu,
        dt: Some(dt),
        cfl: None,
        t_end,
        sample_every,
        checkpoint_every: 0,
        ..SolverConfig::default()
    }
}

fn verify_run(s: &SolverConfig, monitor: &MonitorConfig, u0: Field) -> (Trajectory, tns_core::monitor::BoundReport) {
    let out = integrator::run(s, monitor, u0).unwrap();
    assert!(out.blow_up.is_none());
    let report = verify_trajectory(&out.trajectory, &out.checkpoints, s.nu, monitor, &Provenance::default());
    (out.trajectory, report)
}

#[test]
fn taylor_green_report_is_clean() {
    let s = solver(16, 0.1, 1e-2, 1.0, 5);
    let monitor = MonitorConfig::default();
    let (traj, r) = verify_run(&s, &monitor, ic::taylor_green(WaveGrid::new(16).unwrap(), 1.0));
    assert!(r.notes.is_empty(), "{:?}", r.notes);
    assert_eq!(r.intervals.len(), 1);
    assert_eq!(r.intervals[0].case_label, CaseLabel::LowDominant);
    assert!(r.intervals[0].satisfied);
    assert!(r.energy_residual <= 1e-8);
    assert_eq!(r.chain_failures, 0);
    assert_eq!(r.intervals[0].t_start, traj.samples[1].t);
    assert_eq!(r.intervals[0].t_end, 1.0);
}

#[test]
fn zero_field_report_is_empty() {
    let s = solver(8, 0.1, 1e-2, 0.1, 1);
    let (_, r) = verify_run(&s, &MonitorConfig::default(), Field::zeros(WaveGrid::new(8).unwrap()));
    assert!(r.intervals.is_empty());
    assert_eq!(r.energy_residual, 0.0);
    assert!(r.notes.is_empty(), "{:?}", r.notes);
}

#[test]
fn high_band_run_exercises_case_two() {
    let grid = WaveGrid::new(16).unwrap();
    let spec = InitialConditionSpec {
        kind: IcKind::RandomBand,
        amplitude: 0.1,
        band: [3.0, 5.0],
        seed: 12,
        ..Default::default()
    };
    let u0: Field = ic::from_spec(grid, &spec).unwrap();
    let s = solver(16, 0.05, 1e-2, 0.5, 2);
    let monitor = MonitorConfig::default();
    let c1 = monitor.constants().c1;
    let (traj, r) = verify_run(&s, &monitor, u0);
    assert!(!r.intervals.is_empty());
    assert_eq!(r.chain_failures, 0);
    assert!(r.energy_residual <= 1e-8 * traj.samples[0].energy);
    // tiling from t₀ to the last sample
    assert_eq!(r.intervals[0].t_start, traj.samples[1].t);
    assert_eq!(r.intervals.last().unwrap().t_end, 0.5);
    for pair in r.intervals.windows(2) {
        assert_eq!(pair[0].t_end, pair[1].t_start);
    }
    for iv in &r.intervals {
        assert!(iv.m_j * c1 * s.nu * s.nu > 4.0 * iv.grad_sq_start);
        if iv.case_label == CaseLabel::HighDominant {
            let margin = iv.margin_min.unwrap();
            assert!(margin <= case2_margin_from_grad(iv.grad_sq_start.sqrt(), iv.m_j, s.nu, c1));
            // the chosen cutoff gives ν(1 − c₁/√2) < 0 at t_j for calibrated c₁
            assert!(r.notes.iter().any(|n| n == &format!("case2_margin_nonpositive:interval={}", iv.j)));
        }
    }
    assert!(r.intervals.iter().any(|iv| iv.case_label == CaseLabel::HighDominant));
}

#[test]
fn missing_interval_checkpoint_is_flagged() {
    let s = solver(12, 0.1, 1e-2, 0.2, 2);
    let monitor = MonitorConfig::default();
    let out = integrator::run(&s, &monitor, ic::taylor_green::<f64>(WaveGrid::new(12).unwrap(), 1.0)).unwrap();
    let kept: Vec<_> = out.checkpoints.iter().filter(|c| c.sample != 1).cloned().collect();
    let r = verify_trajectory(&out.trajectory, &kept, s.nu, &monitor, &Provenance::default());
    assert!(!r.intervals[0].verifiable);
    assert!(r.notes.contains(&"interval_unverifiable:interval=0".to_string()));
}

#[test]
fn tampered_trajectory_is_detected() {
    let s = solver(12, 0.1, 1e-2, 0.2, 2);
    let monitor = MonitorConfig::default();
    let out = integrator::run(&s, &monitor, ic::taylor_green::<f64>(WaveGrid::new(12).unwrap(), 1.0)).unwrap();
    let mut traj = out.trajectory.clone();
    traj.samples[3].energy *= 1.1;
    traj.samples[1].grad_sq *= 1.5;
    let r = verify_trajectory(&traj, &out.checkpoints, s.nu, &monitor, &Provenance::default());
    assert!(r.notes.contains(&"energy_inequality_violated".to_string()));
    assert!(r.notes.iter().any(|n| n.starts_with("checkpoint_mismatch")));
    assert!(r.notes.iter().any(|n| n.starts_with("cutoff_mismatch")));
}
