//! Integrating-factor RK4 time stepping of the truncated system, the CFL
//! rule, and the sampled run loop that feeds the monitor.

mod config;
pub mod checkpoint;
pub mod trajectory;

use num_complex::Complex;
use num_traits::Zero;

pub use checkpoint::Checkpoint;
pub use config::{SolverConfig, TimeStep};
pub use trajectory::{Trajectory, TrajectorySample};

use crate::error::{Error, Result};
use crate::monitor::{CutoffTracker, MonitorConfig};
use crate::nonlinear::AdvectionWorkspace;
use crate::spectral::{norm_sq, Fft3, Mode, SpectralField, WaveGrid, Wavevector};
use crate::Real;

/// Added to the maximum speed in [`cfl_dt`] so a zero field gets a finite step.
pub const SPEED_FLOOR: f64 = 1e-12;

/// Reusable state for stepping fields on one grid.
pub struct Stepper<T: Real> {
    grid: WaveGrid,
    nu: T,
    ksq: Vec<T>,
    advection: Option<AdvectionWorkspace<T>>,
    fft: Fft3<T>,
    // exp(−ν|k|²dt) and exp(−ν|k|²dt/2) for `factor_dt`
    factor_dt: Option<f64>,
    e: Vec<T>,
    eh: Vec<T>,
}

fn combine<T: Real>(len: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Vec<Mode<T>> {
    (0..len).map(|i| [f(i, 0), f(i, 1), f(i, 2)]).collect()
}

impl<T: Real> Stepper<T> {
    pub fn new(grid: WaveGrid, nu: f64) -> Self {
        let mut s = Self::without_advection(grid, nu);
        s.advection = Some(AdvectionWorkspace::new(grid));
        s
    }

    /// A stepper for the Stokes part only (advection switched off).
    pub fn without_advection(grid: WaveGrid, nu: f64) -> Self {
        let ksq = (0..grid.len())
            .map(|idx| T::of(norm_sq(grid.wavevector(idx)) as f64))
            .collect();
        Self {
            grid,
            nu: T::of(nu),
            ksq,
            advection: None,
            fft: Fft3::new(grid.n()),
            factor_dt: None,
            e: Vec::new(),
            eh: Vec::new(),
        }
    }

    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu.f64()
    }

    fn update_factors(&mut self, dt: f64) {
        if self.factor_dt == Some(dt) {
            return;
        }
        let h = T::of(dt);
        let half = T::of(0.5);
        let nu = self.nu;
        self.e = self.ksq.iter().map(|&k2| (-nu * k2 * h).exp()).collect();
        self.eh = self.ksq.iter().map(|&k2| (-nu * k2 * h * half).exp()).collect();
        self.factor_dt = Some(dt);
    }

    // −P P_n[(u·∇)u]
    fn rhs(&mut self, u: &SpectralField<T>, t: f64) -> Result<Vec<Mode<T>>> {
        let len = self.grid.len();
        match &mut self.advection {
            None => Ok(vec![[Complex::zero(); 3]; len]),
            Some(ws) => {
                if let Some(k) = first_nonfinite(u) {
                    return Err(Error::BlowUp { t, k });
                }
                let mut a = ws.advective_term(u)?.into_coeffs();
                for v in a.iter_mut() {
                    for c in v.iter_mut() {
                        *c = -*c;
                    }
                }
                Ok(a)
            }
        }
    }

    /// Advances `u` from `t` to `t + dt`.
    ///
    /// Fails with [`Error::BlowUp`] when a non-finite coefficient appears.
    pub fn step(&mut self, u: &SpectralField<T>, t: f64, dt: f64) -> Result<SpectralField<T>> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch(u.grid().n(), self.grid.n()));
        }
        self.update_factors(dt);
        let grid = self.grid;
        let len = grid.len();
        let h = T::of(dt);
        let h2 = T::of(0.5 * dt);
        let h6 = T::of(dt / 6.0);
        let two = T::of(2.0);
        let u0 = u.coeffs();
        let wrap = |c: Vec<Mode<T>>| SpectralField::from_coeffs_unchecked(grid, c);

        let a = self.rhs(u, t)?;
        let u2 = {
            let eh = &self.eh;
            wrap(combine(len, |i, c| (u0[i][c] + a[i][c] * h2) * eh[i]))
        };
        let b = self.rhs(&u2, t + 0.5 * dt)?;
        let u3 = {
            let eh = &self.eh;
            wrap(combine(len, |i, c| u0[i][c] * eh[i] + b[i][c] * h2))
        };
        let c3 = self.rhs(&u3, t + 0.5 * dt)?;
        let u4 = {
            let (e, eh) = (&self.e, &self.eh);
            wrap(combine(len, |i, c| u0[i][c] * e[i] + c3[i][c] * (eh[i] * h)))
        };
        let d = self.rhs(&u4, t + dt)?;
        let out = {
            let (e, eh) = (&self.e, &self.eh);
            wrap(combine(len, |i, c| {
                u0[i][c] * e[i] + (a[i][c] * e[i] + (b[i][c] + c3[i][c]) * (eh[i] * two) + d[i][c]) * h6
            }))
        };
        if let Some(k) = first_nonfinite(&out) {
            return Err(Error::BlowUp { t: t + dt, k });
        }
        Ok(out)
    }

    /// `safety·(2π/N)/(max|u(x)| + SPEED_FLOOR)`, capped at `dt_max`.
    pub fn cfl_dt(&mut self, u: &SpectralField<T>, safety: f64, dt_max: f64) -> f64 {
        let speed = u.max_speed(&mut self.fft).f64();
        (safety * self.grid.spacing() / (speed + SPEED_FLOOR)).min(dt_max)
    }
}

fn first_nonfinite<T: Real>(u: &SpectralField<T>) -> Option<Wavevector> {
    u.coeffs()
        .iter()
        .position(|v| v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()))
        .map(|idx| u.grid().wavevector(idx))
}

/// One step of size `dt` with a fresh [`Stepper`].
pub fn step<T: Real>(u: &SpectralField<T>, dt: f64, nu: f64) -> Result<SpectralField<T>> {
    Stepper::new(u.grid(), nu).step(u, 0.0, dt)
}

/// CFL step size for `u`; see [`Stepper::cfl_dt`].
pub fn cfl_dt<T: Real>(u: &SpectralField<T>, safety: f64, dt_max: f64) -> f64 {
    let grid = u.grid();
    let speed = u.max_speed(&mut Fft3::new(grid.n())).f64();
    (safety * grid.spacing() / (speed + SPEED_FLOOR)).min(dt_max)
}

/// Where a run stopped early.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowUp {
    pub t: f64,
    pub k: Wavevector,
}

/// Everything a run produces.
#[derive(Clone, Debug)]
pub struct RunOutput<T: Real> {
    pub trajectory: Trajectory,
    /// Field at the last recorded sample.
    pub final_field: SpectralField<T>,
    /// Snapshots keyed by sample index, in increasing order.
    pub checkpoints: Vec<Checkpoint<T>>,
    pub blow_up: Option<BlowUp>,
    /// Hysteresis band used for sign detection, if `t₀` was reached.
    pub hysteresis: Option<f64>,
}

struct Recorder<T: Real> {
    nu: f64,
    checkpoint_every: usize,
    tracker: CutoffTracker,
    out: RunOutput<T>,
}

impl<T: Real> Recorder<T> {
    fn record(&mut self, t: f64, u: &SpectralField<T>, last: bool) {
        let samples = &mut self.out.trajectory.samples;
        let index = samples.len();
        let grad_sq = u.grad_sq().f64();
        let obs = self.tracker.observe(t, u, grad_sq);
        let dissipation_integral = match samples.last() {
            None => 0.0,
            Some(p) => p.dissipation_integral + self.nu * 0.5 * (p.grad_sq + grad_sq) * (t - p.t),
        };
        samples.push(TrajectorySample {
            t,
            energy: u.l2_sq().f64(),
            grad_sq,
            lap_sq: u.lap_sq().f64(),
            abs_sum_total: u.abs_sum().f64(),
            f_m: obs.f_m,
            active_m: obs.active_m,
            dissipation_integral,
        });
        let periodic = self.checkpoint_every > 0 && index.is_multiple_of(self.checkpoint_every);
        if index == 0 || obs.interval_start || periodic || last {
            self.out.checkpoints.push(Checkpoint {
                sample: index,
                t,
                nu: self.nu,
                field: u.clone(),
            });
        }
        self.out.final_field = u.clone();
    }
}

/// Integrates `u0` to `solver.t_end`, sampling every `sample_every` steps and
/// at the final time.
///
/// Fixed steps use `ceil(t_end/dt)` steps at times `i·dt`, the last one
/// shortened to land on `t_end`. A blow-up ends the run early and is reported
/// in [`RunOutput::blow_up`] with the samples recorded so far.
pub fn run<T: Real>(
    solver: &SolverConfig,
    monitor: &MonitorConfig,
    u0: SpectralField<T>,
) -> Result<RunOutput<T>> {
    solver.validate()?;
    monitor.validate()?;
    let grid = u0.grid();
    if grid.n() != solver.resolution {
        return Err(Error::GridMismatch(grid.n(), solver.resolution));
    }
    let constants = monitor.constants();
    let mut stepper = Stepper::new(grid, solver.nu);
    let mut rec = Recorder {
        nu: solver.nu,
        checkpoint_every: solver.checkpoint_every,
        tracker: CutoffTracker::new(solver.nu, constants.c1, monitor.hysteresis),
        out: RunOutput {
            trajectory: Trajectory::default(),
            final_field: u0.clone(),
            checkpoints: Vec::new(),
            blow_up: None,
            hysteresis: None,
        },
    };
    rec.record(0.0, &u0, false);

    let t_end = solver.t_end;
    let mut u = u0;
    let mut t = 0.0;
    let mut steps = 0usize;
    let fixed_steps = match solver.time_step()? {
        TimeStep::Fixed(dt) => Some(((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize),
        TimeStep::Cfl { .. } => None,
    };
    loop {
        let (dt, t_next, last) = match (solver.time_step()?, fixed_steps) {
            (TimeStep::Fixed(dt), Some(n)) => {
                let last = steps + 1 == n;
                let t_next = if last { t_end } else { (steps + 1) as f64 * dt };
                (t_next - t, t_next, last)
            }
            (TimeStep::Cfl { safety, dt_max }, _) => {
                let dt = stepper.cfl_dt(&u, safety, dt_max);
                if t + dt >= t_end * (1.0 - 1e-12) {
                    (t_end - t, t_end, true)
                } else {
                    (dt, t + dt, false)
                }
            }
            _ => unreachable!("fixed step count is set for fixed steps"),
        };
        match stepper.step(&u, t, dt) {
            Ok(next) => u = next,
            Err(Error::BlowUp { t, k }) => {
                rec.out.blow_up = Some(BlowUp { t, k });
                break;
            }
            Err(e) => return Err(e),
        }
        t = t_next;
        steps += 1;
        if last || steps.is_multiple_of(solver.sample_every) {
            rec.record(t, &u, last);
        }
        if last {
            break;
        }
    }
    rec.out.hysteresis = rec.tracker.hysteresis();
    Ok(rec.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::ic;

    #[test]
    fn single_pair_decays_exactly() {
        let grid = WaveGrid::new(16).unwrap();
        let z = Complex::new(0.0, 0.0);
        let u = SpectralField::<f64>::synthesize(
            grid,
            [([1, 2, 0], [Complex::new(0.6, 0.2), Complex::new(-0.3, -0.1), z])],
        )
        .unwrap();
        let (nu, dt) = (0.3, 0.07);
        let next = step(&u, dt, nu).unwrap();
        let expected = u.scaled((-nu * 5.0 * dt).exp());
        assert!(next.max_abs_diff(&expected) <= 1e-14 * u.max_abs());
    }

    #[test]
    fn taylor_green_one_step() {
        let grid = WaveGrid::new(16).unwrap();
        let u = ic::taylor_green::<f64>(grid, 1.0);
        let next = step(&u, 1e-3, 0.1).unwrap();
        let expected = u.scaled((-2.0f64 * 0.1 * 1e-3).exp());
        assert!(next.max_abs_diff(&expected) <= 1e-12);
        for (idx, v) in next.coeffs().iter().enumerate() {
            if norm_sq(grid.wavevector(idx)) != 2 {
                assert!(v.iter().all(|c| c.norm() < 1e-15));
            }
        }
    }

    #[test]
    fn stokes_stepper_is_exact_on_random_fields() {
        let grid = WaveGrid::new(12).unwrap();
        let u = ic::random_solenoidal::<f64>(grid, 4.0, 11);
        let mut s = Stepper::<f64>::without_advection(grid, 0.2);
        let next = s.step(&u, 0.0, 0.05).unwrap();
        for (idx, (a, b)) in u.coeffs().iter().zip(next.coeffs()).enumerate() {
            let f = (-0.2 * norm_sq(grid.wavevector(idx)) as f64 * 0.05).exp();
            for c in 0..3 {
                assert!((a[c] * f - b[c]).norm() <= 1e-15 * u.max_abs());
            }
        }
    }

    #[test]
    fn cfl_examples() {
        let grid = WaveGrid::new(32).unwrap();
        let tg = ic::taylor_green::<f64>(grid, 1.0);
        let spacing = 2.0 * std::f64::consts::PI / 32.0;
        assert!((cfl_dt(&tg, 0.5, 1.0) - 0.5 * spacing).abs() < 1e-12);
        let doubled = cfl_dt(&tg.scaled(2.0), 0.5, 1.0);
        assert!((doubled - 0.25 * spacing).abs() < 1e-12);
        assert_eq!(cfl_dt(&tg.scaled(2.0), 0.5, 1e-3), 1e-3);
        let zero = SpectralField::<f64>::zeros(grid);
        assert_eq!(cfl_dt(&zero, 0.5, 0.01), 0.01);
        assert_eq!(cfl_dt(&zero, 0.5, f64::INFINITY), 0.5 * spacing / SPEED_FLOOR);
    }

    #[test]
    fn non_finite_input_is_a_blow_up() {
        let grid = WaveGrid::new(8).unwrap();
        let mut u = ic::taylor_green::<f64>(grid, 1.0);
        let idx = grid.index_of([1, 1, 0]).unwrap();
        u.coeffs_mut()[idx][0] = Complex::new(f64::NAN, 0.0);
        match step(&u, 1e-3, 0.1) {
            Err(Error::BlowUp { k, .. }) => assert_eq!(k, [1, 1, 0]),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let grid = WaveGrid::new(8).unwrap();
        let solver = SolverConfig {
            resolution: 8,
            nu: 0.1,
            dt: Some(0.01),
            t_end: 0.1,
            sample_every: 2,
            ..SolverConfig::default()
        };
        let out = run(&solver, &MonitorConfig::default(), SpectralField::<f64>::zeros(grid)).unwrap();
        assert!(out.blow_up.is_none());
        assert_eq!(out.trajectory.len(), 6);
        for s in &out.trajectory.samples {
            assert_eq!(
                [s.energy, s.grad_sq, s.lap_sq, s.abs_sum_total, s.f_m, s.dissipation_integral],
                [0.0; 6]
            );
        }
        assert_eq!(out.trajectory.samples.last().unwrap().t, 0.1);
        assert_eq!(out.final_field.max_abs(), 0.0);
    }

    #[test]
    fn sampling_and_final_time() {
        let grid = WaveGrid::new(8).unwrap();
        let solver = SolverConfig {
            resolution: 8,
            nu: 0.1,
            dt: Some(0.03),
            t_end: 0.1,
            sample_every: 2,
            checkpoint_every: 0,
            ..SolverConfig::default()
        };
        let out = run(&solver, &MonitorConfig::default(), ic::taylor_green::<f64>(grid, 1.0)).unwrap();
        let ts: Vec<f64> = out.trajectory.samples.iter().map(|s| s.t).collect();
        assert_eq!(ts, vec![0.0, 0.06, 0.1]);
        let samples: Vec<usize> = out.checkpoints.iter().map(|c| c.sample).collect();
        assert_eq!(samples, vec![0, 1, 2]);
    }
}
