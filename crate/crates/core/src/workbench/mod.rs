//! Experiment orchestration: configuration, initial conditions, file output
//! and the command-line front end.

pub mod cli;
pub mod config;
pub mod ic;

use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, IcKind, InitialConditionSpec, OutputConfig};

use crate::error::{Error, Result};
use crate::integrator::{self, checkpoint, BlowUp, Trajectory};
use crate::monitor::lattice::{default_calibration, lattice_count, lattice_tail, Calibration};
use crate::monitor::{verify_trajectory, BoundReport, MonitorConfig, Provenance};
use crate::nonlinear::{advective_term_direct, AdvectionWorkspace};
use crate::spectral::WaveGrid;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const REPORT_FILE: &str = "report.json";
pub const CHECKPOINT_DIR: &str = "checkpoints";

/// Result of [`run_experiment`].
#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub report: BoundReport,
    pub trajectory: Trajectory,
    pub blow_up: Option<BlowUp>,
    pub dir: PathBuf,
}

fn provenance(cfg: &ExperimentConfig) -> Provenance {
    match cfg.initial_condition.kind {
        IcKind::RandomBand => Provenance {
            rng: Some(ic::RNG_NAME.to_string()),
            seed: Some(cfg.initial_condition.seed),
        },
        _ => Provenance::default(),
    }
}

/// Runs the solver, verifies the trajectory and writes `trajectory.csv`,
/// `report.json` and (optionally) `checkpoints/` under `cfg.output.dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let grid = cfg.solver.grid()?;
    let u0 = ic::from_spec::<f64>(grid, &cfg.initial_condition)?;
    let out = integrator::run(&cfg.solver, &cfg.monitor, u0)?;

    let dir = cfg.output.dir.clone();
    std::fs::create_dir_all(&dir)?;
    out.trajectory.save(&dir.join(TRAJECTORY_FILE))?;
    if cfg.output.write_checkpoints {
        let ck_dir = dir.join(CHECKPOINT_DIR);
        if ck_dir.exists() {
            for entry in std::fs::read_dir(&ck_dir)? {
                let path = entry?.path();
                if path.extension().is_some_and(|e| e == "bin") {
                    std::fs::remove_file(path)?;
                }
            }
        }
        std::fs::create_dir_all(&ck_dir)?;
        for ck in &out.checkpoints {
            checkpoint::write(&ck_dir, ck)?;
        }
    }
    let mut report = verify_trajectory(
        &out.trajectory,
        &out.checkpoints,
        cfg.solver.nu,
        &cfg.monitor,
        &provenance(cfg),
    );
    if let Some(b) = out.blow_up {
        report
            .notes
            .push(format!("blow_up:t={:e}:k={},{},{}", b.t, b.k[0], b.k[1], b.k[2]));
    }
    std::fs::write(dir.join(REPORT_FILE), report.to_json())?;
    Ok(ExperimentOutput {
        report,
        trajectory: out.trajectory,
        blow_up: out.blow_up,
        dir,
    })
}

/// Verifies a stored trajectory against the checkpoints in `checkpoint_dir`.
/// The viscosity is read from the checkpoint headers.
pub fn verify_files(trajectory: &Path, checkpoint_dir: &Path, monitor: &MonitorConfig) -> Result<BoundReport> {
    monitor.validate()?;
    let traj = Trajectory::load(trajectory)?;
    let checkpoints: Vec<_> = checkpoint::read_dir::<f64>(checkpoint_dir)?.into_values().collect();
    let Some(first) = checkpoints.first() else {
        return Err(Error::Checkpoint {
            path: checkpoint_dir.to_path_buf(),
            reason: "no checkpoint files found".into(),
        });
    };
    let nu = first.nu;
    if checkpoints.iter().any(|c| c.nu != nu) {
        return Err(Error::Checkpoint {
            path: checkpoint_dir.to_path_buf(),
            reason: "checkpoints disagree on nu".into(),
        });
    }
    Ok(verify_trajectory(&traj, &checkpoints, nu, monitor, &Provenance::default()))
}

/// One row of the lattice table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeRow {
    pub m: f64,
    pub count: u64,
    pub tail: f64,
    pub tail_remainder_bound: f64,
    /// `m·(tail + remainder)`, the quantity bounded by `c₁`.
    pub m_tail: f64,
    /// `count/m³`, the quantity bounded by `c₂`.
    pub count_ratio: f64,
}

/// Rows for `m = 1, …, m_max` and the default calibration.
pub fn lattice_table(m_max: u32) -> (Vec<LatticeRow>, Calibration) {
    let rows = (1..=m_max)
        .map(|i| {
            let m = i as f64;
            let t = lattice_tail(m);
            let count = lattice_count(m);
            LatticeRow {
                m,
                count,
                tail: t.value,
                tail_remainder_bound: t.remainder_bound,
                m_tail: m * t.completed(),
                count_ratio: count as f64 / (m * m * m),
            }
        })
        .collect();
    (rows, default_calibration())
}

/// Pseudospectral vs direct advection on one random field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    pub n: usize,
    pub seed: u64,
    /// `max|a − b| / max|b|`.
    pub relative_error: f64,
    pub reference_max: f64,
}

/// Compares the pseudospectral advection term with the direct convolution on
/// a random divergence-free field filling the dealiasing ball.
pub fn oracle_compare(n: usize, seed: u64) -> Result<OracleComparison> {
    let grid = WaveGrid::new(n).map_err(|e| Error::Config(e.to_string()))?;
    let u = ic::random_solenoidal::<f64>(grid, grid.dealias_radius() as f64, seed);
    let fast = AdvectionWorkspace::new(grid).advective_term(&u)?;
    let direct = advective_term_direct(&u)?;
    let reference_max = direct.max_abs();
    let diff = fast.max_abs_diff(&direct);
    Ok(OracleComparison {
        n,
        seed,
        relative_error: if reference_max > 0.0 { diff / reference_max } else { diff },
        reference_max,
    })
}
