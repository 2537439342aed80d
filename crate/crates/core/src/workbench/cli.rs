//! `tns` command-line interface.
//!
//! Exit status: 0 success, 2 configuration or input error, 3 blow-up,
//! 4 verification notes present.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::{ExperimentConfig, IcKind};
use super::{lattice_table, oracle_compare, run_experiment, verify_files};
use crate::error::{Error, Result};
use crate::monitor::BoundReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_NOTES: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tns", version, about = "Pseudospectral Navier-Stokes solver with a spectral regularity monitor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate, then write trajectory.csv, checkpoints/ and report.json.
    Run {
        /// Experiment configuration (TOML).
        #[arg(value_name = "CONFIG")]
        config_path: Option<PathBuf>,
        #[arg(long, value_name = "PATH", conflicts_with = "config_path")]
        config: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        tend: Option<f64>,
        /// taylor_green, abc or random_band.
        #[arg(long)]
        ic: Option<String>,
    },
    /// Check a stored trajectory against its checkpoints.
    Verify {
        trajectory: PathBuf,
        checkpoints: PathBuf,
        /// Configuration whose [monitor] section supplies the constants.
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
    /// Print lattice counts, tails and the calibrated constants for m = 1..=M.
    Lattice {
        m_max: u32,
    },
    /// Compare the pseudospectral advection term with direct summation.
    Oracle {
        n: usize,
        seed: u64,
    },
}

fn report_status(report: &BoundReport) -> i32 {
    if report.notes.is_empty() {
        EXIT_OK
    } else {
        EXIT_NOTES
    }
}

fn build_config(
    path: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    resolution: Option<usize>,
    nu: Option<f64>,
    tend: Option<f64>,
    ic: Option<String>,
) -> Result<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(&p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = out {
        cfg.output.dir = v;
    }
    if let Some(v) = seed {
        cfg.initial_condition.seed = v;
    }
    if let Some(v) = resolution {
        cfg.solver.resolution = v;
    }
    if let Some(v) = nu {
        cfg.solver.nu = v;
    }
    if let Some(v) = tend {
        cfg.solver.t_end = v;
    }
    if let Some(v) = ic {
        cfg.initial_condition.kind = v.parse::<IcKind>()?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Run {
            config_path,
            config,
            out: dir,
            seed,
            resolution,
            nu,
            tend,
            ic,
        } => {
            let cfg = build_config(config_path.or(config), dir, seed, resolution, nu, tend, ic)?;
            let result = run_experiment(&cfg)?;
            let r = &result.report;
            writeln!(
                out,
                "samples {}  intervals {}  chain_failures {}  notes {}",
                result.trajectory.len(),
                r.intervals.len(),
                r.chain_failures,
                r.notes.len()
            )?;
            for n in &r.notes {
                writeln!(out, "note {n}")?;
            }
            writeln!(out, "wrote {}", result.dir.display())?;
            if let Some(b) = result.blow_up {
                writeln!(out, "blow-up at t = {:e}, k = {:?}", b.t, b.k)?;
                return Ok(EXIT_BLOW_UP);
            }
            Ok(report_status(r))
        }
        Command::Verify {
            trajectory,
            checkpoints,
            config,
        } => {
            let monitor = match config {
                Some(p) => ExperimentConfig::load(&p)?.monitor,
                None => Default::default(),
            };
            let report = verify_files(&trajectory, &checkpoints, &monitor)?;
            out.write_all(report.to_json().as_bytes())?;
            Ok(report_status(&report))
        }
        Command::Lattice { m_max } => {
            let (rows, cal) = lattice_table(m_max);
            writeln!(out, "m,count,tail,tail_remainder_bound,m_tail,count_over_m3")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.m, r.count, r.tail, r.tail_remainder_bound, r.m_tail, r.count_ratio
                )?;
            }
            writeln!(out, "c1 {:.16e}", cal.c1)?;
            writeln!(out, "c2 {:.16e}", cal.c2)?;
            Ok(EXIT_OK)
        }
        Command::Oracle { n, seed } => {
            let c = oracle_compare(n, seed)?;
            writeln!(
                out,
                "N {}  seed {}  max|direct| {:.16e}  relative_error {:.16e}",
                c.n, c.seed, c.reference_max, c.relative_error
            )?;
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Normal output goes to `out`, diagnostics to stderr.
pub fn main_with<I, A>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::BlowUp { .. } => EXIT_BLOW_UP,
                e if e.is_config() => EXIT_CONFIG,
                _ => 1,
            }
        }
    }
}
