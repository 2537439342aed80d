use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Diagnostics recorded at one sampled time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    /// `‖u(t)‖²_{L²}`.
    pub energy: f64,
    /// `‖∇u(t)‖²_{L²}`.
    pub grad_sq: f64,
    /// `‖Δu(t)‖²_{L²}`.
    pub lap_sq: f64,
    /// `Σ_k |û(k, t)|`.
    pub abs_sum_total: f64,
    /// `F_m(t)` for the active cutoff.
    pub f_m: f64,
    pub active_m: f64,
    /// `ν∫₀ᵗ‖∇u‖²dτ` by the trapezoid rule on the samples.
    pub dissipation_integral: f64,
}

/// Column order of `trajectory.csv`.
pub const CSV_COLUMNS: [&str; 8] = [
    "t",
    "energy",
    "grad_sq",
    "lap_sq",
    "abs_sum_total",
    "f_m",
    "active_m",
    "dissipation_integral",
];

impl TrajectorySample {
    fn values(&self) -> [f64; 8] {
        [
            self.t,
            self.energy,
            self.grad_sq,
            self.lap_sq,
            self.abs_sum_total,
            self.f_m,
            self.active_m,
            self.dissipation_integral,
        ]
    }

    fn from_values(v: [f64; 8]) -> Self {
        Self {
            t: v[0],
            energy: v[1],
            grad_sq: v[2],
            lap_sq: v[3],
            abs_sum_total: v[4],
            f_m: v[5],
            active_m: v[6],
            dissipation_integral: v[7],
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Time-ordered sequence of samples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for s in &self.samples {
            w.write_record(s.values().iter().map(|&v| fmt_f64(v))).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(input: R, path: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Trajectory {
            path: path.to_path_buf(),
            reason,
        };
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().ne(CSV_COLUMNS) {
            return Err(bad(format!("unexpected header {:?}", header)));
        }
        let mut samples = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 8 {
                return Err(bad(format!("row {}: expected 8 fields", line + 1)));
            }
            let mut v = [0.0; 8];
            for (slot, field) in v.iter_mut().zip(rec.iter()) {
                *slot = field
                    .trim()
                    .parse()
                    .map_err(|e| bad(format!("row {}: {field:?}: {e}", line + 1)))?;
            }
            let s = TrajectorySample::from_values(v);
            if let Some(prev) = samples.last() {
                let prev: &TrajectorySample = prev;
                if !(s.t > prev.t) {
                    return Err(bad(format!("row {}: time not increasing", line + 1)));
                }
            }
            samples.push(s);
        }
        Ok(Self { samples })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Trajectory {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::read_csv(std::io::BufReader::new(file), path)
    }
}
