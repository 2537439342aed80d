//! Integer-lattice sums over `ℤ³`: ball counts `Σ_{|k|≤m} 1`, tails
//! `Σ_{|k|>m} |k|⁻⁴`, and the constants `c₁`, `c₂` calibrated from them.

use std::cell::Cell;
use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::spectral::ball_sq_radius;

/// Half the diagonal of the unit cube.
const HALF_DIAGONAL: f64 = 0.866_025_403_784_438_6;

thread_local! {
    static LAST_COUNT: Cell<(u64, u64)> = const { Cell::new((u64::MAX, 0)) };
}

/// Exact number of `k ∈ ℤ³` with `|k| ≤ m`, origin included.
///
/// Runs in `O(m²)`.
pub fn lattice_count(m: f64) -> u64 {
    let n = ball_sq_radius(m);
    let (cached_n, cached) = LAST_COUNT.with(Cell::get);
    if cached_n == n {
        return cached;
    }
    let r = n.isqrt();
    let mut count = 0u64;
    for x in 0..=r {
        let rest_x = n - x * x;
        let ry = rest_x.isqrt();
        let mut plane = 0u64;
        for y in 0..=ry {
            let col = 2 * (rest_x - y * y).isqrt() + 1;
            plane += if y == 0 { col } else { 2 * col };
        }
        count += if x == 0 { plane } else { 2 * plane };
    }
    LAST_COUNT.with(|c| c.set((n, count)));
    count
}

/// Rigorous lower bound `(4π/3)(m − √3/2)³ ≤ lattice_count(m)`: the unit
/// cubes centred on lattice points of the ball cover the ball of radius
/// `m − √3/2`.
pub fn lattice_count_lower_bound(m: f64) -> f64 {
    let r = (m - HALF_DIAGONAL).max(0.0);
    4.0 / 3.0 * PI * r * r * r
}

/// `Σ'_{k∈ℤ³} |k|⁻⁴` by Ewald splitting of the Epstein zeta function.
///
/// Both the direct and the reciprocal sums decay like `e^{-π|k|²}` and are
/// truncated at `|k|² ≤ 49`.
pub fn epstein_zeta_4() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| {
        let mut acc = 0.0;
        let r = 7i64;
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    let n = x * x + y * y + z * z;
                    if n == 0 || n > 49 {
                        continue;
                    }
                    let s = PI * n as f64;
                    // Γ(2, s)/s² + s^{1/2} Γ(-1/2, s)
                    acc += (1.0 + s) * (-s).exp() / (s * s)
                        + 2.0 * ((-s).exp() - (PI * s).sqrt() * libm::erfc(s.sqrt()));
                }
            }
        }
        PI * PI * (acc + 1.5)
    })
}

/// Representation counts `r₃(n) = #{k : |k|² = n}` for `n ≤ R²`.
pub struct ShellTable {
    radius_sq: u64,
    counts: Vec<u64>,
}

impl ShellTable {
    /// Enumerates every lattice point with `|k| ≤ radius`.
    pub fn new(radius: f64) -> Self {
        let radius_sq = ball_sq_radius(radius);
        let mut counts = vec![0u64; radius_sq as usize + 1];
        let r = radius_sq.isqrt();
        // sorted representatives 0 ≤ x ≤ y ≤ z with sign/permutation weights
        for x in 0..=r {
            let rx = radius_sq - x * x;
            if rx < x * x * 2 {
                break;
            }
            for y in x..=rx.isqrt() {
                let ry = rx - y * y;
                if ry < y * y {
                    break;
                }
                let zmax = ry.isqrt();
                for z in y..=zmax {
                    let n = x * x + y * y + z * z;
                    let perms = if x == y && y == z {
                        1
                    } else if x == y || y == z {
                        3
                    } else {
                        6
                    };
                    let nonzero = (x > 0) as u32 + (y > 0) as u32 + (z > 0) as u32;
                    counts[n as usize] += perms << nonzero;
                }
            }
        }
        Self { radius_sq, counts }
    }

    pub fn radius_sq(&self) -> u64 {
        self.radius_sq
    }

    /// `r₃(n)`.
    pub fn shell(&self, n: u64) -> u64 {
        self.counts[n as usize]
    }

    /// `Σ_{lo ≤ |k|² ≤ hi, k ≠ 0} |k|⁻⁴`, summed from the outermost shell in.
    pub fn inverse_fourth_sum(&self, lo: u64, hi: u64) -> f64 {
        let hi = hi.min(self.radius_sq);
        let lo = lo.max(1);
        if lo > hi {
            return 0.0;
        }
        (lo..=hi)
            .rev()
            .map(|n| {
                let nf = n as f64;
                self.counts[n as usize] as f64 / (nf * nf)
            })
            .sum()
    }

    /// `s[n] = Σ_{n ≤ |k|² ≤ R²}|k|⁻⁴` for `1 ≤ n ≤ R² + 1`, accumulated from
    /// the outermost shell in (`s[0]` is unused and zero).
    pub fn inverse_fourth_suffix(&self) -> Vec<f64> {
        let len = self.radius_sq as usize + 2;
        let mut s = vec![0.0; len];
        for n in (1..=self.radius_sq as usize).rev() {
            let nf = n as f64;
            s[n] = s[n + 1] + self.counts[n] as f64 / (nf * nf);
        }
        s
    }

    /// Number of lattice points with `|k|² ≤ n`.
    pub fn cumulative_count(&self, n: u64) -> u64 {
        self.counts[..=(n.min(self.radius_sq) as usize)].iter().sum()
    }
}

/// Truncated tail sum with a certified enclosure of the full tail:
/// `Σ_{|k|>m}|k|⁻⁴ ∈ [value, value + remainder_bound]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeTail {
    /// `Σ_{m<|k|≤R}|k|⁻⁴`.
    pub value: f64,
    /// Integral bound on `Σ_{|k|>R}|k|⁻⁴`.
    pub remainder_bound: f64,
    /// `Σ_{|k|>R}|k|⁻⁴` obtained as the Epstein zeta value minus the
    /// enumerated head; lies in `[0, remainder_bound]` up to rounding.
    pub remainder: f64,
    /// Enumeration radius `R`.
    pub radius: f64,
}

impl LatticeTail {
    /// Best estimate of the full tail, `value + remainder`.
    pub fn completed(&self) -> f64 {
        self.value + self.remainder
    }
}

/// Enumeration radius used for the tail beyond `m`: `max(100, 10m)`.
pub fn default_tail_radius(m: f64) -> f64 {
    (10.0 * m).max(100.0)
}

/// `∫_{|x|>R−√3/2} (|x|−√3/2)⁻⁴ dx`, an upper bound on `Σ_{|k|>R}|k|⁻⁴`.
pub fn tail_remainder_bound(radius: f64) -> f64 {
    let a = HALF_DIAGONAL;
    let s0 = radius - 2.0 * a;
    assert!(s0 > 0.0, "radius too small for the remainder bound");
    4.0 * PI * (1.0 / s0 + a / (s0 * s0) + a * a / (3.0 * s0 * s0 * s0))
}

/// `Σ_{|k|>m}|k|⁻⁴` enumerated to `R = max(100, 10m)` with remainder bound.
pub fn lattice_tail(m: f64) -> LatticeTail {
    let radius = default_tail_radius(m);
    lattice_tail_with(&ShellTable::new(radius), m, radius)
}

/// As [`lattice_tail`] with an explicit radius and a prebuilt table whose
/// radius is at least `radius`.
pub fn lattice_tail_with(table: &ShellTable, m: f64, radius: f64) -> LatticeTail {
    let r_sq = ball_sq_radius(radius);
    assert!(r_sq <= table.radius_sq(), "shell table too small");
    let m_sq = ball_sq_radius(m);
    let value = table.inverse_fourth_sum(m_sq + 1, r_sq);
    let head = table.inverse_fourth_sum(1, r_sq);
    LatticeTail {
        value,
        remainder_bound: tail_remainder_bound(radius),
        remainder: epstein_zeta_4() - head,
        radius,
    }
}

/// Calibrated lattice constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Calibration {
    /// `sup_{1≤m≤m_max} m·Σ_{|k|>m}|k|⁻⁴` over real `m`.
    pub c1: f64,
    /// `sup_{1≤m≤m_max} lattice_count(m)/m³` over real `m`.
    pub c2: f64,
    pub m_max: f64,
    /// Multiplier applied to the default enumeration radius.
    pub radius_factor: f64,
}

/// Largest cutoff considered when calibrating.
pub const CALIBRATION_M_MAX: f64 = 64.0;

/// Calibrates `c₁` and `c₂` over real `m ∈ [1, m_max]`.
///
/// `m·tail(m)` grows linearly between consecutive shell radii and drops at
/// each shell, so its supremum is a left limit `√n·Σ_{|k|²≥n}|k|⁻⁴` at some
/// shell `n ≤ m_max²`, or the value at `m_max`. `lattice_count(m)/m³` peaks
/// exactly on shells. Tails use the completed sum (enumerated part plus the
/// zeta remainder) with enumeration radius `radius_factor·max(100, 10m)`.
pub fn calibrate(m_max: f64, radius_factor: f64) -> Calibration {
    assert!(m_max >= 1.0 && radius_factor >= 1.0);
    let max_radius = radius_factor * default_tail_radius(m_max);
    let table = ShellTable::new(max_radius);
    let suffix = table.inverse_fourth_suffix();
    let zeta = epstein_zeta_4();
    // enumerated part up to R plus the zeta remainder beyond R
    let completed = |lo: u64, m: f64| {
        let r_sq = ball_sq_radius(radius_factor * default_tail_radius(m)) as usize;
        let value = suffix[lo as usize] - suffix[r_sq + 1];
        let head = suffix[1] - suffix[r_sq + 1];
        value + (zeta - head)
    };
    let n_max = ball_sq_radius(m_max);
    let mut c1 = m_max * completed(n_max + 1, m_max);
    let mut c2 = 0.0f64;
    let mut cumulative = 1u64;
    for n in 1..=n_max {
        let shell = table.shell(n);
        if shell == 0 {
            continue;
        }
        cumulative += shell;
        let r = (n as f64).sqrt();
        c2 = c2.max(cumulative as f64 / (r * r * r));
        if n > 1 {
            c1 = c1.max(r * completed(n, r));
        }
    }
    Calibration {
        c1,
        c2,
        m_max,
        radius_factor,
    }
}

/// The default calibration (`m_max = 64`, default radius), computed once.
pub fn default_calibration() -> Calibration {
    static CAL: OnceLock<Calibration> = OnceLock::new();
    *CAL.get_or_init(|| calibrate(CALIBRATION_M_MAX, 1.0))
}
