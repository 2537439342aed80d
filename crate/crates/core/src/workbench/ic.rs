//! Initial conditions. Every generator returns a field inside the dealiasing
//! ball that is already Leray-projected.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::config::{IcKind, InitialConditionSpec};
use crate::error::{Error, Result};
use crate::spectral::{in_ball, norm_sq, zero_mode, Mode, SpectralField, WaveGrid, Wavevector};
use crate::Real;

/// Name and version of the generator behind every random initial condition.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64";

struct Builder {
    grid: WaveGrid,
    coeffs: Vec<Mode<f64>>,
}

impl Builder {
    fn new(grid: WaveGrid) -> Self {
        Self {
            grid,
            coeffs: vec![zero_mode(); grid.len()],
        }
    }

    /// Adds `value·e^{ik·x}` to component `c` together with its conjugate mirror.
    fn add(&mut self, c: usize, k: Wavevector, value: Complex<f64>) {
        let idx = self.grid.index_of(k).expect("mode inside grid");
        let mirror = self.grid.mirror_index(idx);
        self.coeffs[idx][c] += value;
        self.coeffs[mirror][c] += value.conj();
    }

    /// `a·sin(k·x)` in component `c`.
    fn sin(&mut self, c: usize, k: Wavevector, a: f64) {
        self.add(c, k, Complex::new(0.0, -a / 2.0));
    }

    /// `a·cos(k·x)` in component `c`.
    fn cos(&mut self, c: usize, k: Wavevector, a: f64) {
        self.add(c, k, Complex::new(a / 2.0, 0.0));
    }

    fn finish<T: Real>(self) -> SpectralField<T> {
        SpectralField::from_coeffs_unchecked(self.grid, self.coeffs).cast()
    }
}

/// `A·(sin x cos y, −cos x sin y, 0)`.
///
/// Eight nonzero component amplitudes of magnitude `A/4`, all at `|k|² = 2`;
/// `‖u‖² = A²/2` and `‖∇u‖² = A²`.
pub fn taylor_green<T: Real>(grid: WaveGrid, amplitude: f64) -> SpectralField<T> {
    let mut b = Builder::new(grid);
    for sx in [-1i64, 1] {
        for sy in [-1i64, 1] {
            let k = [sx, sy, 0];
            // only one of each ± pair; the mirror is added by the builder
            if sx < 0 {
                continue;
            }
            b.add(0, k, Complex::new(0.0, -(sx as f64) * amplitude / 4.0));
            b.add(1, k, Complex::new(0.0, (sy as f64) * amplitude / 4.0));
        }
    }
    b.finish()
}

/// Arnold-Beltrami-Childress flow
/// `(A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)`, with `curl u = u`.
pub fn abc<T: Real>(grid: WaveGrid, a: f64, b_coef: f64, c: f64) -> SpectralField<T> {
    let mut b = Builder::new(grid);
    b.sin(0, [0, 0, 1], a);
    b.cos(0, [0, 1, 0], c);
    b.sin(1, [1, 0, 0], b_coef);
    b.cos(1, [0, 0, 1], a);
    b.sin(2, [0, 1, 0], c);
    b.cos(2, [1, 0, 0], b_coef);
    b.finish()
}

fn is_canonical(k: Wavevector) -> bool {
    match k.iter().find(|&&c| c != 0) {
        Some(&c) => c > 0,
        None => false,
    }
}

/// Gaussian random transverse amplitudes on the shell `k_min ≤ |k| ≤ k_max`,
/// scaled by `|k|^slope`, unnormalized. Wavevectors are visited in index
/// order, so the result depends only on the arguments.
fn random_shell(grid: WaveGrid, k_min: f64, k_max: f64, slope: f64, seed: u64) -> Builder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(grid);
    for (idx, k) in grid.retained() {
        if !is_canonical(k) || !grid.in_dealias_ball(k) || !in_ball(k, k_max) {
            continue;
        }
        if (norm_sq(k) as f64) < k_min * k_min {
            continue;
        }
        let mut v = [Complex::new(0.0, 0.0); 3];
        for c in v.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *c = Complex::new(re, im);
        }
        let k2 = norm_sq(k) as f64;
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let dot = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
        let scale = k2.sqrt().powf(slope);
        let mirror = grid.mirror_index(idx);
        for c in 0..3 {
            let val = (v[c] - dot * kf[c] / k2) * scale;
            b.coeffs[idx][c] = val;
            b.coeffs[mirror][c] = val.conj();
        }
    }
    b
}

/// Random solenoidal field with flat spectrum on `1 ≤ |k| ≤ radius`
/// (clipped to the dealiasing ball).
pub fn random_solenoidal<T: Real>(grid: WaveGrid, radius: f64, seed: u64) -> SpectralField<T> {
    random_shell(grid, 1.0, radius, 0.0, seed).finish()
}

/// Random Hermitian, mean-free field on all retained wavevectors with
/// `|k| ≤ radius`, not projected. Used to exercise the projector.
pub fn random_field<T: Real>(grid: WaveGrid, radius: f64, seed: u64) -> SpectralField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = Builder::new(grid);
    for (idx, k) in grid.retained() {
        if !is_canonical(k) || !in_ball(k, radius) {
            continue;
        }
        let mirror = grid.mirror_index(idx);
        for c in 0..3 {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            b.coeffs[idx][c] = Complex::new(re, im);
            b.coeffs[mirror][c] = Complex::new(re, -im);
        }
    }
    b.finish()
}

/// Seeded random field on the band `k_min ≤ |k| ≤ k_max` with amplitudes
/// `∝ |k|^slope`, normalized so that `‖∇u‖ = amplitude`.
pub fn random_band<T: Real>(grid: WaveGrid, spec: &InitialConditionSpec) -> Result<SpectralField<T>> {
    let [k_min, k_max] = spec.band;
    let b = random_shell(grid, k_min, k_max, spec.slope, spec.seed);
    let field: SpectralField<f64> = SpectralField::from_coeffs_unchecked(b.grid, b.coeffs);
    let g = field.grad_sq().sqrt();
    if g == 0.0 {
        return Err(Error::InitialCondition(format!(
            "band [{k_min}, {k_max}] contains no retained wavevector"
        )));
    }
    Ok(field.scaled(spec.amplitude / g).cast())
}

/// Builds the initial condition described by `spec` on `grid`.
pub fn from_spec<T: Real>(grid: WaveGrid, spec: &InitialConditionSpec) -> Result<SpectralField<T>> {
    spec.validate(grid)?;
    Ok(match spec.kind {
        IcKind::TaylorGreen => taylor_green(grid, spec.amplitude),
        IcKind::Abc => {
            let [a, b, c] = spec.abc;
            abc(grid, spec.amplitude * a, spec.amplitude * b, spec.amplitude * c)
        }
        IcKind::RandomBand => random_band(grid, spec)?,
    })
}
