use std::collections::HashMap;

use num_complex::Complex;
use num_traits::Zero;

use super::fft::Fft3;
use super::grid::{ball_sq_radius, norm_sq, WaveGrid, Wavevector};
use crate::error::{Error, Result};
use crate::Real;

/// Complex 3-vector of Fourier amplitudes at one wavevector.
pub type Mode<T> = [Complex<T>; 3];

/// Low/high spectral mass `(Σ_{|k|≤m}|û(k)|, Σ_{|k|>m}|û(k)|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassSplit<T> {
    pub low: T,
    pub high: T,
}

/// Real periodic velocity field on `[0, 2π)³` stored as Fourier coefficients.
///
/// The normalization is unitary in the sense `‖u‖²_{L²} = Σ_k |û(k)|²`, i.e.
/// `û(k)` is the Fourier-series coefficient of `u(x) = Σ_k û(k) e^{ik·x}`
/// and `L²` norms are box averages. Coefficients satisfy
/// `û(-k) = conj(û(k))`, and Nyquist planes are always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: WaveGrid,
    coeffs: Vec<Mode<T>>,
    mean_free: bool,
}

#[inline]
pub(crate) fn zero_mode<T: Real>() -> Mode<T> {
    [Complex::zero(); 3]
}

#[inline]
fn mode_norm_sq<T: Real>(v: &Mode<T>) -> T {
    v[0].norm_sqr() + v[1].norm_sqr() + v[2].norm_sqr()
}

#[inline]
pub(crate) fn mode_norm<T: Real>(v: &Mode<T>) -> T {
    mode_norm_sq(v).sqrt()
}

#[inline]
fn conj_mode<T: Real>(v: &Mode<T>) -> Mode<T> {
    [v[0].conj(), v[1].conj(), v[2].conj()]
}

impl<T: Real> SpectralField<T> {
    pub fn zeros(grid: WaveGrid) -> Self {
        Self {
            grid,
            coeffs: vec![zero_mode(); grid.len()],
            mean_free: true,
        }
    }

    /// Builds a field from a set of modes, completing Hermitian mirrors.
    ///
    /// Fails if a wavevector is not retained by the grid, if the mean mode is
    /// nonzero, or if `k` and `-k` (or two entries for the same `k`) are
    /// supplied with values that are not conjugate to each other.
    pub fn synthesize<I>(grid: WaveGrid, modes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Wavevector, Mode<T>)>,
    {
        let mut seen: HashMap<usize, Mode<T>> = HashMap::new();
        let mut field = Self::zeros(grid);
        for (k, v) in modes {
            if !grid.is_retained(k) {
                return Err(Error::OutsideGrid { k, n: grid.n() });
            }
            if k == [0, 0, 0] {
                if v.iter().any(|c| !c.is_zero()) {
                    return Err(Error::NonzeroMean);
                }
                continue;
            }
            let idx = grid.index_of(k).expect("retained");
            let mirror = grid.mirror_index(idx);
            let mirrored = conj_mode(&v);
            if let Some(prev) = seen.get(&idx) {
                if *prev != v {
                    return Err(Error::ConflictingMirror { k });
                }
            }
            if let Some(prev) = seen.get(&mirror) {
                if *prev != mirrored {
                    return Err(Error::ConflictingMirror { k });
                }
            }
            seen.insert(idx, v);
            seen.insert(mirror, mirrored);
            field.coeffs[idx] = v;
            field.coeffs[mirror] = mirrored;
        }
        Ok(field)
    }

    /// Wraps raw coefficients in index order after checking length, the
    /// Nyquist planes, and Hermitian symmetry (to a relative `1e-12` for
    /// `f64`, scaled with machine epsilon otherwise).
    pub fn from_coeffs(grid: WaveGrid, coeffs: Vec<Mode<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Config(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let field = Self {
            grid,
            coeffs,
            mean_free: true,
        };
        for (idx, v) in field.coeffs.iter().enumerate() {
            let k = grid.wavevector(idx);
            if grid.is_nyquist(k) && v.iter().any(|c| !c.is_zero()) {
                return Err(Error::OutsideGrid { k, n: grid.n() });
            }
        }
        if field.coeffs[0].iter().any(|c| !c.is_zero()) {
            return Err(Error::NonzeroMean);
        }
        let tol = T::of(1e-12).max(T::epsilon() * T::of(16.0)) * field.max_abs();
        if let Some(idx) = field.first_asymmetric(tol) {
            return Err(Error::ConflictingMirror {
                k: grid.wavevector(idx),
            });
        }
        Ok(field)
    }

    pub(crate) fn from_coeffs_unchecked(grid: WaveGrid, coeffs: Vec<Mode<T>>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid,
            coeffs,
            mean_free: true,
        }
    }

    #[inline]
    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Mode<T>] {
        &self.coeffs
    }

    #[inline]
    pub(crate) fn into_coeffs(self) -> Vec<Mode<T>> {
        self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Mode<T>] {
        &mut self.coeffs
    }

    #[inline]
    pub fn mean_free(&self) -> bool {
        self.mean_free
    }

    /// Coefficient at `k`, or `None` when `k` is outside the stored range.
    pub fn coeff(&self, k: Wavevector) -> Option<Mode<T>> {
        self.grid.index_of(k).map(|i| self.coeffs[i])
    }

    fn first_asymmetric(&self, tol: T) -> Option<usize> {
        self.coeffs.iter().enumerate().find_map(|(idx, v)| {
            let w = conj_mode(&self.coeffs[self.grid.mirror_index(idx)]);
            let d = [v[0] - w[0], v[1] - w[1], v[2] - w[2]];
            (mode_norm(&d) > tol).then_some(idx)
        })
    }

    /// `max_k |û(k) − conj(û(−k))|`.
    pub fn hermitian_defect(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let w = conj_mode(&self.coeffs[self.grid.mirror_index(idx)]);
                mode_norm(&[v[0] - w[0], v[1] - w[1], v[2] - w[2]])
            })
            .fold(T::zero(), T::max)
    }

    /// `max_k |û(k)|`.
    pub fn max_abs(&self) -> T {
        self.coeffs.iter().map(mode_norm).fold(T::zero(), T::max)
    }

    /// `max_k |û(k) − v̂(k)|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.grid, other.grid, "grids differ");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| mode_norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]]))
            .fold(T::zero(), T::max)
    }

    /// Number of wavevectors carrying a nonzero component.
    pub fn nonzero_modes(&self) -> usize {
        self.coeffs
            .iter()
            .filter(|v| v.iter().any(|c| !c.is_zero()))
            .count()
    }

    /// Leray projection `û ↦ û − k(k·û)/|k|²`; the mean mode is untouched.
    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        out.leray_project_in_place();
        out
    }

    pub(crate) fn leray_project_in_place(&mut self) {
        let grid = self.grid;
        for (idx, v) in self.coeffs.iter_mut().enumerate() {
            if mode_norm_sq(v).is_zero() {
                continue;
            }
            let k = grid.wavevector(idx);
            let k2 = norm_sq(k);
            if k2 == 0 {
                continue;
            }
            let kf = [T::of(k[0] as f64), T::of(k[1] as f64), T::of(k[2] as f64)];
            let kdotu = v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2];
            let s = kdotu / T::of(k2 as f64);
            for c in 0..3 {
                v[c] = v[c] - s * kf[c];
            }
        }
    }

    /// Sobolev norm from the lattice sum: `Σ|k|^{2s}|û|²` (homogeneous) or
    /// `Σ(1+|k|^{2s})|û|²`. For `s = 0` the homogeneous weight is `1` at every
    /// wavevector, so the result is the `L²` norm.
    pub fn sobolev_norm(&self, s: f64, homogeneous: bool) -> T {
        assert!(s >= 0.0, "Sobolev index must be non-negative");
        let mut acc = T::zero();
        for (idx, v) in self.coeffs.iter().enumerate() {
            let e = mode_norm_sq(v);
            if e.is_zero() {
                continue;
            }
            let k2 = norm_sq(self.grid.wavevector(idx)) as f64;
            let w = if s == 0.0 {
                1.0
            } else if k2 == 0.0 {
                0.0
            } else {
                k2.powf(s)
            };
            let w = if homogeneous { w } else { 1.0 + w };
            acc = acc + T::of(w) * e;
        }
        acc.sqrt()
    }

    fn weighted_sq(&self, power: u32) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !mode_norm_sq(v).is_zero())
            .map(|(idx, v)| {
                let k2 = norm_sq(self.grid.wavevector(idx));
                T::of(k2.pow(power) as f64) * mode_norm_sq(v)
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// `‖u‖²_{L²} = Σ|û|²`.
    pub fn l2_sq(&self) -> T {
        self.weighted_sq(0)
    }

    /// `‖∇u‖²_{L²} = Σ|k|²|û|²`.
    pub fn grad_sq(&self) -> T {
        self.weighted_sq(1)
    }

    /// `‖Δu‖²_{L²} = Σ|k|⁴|û|²`.
    pub fn lap_sq(&self) -> T {
        self.weighted_sq(2)
    }

    /// `Σ_k |û(k)|`, the pointwise upper bound on `|u(x)|`.
    pub fn abs_sum(&self) -> T {
        self.coeffs
            .iter()
            .map(mode_norm)
            .fold(T::zero(), |a, b| a + b)
    }

    /// Splits `Σ|û|` at radius `m`; the mean mode counts as low.
    pub fn spectral_mass_split(&self, m: f64) -> MassSplit<T> {
        let r2 = ball_sq_radius(m);
        let mut low = T::zero();
        let mut high = T::zero();
        for (idx, v) in self.coeffs.iter().enumerate() {
            let a = mode_norm(v);
            if a.is_zero() {
                continue;
            }
            if norm_sq(self.grid.wavevector(idx)) <= r2 {
                low = low + a;
            } else {
                high = high + a;
            }
        }
        MassSplit { low, high }
    }

    /// `max_k |k·û(k)|`.
    pub fn divergence_sup(&self) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, v)| !mode_norm_sq(v).is_zero())
            .map(|(idx, v)| {
                let k = self.grid.wavevector(idx);
                (v[0] * T::of(k[0] as f64) + v[1] * T::of(k[1] as f64) + v[2] * T::of(k[2] as f64))
                    .norm_sqr()
            })
            .fold(T::zero(), T::max)
            .sqrt()
    }

    /// Velocity components on the collocation grid `x_j = 2πj/N`.
    pub fn to_physical(&self, fft: &mut Fft3<T>) -> [Vec<T>; 3] {
        let len = self.grid.len();
        let mut packed: Vec<Complex<T>> = self
            .coeffs
            .iter()
            .map(|v| v[0] + v[1] * Complex::i())
            .collect();
        fft.inverse(&mut packed);
        let mut third: Vec<Complex<T>> = self.coeffs.iter().map(|v| v[2]).collect();
        fft.inverse(&mut third);
        let mut out = [vec![T::zero(); len], vec![T::zero(); len], vec![T::zero(); len]];
        for i in 0..len {
            out[0][i] = packed[i].re;
            out[1][i] = packed[i].im;
            out[2][i] = third[i].re;
        }
        out
    }

    /// Inverse of [`to_physical`](Self::to_physical); Nyquist planes are
    /// zeroed and the result is symmetrized to exact Hermitian form.
    pub fn from_physical(grid: WaveGrid, values: &[Vec<T>; 3], fft: &mut Fft3<T>) -> Self {
        let len = grid.len();
        assert!(values.iter().all(|v| v.len() == len), "buffer does not match grid");
        let mut comps: Vec<Vec<Complex<T>>> = values
            .iter()
            .map(|v| v.iter().map(|&x| Complex::new(x, T::zero())).collect())
            .collect();
        for c in comps.iter_mut() {
            fft.forward(c);
        }
        let mut field = Self::zeros(grid);
        let half = T::of(0.5);
        for idx in 0..len {
            let k = grid.wavevector(idx);
            if grid.is_nyquist(k) {
                continue;
            }
            let mirror = grid.mirror_index(idx);
            for c in 0..3 {
                field.coeffs[idx][c] = (comps[c][idx] + comps[c][mirror].conj()) * half;
            }
        }
        field.mean_free = field.coeffs[0].iter().all(|c| c.is_zero());
        field
    }

    /// `max_x |u(x)|` over collocation points.
    pub fn max_speed(&self, fft: &mut Fft3<T>) -> T {
        let [u, v, w] = self.to_physical(fft);
        (0..u.len())
            .map(|i| (u[i] * u[i] + v[i] * v[i] + w[i] * w[i]).sqrt())
            .fold(T::zero(), T::max)
    }

    /// Multiplies every coefficient by `a`.
    pub fn scaled(&self, a: T) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.iter_mut() {
            for c in v.iter_mut() {
                *c = *c * a;
            }
        }
        out
    }

    /// `self − other`.
    pub fn difference(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid, "grids differ");
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1], a[2] - b[2]])
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            mean_free: self.mean_free && other.mean_free,
        }
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> SpectralField<U> {
        let conv = |c: Complex<T>| Complex::new(U::of(c.re.f64()), U::of(c.im.f64()));
        SpectralField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .map(|v| [conv(v[0]), conv(v[1]), conv(v[2])])
                .collect(),
            mean_free: self.mean_free,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn z() -> Complex<f64> {
        c(0.0, 0.0)
    }

    fn grid() -> WaveGrid {
        WaveGrid::new(8).unwrap()
    }

    fn single(k: Wavevector, v: Mode<f64>) -> SpectralField<f64> {
        SpectralField::synthesize(grid(), [(k, v)]).unwrap()
    }

    #[test]
    fn synthesize_examples() {
        let empty = SpectralField::<f64>::synthesize(grid(), []).unwrap();
        assert_eq!(empty.l2_sq(), 0.0);
        assert_eq!(empty.abs_sum(), 0.0);
        assert_eq!(empty.nonzero_modes(), 0);

        let u = single([1, 0, 0], [z(), c(0.0, 1.0), z()]);
        assert_eq!(u.coeff([1, 0, 0]).unwrap(), [z(), c(0.0, 1.0), z()]);
        assert_eq!(u.coeff([-1, 0, 0]).unwrap(), [z(), c(0.0, -1.0), z()]);
        assert_eq!(u.nonzero_modes(), 2);

        let conflict = SpectralField::<f64>::synthesize(
            grid(),
            [([1, 0, 0], [z(), c(0.0, 1.0), z()]), ([-1, 0, 0], [z(), c(0.0, 2.0), z()])],
        );
        assert!(matches!(conflict, Err(Error::ConflictingMirror { .. })));

        let outside = SpectralField::<f64>::synthesize(grid(), [([4, 0, 0], [z(), c(1.0, 0.0), z()])]);
        assert!(matches!(outside, Err(Error::OutsideGrid { k: [4, 0, 0], n: 8 })));
        let mean = SpectralField::<f64>::synthesize(grid(), [([0, 0, 0], [c(1.0, 0.0), z(), z()])]);
        assert!(matches!(mean, Err(Error::NonzeroMean)));
    }

    #[test]
    fn from_coeffs_validates() {
        let g = grid();
        assert!(SpectralField::<f64>::from_coeffs(g, vec![zero_mode(); 3]).is_err());
        let mut coeffs = vec![zero_mode::<f64>(); g.len()];
        coeffs[g.index_of([1, 0, 0]).unwrap()] = [z(), c(1.0, 0.0), z()];
        assert!(SpectralField::from_coeffs(g, coeffs.clone()).is_err());
        coeffs[g.index_of([-1, 0, 0]).unwrap()] = [z(), c(1.0, 0.0), z()];
        assert!(SpectralField::from_coeffs(g, coeffs).is_ok());
    }

    #[test]
    fn leray_examples() {
        let longitudinal = single([1, 0, 0], [c(1.0, 0.0), z(), z()]).leray_project();
        assert_eq!(longitudinal.max_abs(), 0.0);
        let transverse = single([1, 0, 0], [z(), c(1.0, 0.0), z()]);
        assert_eq!(transverse.leray_project(), transverse);
        let diag = single([1, 1, 0], [c(1.0, 0.0), z(), z()]).leray_project();
        assert_eq!(diag.coeff([1, 1, 0]).unwrap(), [c(0.5, 0.0), c(-0.5, 0.0), z()]);
    }

    #[test]
    fn norm_examples() {
        let u = single([1, 0, 0], [z(), c(1.0, 0.0), z()]);
        assert!((u.sobolev_norm(1.0, true) - 2f64.sqrt()).abs() < 1e-15);
        assert!((u.sobolev_norm(0.0, true) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(u.l2_sq(), 2.0);
        assert_eq!(u.grad_sq(), 2.0);
        assert_eq!(u.lap_sq(), 2.0);
        let h1 = u.sobolev_norm(1.0, false);
        assert!((h1 * h1 - (u.l2_sq() + u.grad_sq())).abs() < 1e-14);
    }

    #[test]
    fn mass_split_examples() {
        let (a, b) = (0.75, 0.25);
        let u = SpectralField::<f64>::synthesize(
            grid(),
            [([1, 0, 0], [z(), c(a, 0.0), z()]), ([0, 3, 0], [c(0.0, b), z(), z()])],
        )
        .unwrap();
        let s = u.spectral_mass_split(2.0);
        assert_eq!((s.low, s.high), (2.0 * a, 2.0 * b));
        let s = u.spectral_mass_split(4.0);
        assert_eq!((s.low, s.high), (2.0 * a + 2.0 * b, 0.0));
        let s = u.spectral_mass_split(3.0);
        assert_eq!(s.high, 0.0);
    }

    #[test]
    fn divergence_examples() {
        let u = single([1, 0, 0], [c(1.0, 0.0), z(), z()]);
        assert_eq!(u.divergence_sup(), 1.0);
        assert_eq!(SpectralField::<f64>::zeros(grid()).divergence_sup(), 0.0);
    }

    #[test]
    fn physical_round_trip() {
        let g = grid();
        let u = single([1, 2, -1], [c(0.3, -0.2), c(0.1, 0.4), c(-0.5, 0.0)]);
        let mut fft = Fft3::new(g.n());
        let phys = u.to_physical(&mut fft);
        let back = SpectralField::from_physical(g, &phys, &mut fft);
        assert!(back.max_abs_diff(&u) < 1e-15);
        let x = 2.0 * std::f64::consts::PI / 8.0;
        // u_x at grid point (1, 0, 0): 2 Re(û e^{ik·x})
        let expected = 2.0 * (c(0.3, -0.2) * Complex::from_polar(1.0, x)).re;
        assert!((phys[0][64] - expected).abs() < 1e-14);
    }

    #[test]
    fn cast_preserves_values() {
        let u = single([1, 0, 0], [z(), c(0.5, 0.25), z()]);
        let single_precision: SpectralField<f32> = u.cast();
        assert_eq!(single_precision.cast::<f64>(), u);
    }
}
