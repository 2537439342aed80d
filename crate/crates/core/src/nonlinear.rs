//! The projected, Galerkin-truncated advection term `P P_n[(u·∇)u]`.
//!
//! [`AdvectionWorkspace::advective_term`] evaluates the convective form in
//! collocation space with 2/3-rule dealiasing followed by a ball truncation
//! at `n = ⌊N/3⌋`. [`advective_term_direct`] evaluates the same truncated
//! convolution by brute force and serves as an oracle on small grids.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::spectral::{in_ball, mode_norm, norm_sq, zero_mode, Fft3, SpectralField, WaveGrid, Wavevector};
use crate::Real;

/// Zeroes every coefficient with `|k| > n`.
pub fn galerkin_truncate<T: Real>(u: &SpectralField<T>, n: f64) -> SpectralField<T> {
    let grid = u.grid();
    let mut out = u.clone();
    for (idx, v) in out.coeffs_mut().iter_mut().enumerate() {
        if !in_ball(grid.wavevector(idx), n) {
            *v = zero_mode();
        }
    }
    out
}

/// Relative divergence tolerance accepted by the advection operators.
fn divergence_tolerance<T: Real>(u: &SpectralField<T>) -> T {
    let grid = u.grid();
    let scale = u
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.iter().any(|c| !c.is_zero()))
        .map(|(idx, v)| T::of((norm_sq(grid.wavevector(idx)) as f64).sqrt()) * mode_norm(v))
        .fold(T::zero(), T::max);
    T::epsilon() * T::of(1e3) * scale
}

fn check_divergence<T: Real>(u: &SpectralField<T>) -> Result<()> {
    let sup = u.divergence_sup();
    let tol = divergence_tolerance(u);
    if sup > tol {
        return Err(Error::NotDivergenceFree {
            divergence_sup: sup.f64(),
            tolerance: tol.f64(),
        });
    }
    Ok(())
}

// Twelve real fields feed the product: u_i (0..3) and ∂_j u_i (3 + 3i + j).
// They are packed two per complex transform.
const PAIRS: [(usize, usize); 6] = [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)];

/// Buffers and plans for the pseudospectral advection term on one grid.
///
/// A workspace is not shareable between concurrent calls; use one per worker.
pub struct AdvectionWorkspace<T: Real> {
    grid: WaveGrid,
    fft: Fft3<T>,
    ball: Vec<(usize, Wavevector)>,
    packed: [Vec<Complex<T>>; 6],
    physical: Vec<[T; 12]>,
}

impl<T: Real> AdvectionWorkspace<T> {
    pub fn new(grid: WaveGrid) -> Self {
        let len = grid.len();
        let ball = grid
            .retained()
            .filter(|&(_, k)| grid.in_dealias_ball(k))
            .collect();
        let buf = || vec![Complex::<T>::zero(); len];
        Self {
            grid,
            fft: Fft3::new(grid.n()),
            ball,
            packed: [buf(), buf(), buf(), buf(), buf(), buf()],
            physical: vec![[T::zero(); 12]; len],
        }
    }

    pub fn grid(&self) -> WaveGrid {
        self.grid
    }

    /// Retained wavevectors of the dealiasing ball, in index order.
    pub fn mask(&self) -> &[(usize, Wavevector)] {
        &self.ball
    }

    pub fn fft(&mut self) -> &mut Fft3<T> {
        &mut self.fft
    }

    /// `P P_n[(u·∇)u]` with `n = ⌊N/3⌋`. Input modes outside the dealiasing
    /// ball are ignored.
    pub fn advective_term(&mut self, u: &SpectralField<T>) -> Result<SpectralField<T>> {
        if u.grid() != self.grid {
            return Err(Error::GridMismatch(u.grid().n(), self.grid.n()));
        }
        check_divergence(u)?;
        let coeffs = u.coeffs();
        let len = self.grid.len();
        let band = self.grid.dealias_radius() as usize;
        for buf in self.packed.iter_mut() {
            buf.iter_mut().for_each(|c| *c = Complex::zero());
        }
        let i = Complex::<T>::i();
        let spectrum = |f: usize, idx: usize, k: Wavevector| -> Complex<T> {
            if f < 3 {
                coeffs[idx][f]
            } else {
                let comp = (f - 3) / 3;
                let dir = (f - 3) % 3;
                coeffs[idx][comp] * i * T::of(k[dir] as f64)
            }
        };
        for &(idx, k) in &self.ball {
            for (p, &(a, b)) in PAIRS.iter().enumerate() {
                self.packed[p][idx] = spectrum(a, idx, k) + spectrum(b, idx, k) * i;
            }
        }
        for (p, &(a, b)) in PAIRS.iter().enumerate() {
            self.fft.inverse_band(&mut self.packed[p], band);
            for x in 0..len {
                self.physical[x][a] = self.packed[p][x].re;
                self.physical[x][b] = self.packed[p][x].im;
            }
        }
        // (u·∇)u_i = Σ_j u_j ∂_j u_i, packed as (N_0 + i N_1, N_2)
        for x in 0..len {
            let f = &self.physical[x];
            let mut prod = [T::zero(); 3];
            for (c, slot) in prod.iter_mut().enumerate() {
                *slot = f[0] * f[3 + 3 * c] + f[1] * f[3 + 3 * c + 1] + f[2] * f[3 + 3 * c + 2];
            }
            self.packed[0][x] = Complex::new(prod[0], prod[1]);
            self.packed[1][x] = Complex::new(prod[2], T::zero());
        }
        self.fft.forward_band(&mut self.packed[0], band);
        self.fft.forward_band(&mut self.packed[1], band);

        let half = T::of(0.5);
        let mut out = vec![zero_mode::<T>(); len];
        for &(idx, k) in &self.ball {
            if k == [0, 0, 0] {
                continue;
            }
            let mirror = self.grid.mirror_index(idx);
            let z = self.packed[0][idx];
            let zm = self.packed[0][mirror].conj();
            let w = self.packed[1][idx];
            let wm = self.packed[1][mirror].conj();
            out[idx] = [(z + zm) * half, (z - zm) * half * -i, (w + wm) * half];
        }
        let mut field = SpectralField::from_coeffs_unchecked(self.grid, out);
        field.leray_project_in_place();
        Ok(field)
    }
}

/// Brute-force oracle for [`AdvectionWorkspace::advective_term`]:
/// `P P_n Σ_{p+q=k} i(û(p)·q)û(q)` over the dealiasing ball.
///
/// Cost grows with the square of the number of ball modes; intended for
/// `N ≤ 16`.
pub fn advective_term_direct<T: Real>(u: &SpectralField<T>) -> Result<SpectralField<T>> {
    check_divergence(u)?;
    let grid = u.grid();
    let ball: Vec<(usize, Wavevector)> = grid
        .retained()
        .filter(|&(_, k)| grid.in_dealias_ball(k))
        .collect();
    let coeffs = u.coeffs();
    let i = Complex::<T>::i();
    let mut out = vec![zero_mode::<T>(); grid.len()];
    for &(kidx, k) in &ball {
        if k == [0, 0, 0] {
            continue;
        }
        let mut acc = zero_mode::<T>();
        for &(pidx, p) in &ball {
            let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
            if !grid.in_dealias_ball(q) {
                continue;
            }
            let qidx = grid.index_of(q).expect("ball is inside the grid");
            let up = coeffs[pidx];
            let uq = coeffs[qidx];
            let dot = up[0] * T::of(q[0] as f64) + up[1] * T::of(q[1] as f64) + up[2] * T::of(q[2] as f64);
            let factor = i * dot;
            for c in 0..3 {
                acc[c] = acc[c] + factor * uq[c];
            }
        }
        out[kidx] = acc;
    }
    let mut field = SpectralField::from_coeffs_unchecked(grid, out);
    field.leray_project_in_place();
    Ok(field)
}
