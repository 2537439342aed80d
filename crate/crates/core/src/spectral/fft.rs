use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::Real;

/// Three-dimensional complex FFT on an `N³` row-major buffer.
///
/// `forward` maps collocation values to Fourier coefficients with the `1/N³`
/// factor applied, so that `u(x) = Σ_k û(k) e^{ik·x}`; `inverse` evaluates
/// that sum on the grid.
pub struct Fft3<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    lines: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> Fft3<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            n,
            forward,
            inverse,
            lines: vec![Complex::default(); n * n * n],
            scratch: vec![Complex::default(); scratch_len],
        }
    }

    pub fn forward(&mut self, buf: &mut [Complex<T>]) {
        self.forward_band(buf, self.n);
    }

    pub fn inverse(&mut self, buf: &mut [Complex<T>]) {
        self.inverse_band(buf, self.n);
    }

    /// Forward transform that only produces coefficients with every
    /// `|k_i| ≤ band`; the remaining entries are left unspecified.
    pub fn forward_band(&mut self, buf: &mut [Complex<T>], band: usize) {
        let plan = Arc::clone(&self.forward);
        let keep = self.band_mask(band);
        self.transform(buf, plan.as_ref(), |_, _| true, |_, iz| keep[iz], |iy, iz| keep[iy] && keep[iz]);
        let scale = T::one() / T::of((self.n * self.n * self.n) as f64);
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }

    /// Inverse transform of input that vanishes unless every `|k_i| ≤ band`.
    pub fn inverse_band(&mut self, buf: &mut [Complex<T>], band: usize) {
        let plan = Arc::clone(&self.inverse);
        let keep = self.band_mask(band);
        self.transform(buf, plan.as_ref(), |ix, iy| keep[ix] && keep[iy], |ix, _| keep[ix], |_, _| true);
    }

    fn band_mask(&self, band: usize) -> Vec<bool> {
        let n = self.n;
        (0..n).map(|i| i <= band || n - i <= band).collect()
    }

    // Axis passes in the order z, y, x; each filter selects the lines that
    // are transformed, indexed by the two fixed coordinates.
    fn transform(
        &mut self,
        buf: &mut [Complex<T>],
        plan: &dyn Fft<T>,
        z_lines: impl Fn(usize, usize) -> bool,
        y_lines: impl Fn(usize, usize) -> bool,
        x_lines: impl Fn(usize, usize) -> bool,
    ) {
        let n = self.n;
        assert_eq!(buf.len(), n * n * n, "buffer does not match grid");
        for (line, chunk) in buf.chunks_exact_mut(n).enumerate() {
            if z_lines(line / n, line % n) {
                plan.process_with_scratch(chunk, &mut self.scratch);
            }
        }
        let lines = &mut self.lines;
        let mut count = 0;
        for ix in 0..n {
            let plane = &buf[ix * n * n..(ix + 1) * n * n];
            for iz in 0..n {
                if y_lines(ix, iz) {
                    let dst = &mut lines[count * n..(count + 1) * n];
                    for (iy, d) in dst.iter_mut().enumerate() {
                        *d = plane[iy * n + iz];
                    }
                    count += 1;
                }
            }
        }
        plan.process_with_scratch(&mut lines[..count * n], &mut self.scratch);
        count = 0;
        for ix in 0..n {
            let plane = &mut buf[ix * n * n..(ix + 1) * n * n];
            for iz in 0..n {
                if y_lines(ix, iz) {
                    let src = &lines[count * n..(count + 1) * n];
                    for (iy, s) in src.iter().enumerate() {
                        plane[iy * n + iz] = *s;
                    }
                    count += 1;
                }
            }
        }
        let nn = n * n;
        count = 0;
        for yz in 0..nn {
            if x_lines(yz / n, yz % n) {
                let dst = &mut lines[count * n..(count + 1) * n];
                for (ix, d) in dst.iter_mut().enumerate() {
                    *d = buf[ix * nn + yz];
                }
                count += 1;
            }
        }
        plan.process_with_scratch(&mut lines[..count * n], &mut self.scratch);
        count = 0;
        for yz in 0..nn {
            if x_lines(yz / n, yz % n) {
                let src = &lines[count * n..(count + 1) * n];
                for (ix, s) in src.iter().enumerate() {
                    buf[ix * nn + yz] = *s;
                }
                count += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_round_trip() {
        let n = 8;
        let mut fft = Fft3::<f64>::new(n);
        let tau = std::f64::consts::TAU;
        let k = [1i64, -2, 3];
        let mut buf: Vec<Complex<f64>> = (0..n * n * n)
            .map(|idx| {
                let (ix, iy, iz) = (idx / (n * n), (idx / n) % n, idx % n);
                let phase = tau / n as f64
                    * (k[0] * ix as i64 + k[1] * iy as i64 + k[2] * iz as i64) as f64;
                Complex::from_polar(1.0, phase)
            })
            .collect();
        let orig = buf.clone();
        fft.forward(&mut buf);
        let target = (n + (n - 2)) * n + 3;
        for (i, v) in buf.iter().enumerate() {
            let expect = if i == target { 1.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-13 && v.im.abs() < 1e-13, "index {i}: {v}");
        }
        fft.inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn band_transforms_agree_with_full_ones() {
        let n = 12;
        let band = 4usize;
        let mut fft = Fft3::<f64>::new(n);
        let in_band = |i: usize| i <= band || n - i <= band;
        let mut spec: Vec<Complex<f64>> = (0..n * n * n)
            .map(|idx| {
                let (ix, iy, iz) = (idx / (n * n), (idx / n) % n, idx % n);
                if in_band(ix) && in_band(iy) && in_band(iz) {
                    Complex::new((idx as f64 * 0.37).sin(), (idx as f64 * 0.11).cos())
                } else {
                    Complex::new(0.0, 0.0)
                }
            })
            .collect();
        let mut full = spec.clone();
        fft.inverse(&mut full);
        fft.inverse_band(&mut spec, band);
        for (a, b) in spec.iter().zip(&full) {
            assert!((a - b).norm() < 1e-12);
        }
        let mut pruned = full.clone();
        fft.forward(&mut full);
        fft.forward_band(&mut pruned, band);
        for (idx, (a, b)) in pruned.iter().zip(&full).enumerate() {
            let (ix, iy, iz) = (idx / (n * n), (idx / n) % n, idx % n);
            if in_band(ix) && in_band(iy) && in_band(iz) {
                assert!((a - b).norm() < 1e-14);
            }
        }
    }
}
