use crate::error::{Error, Result};

/// Integer wavevector `k ∈ ℤ³`.
pub type Wavevector = [i64; 3];

/// Lattice of wavevectors resolved by an `N³` collocation grid on `[0, 2π)³`.
///
/// Components range over `-N/2+1 ..= N/2`, stored in FFT order along each
/// axis and row-major across axes (x slowest, z fastest). Wavevectors with a
/// component equal to `N/2` (the Nyquist planes) have no mirror and are not
/// retained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WaveGrid {
    n: usize,
}

impl WaveGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGridSize(n));
        }
        Ok(Self { n })
    }

    /// Modes per axis.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored coefficients, `N³`.
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Collocation spacing `2π/N`.
    pub fn spacing(&self) -> f64 {
        std::f64::consts::TAU / self.n as f64
    }

    #[inline]
    fn axis_wavenumber(&self, i: usize) -> i64 {
        let half = self.n / 2;
        if i <= half {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn axis_index(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k > half || k <= -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Wavevector stored at `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let n = self.n;
        let iz = idx % n;
        let iy = (idx / n) % n;
        let ix = idx / (n * n);
        [
            self.axis_wavenumber(ix),
            self.axis_wavenumber(iy),
            self.axis_wavenumber(iz),
        ]
    }

    /// Storage index of `k`, if `k` lies in the stored range (Nyquist included).
    #[inline]
    pub fn index_of(&self, k: Wavevector) -> Option<usize> {
        let ix = self.axis_index(k[0])?;
        let iy = self.axis_index(k[1])?;
        let iz = self.axis_index(k[2])?;
        Some((ix * self.n + iy) * self.n + iz)
    }

    /// True if `k` has a component on a Nyquist plane.
    #[inline]
    pub fn is_nyquist(&self, k: Wavevector) -> bool {
        let half = (self.n / 2) as i64;
        k.contains(&half)
    }

    /// True if `k` is stored and not on a Nyquist plane.
    #[inline]
    pub fn is_retained(&self, k: Wavevector) -> bool {
        self.index_of(k).is_some() && !self.is_nyquist(k)
    }

    /// Index of `-k` for a retained `k`.
    #[inline]
    pub fn mirror_index(&self, idx: usize) -> usize {
        let n = self.n;
        let m = |i: usize| if i == 0 { 0 } else { n - i };
        let iz = idx % n;
        let iy = (idx / n) % n;
        let ix = idx / (n * n);
        (m(ix) * n + m(iy)) * n + m(iz)
    }

    /// Radius of the dealiasing ball, `⌊N/3⌋`.
    #[inline]
    pub fn dealias_radius(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Membership in the per-axis 2/3-rule cube.
    #[inline]
    pub fn in_dealias_cube(&self, k: Wavevector) -> bool {
        let r = self.dealias_radius();
        k.iter().all(|c| c.abs() <= r)
    }

    /// Membership in the dealiasing ball `|k| ≤ ⌊N/3⌋` (a subset of the cube).
    #[inline]
    pub fn in_dealias_ball(&self, k: Wavevector) -> bool {
        let r = self.dealias_radius();
        self.in_dealias_cube(k) && norm_sq(k) <= (r * r) as u64
    }

    /// Largest `|k|` over retained wavevectors, `√3·(N/2 − 1)`, rounded up
    /// so that the ball of this radius contains every retained wavevector.
    pub fn max_resolved_radius(&self) -> f64 {
        let h = (self.n / 2 - 1) as u64;
        let target = 3 * h * h;
        let mut r = (target as f64).sqrt();
        while ball_sq_radius(r) < target {
            r = r.next_up();
        }
        r
    }

    /// Iterator over `(index, k)` for every retained wavevector.
    pub fn retained(&self) -> impl Iterator<Item = (usize, Wavevector)> + '_ {
        (0..self.len())
            .map(move |i| (i, self.wavevector(i)))
            .filter(move |&(_, k)| !self.is_nyquist(k))
    }
}

/// `|k|²` in exact integer arithmetic.
#[inline]
pub fn norm_sq(k: Wavevector) -> u64 {
    k.iter().map(|&c| (c * c) as u64).sum()
}

/// Largest integer `n` with `n ≤ m²`, computed exactly from the f64 value of `m`.
///
/// `|k| ≤ m` is then equivalent to `|k|² ≤ ball_sq_radius(m)`.
pub fn ball_sq_radius(m: f64) -> u64 {
    if !(m > 0.0) {
        return 0;
    }
    if !m.is_finite() || m >= 9.0e7 {
        return u64::MAX / 4;
    }
    let p = m * m;
    let e = m.mul_add(m, -p);
    let f = p.floor();
    let n = if f == p && e < 0.0 { f - 1.0 } else { f };
    n as u64
}

/// Exact `|k| ≤ m` test.
#[inline]
pub fn in_ball(k: Wavevector, m: f64) -> bool {
    norm_sq(k) <= ball_sq_radius(m)
}
