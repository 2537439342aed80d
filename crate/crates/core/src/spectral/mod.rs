//! Fourier representation of periodic velocity fields: the wavevector
//! lattice, Sobolev norms, the Leray projector and spectral-mass splits.

mod fft;
mod field;
mod grid;

pub use fft::Fft3;
pub use field::{MassSplit, Mode, SpectralField};
pub(crate) use field::{mode_norm, zero_mode};
pub use grid::{ball_sq_radius, in_ball, norm_sq, WaveGrid, Wavevector};
