//! Dealiased Fourier pseudospectral solver for the incompressible
//! Navier-Stokes equations on the 2π-periodic 3-torus, together with a
//! regularity monitor that splits a trajectory into sign-constant intervals
//! of the low/high spectral-mass difference `F_m` and checks the a-priori
//! bounds attached to each interval.
//!
//! Field math is generic over the scalar type (see [`Real`]); diagnostics,
//! monitor bounds and file formats work in `f64`.

pub mod error;
pub mod integrator;
pub mod monitor;
pub mod nonlinear;
pub mod spectral;
pub mod workbench;

use std::fmt::{Debug, Display};

pub use error::{Error, Result};

/// Floating point scalar usable for spectral fields: `f32` or `f64`.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + rustfft::FftNum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    #[inline]
    fn of(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("f64 is representable")
    }

    /// Widening conversion to `f64`.
    #[inline]
    fn f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub use spectral::{SpectralField, WaveGrid};

/// Double precision spectral field.
pub type Field = SpectralField<f64>;
/// Single precision spectral field.
pub type Field32 = SpectralField<f32>;
/// Double precision advection workspace.
pub type Advection = nonlinear::AdvectionWorkspace<f64>;
/// Double precision time stepper.
pub type Stepper = integrator::Stepper<f64>;
