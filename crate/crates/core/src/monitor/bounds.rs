//! Scalar pieces of the interval procedure: the spectral-mass difference
//! `F_m`, the cutoff rule, the per-interval growth bounds and the local
//! envelope `W(t)`.

use super::lattice::{lattice_count, lattice_count_lower_bound};
use crate::spectral::SpectralField;
use crate::Real;

/// `F_m = Σ_{|k|≤m}|û| − Σ_{|k|>m}|û|`.
pub fn f_m<T: Real>(u: &SpectralField<T>, m: f64) -> f64 {
    let s = u.spectral_mass_split(m);
    (s.low - s.high).f64()
}

/// Cutoff `m = 8‖∇u(t_j)‖²/(c₁ν²)` attached to an interval starting at `t_j`.
///
/// The result always satisfies `m·c₁·ν² > 4‖∇u(t_j)‖²` in floating point.
///
/// # Panics
///
/// If any input is not strictly positive.
pub fn choose_cutoff(grad_l2_sq: f64, nu: f64, c1: f64) -> f64 {
    assert!(
        grad_l2_sq > 0.0 && nu > 0.0 && c1 > 0.0,
        "choose_cutoff needs positive inputs"
    );
    let mut m = 8.0 * grad_l2_sq / (c1 * nu * nu);
    while !(m * c1 * nu * nu > 4.0 * grad_l2_sq) {
        m = m.next_up();
    }
    m
}

/// `C(m) = 2·Σ_{|k|≤m}1 / ν`.
pub fn case1_constant(m: f64, nu: f64) -> f64 {
    2.0 * lattice_count(m) as f64 / nu
}

/// Gronwall bound on a low-dominant interval:
/// `‖∇u(t_j)‖²·exp(2C(m)‖u₀‖²Δt)`.
///
/// Returns `+∞` without enumerating the ball when even a lower bound on the
/// lattice count already overflows the exponential.
pub fn case1_bound(grad_sq_tj: f64, m: f64, u0_l2_sq: f64, nu: f64, delta_t: f64) -> f64 {
    if delta_t == 0.0 {
        return grad_sq_tj;
    }
    let rate = 4.0 * u0_l2_sq * delta_t / nu;
    let lower = grad_sq_tj * (rate * lattice_count_lower_bound(m)).exp();
    if lower.is_infinite() {
        return f64::INFINITY;
    }
    grad_sq_tj * (rate * lattice_count(m) as f64).exp()
}

/// The same bound with `Σ_{|k|≤m}1` replaced by `c₂m³` at the cutoff
/// `m = 8‖∇u(t_j)‖²/(c₁ν²)`:
/// `‖∇u(t_j)‖²·exp{2048c₂/(c₁³ν⁷)·‖∇u(t_j)‖⁶·‖u₀‖²·Δt}`.
pub fn case1_bound_explicit(
    grad_sq_tj: f64,
    u0_l2_sq: f64,
    nu: f64,
    c1: f64,
    c2: f64,
    delta_t: f64,
) -> f64 {
    let rate = 2048.0 * c2 / (c1.powi(3) * nu.powi(7));
    grad_sq_tj * (rate * grad_sq_tj.powi(3) * u0_l2_sq * delta_t).exp()
}

/// Value of the local envelope `W(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Envelope {
    Value(f64),
    Expired,
}

/// First time at which `W` is undefined: `1/(2c‖∇u₀‖⁴)`.
pub fn envelope_expiry(grad_sq_0: f64, c: f64) -> f64 {
    1.0 / (2.0 * c * grad_sq_0 * grad_sq_0)
}

/// `W(t) = ‖∇u₀‖²/√(1 − 2ct‖∇u₀‖⁴)`, the solution of `x' = c x³` with
/// `x(0) = ‖∇u₀‖²`. Expired for `t ≥ envelope_expiry`.
#[allow(non_snake_case)]
pub fn local_envelope_W(t: f64, grad_sq_0: f64, c: f64) -> Envelope {
    if t >= envelope_expiry(grad_sq_0, c) {
        return Envelope::Expired;
    }
    let denom = 1.0 - 2.0 * c * t * grad_sq_0 * grad_sq_0;
    if denom <= 0.0 {
        return Envelope::Expired;
    }
    Envelope::Value(grad_sq_0 / denom.sqrt())
}

/// `ν − 2√c₁·m^{-1/2}·‖∇u‖`; positive values mean the viscous term
/// dominates the high-mode estimate.
pub fn case2_margin<T: Real>(u: &SpectralField<T>, m: f64, nu: f64, c1: f64) -> f64 {
    case2_margin_from_grad(u.grad_sq().f64().sqrt(), m, nu, c1)
}

/// [`case2_margin`] from a precomputed `‖∇u‖_{L²}`.
pub fn case2_margin_from_grad(grad_l2: f64, m: f64, nu: f64, c1: f64) -> f64 {
    nu - 2.0 * c1.sqrt() * grad_l2 / m.sqrt()
}
