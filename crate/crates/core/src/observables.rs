//! Density, probability flux and local average frequency of any sampler
//! `(x, t) -> psi`.
//!
//! Derivatives are centered differences with one Richardson level, so the
//! same code serves the analytic solution and interpolated grid data.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::Result;
use crate::model::units::HBAR;

/// Default spatial step, nm.
pub const H_X: f64 = 1e-3;
/// Default time step, fs.
pub const H_T: f64 = 1e-3;
/// Below this `|psi|` the local frequency is undefined.
pub const OMEGA_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableSample {
    pub x: f64,
    pub t: f64,
    pub density: f64,
    pub flux: f64,
    /// `hbar * omega_av` in eV; `None` where `|psi|` is too small.
    pub hbar_omega: Option<f64>,
}

pub fn density(psi: C64) -> f64 {
    psi.norm_sqr()
}

/// `(hbar / m) Im(psi^* dpsi)`, with `m` in eV fs^2 / nm^2.
pub fn flux_from(psi: C64, dpsi: C64, m: f64) -> f64 {
    HBAR / m * (psi.conj() * dpsi).im
}

/// `-hbar Im(dpsi_t / psi)`, or `None` below [`OMEGA_THRESHOLD`].
pub fn hbar_omega_from(psi: C64, dpsi_t: C64) -> Option<f64> {
    if psi.norm() <= OMEGA_THRESHOLD {
        None
    } else {
        Some(-HBAR * (dpsi_t / psi).im)
    }
}

/// Centered difference `(f(s + h) - f(s - h)) / 2h`, Richardson-extrapolated
/// from `h` and `h/2`.
pub fn richardson_derivative<F: FnMut(f64) -> Result<C64>>(
    mut f: F,
    s: f64,
    h: f64,
) -> Result<C64> {
    let d1 = (f(s + h)? - f(s - h)?) / (2.0 * h);
    let h2 = 0.5 * h;
    let d2 = (f(s + h2)? - f(s - h2)?) / (2.0 * h2);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// One-sided second-order forward difference, for `t` near 0.
fn forward_derivative<F: FnMut(f64) -> Result<C64>>(mut f: F, s: f64, h: f64) -> Result<C64> {
    Ok((-3.0 * f(s)? + 4.0 * f(s + h)? - f(s + 2.0 * h)?) / (2.0 * h))
}

pub fn density_at<S: Fn(f64, f64) -> Result<C64>>(sampler: &S, x: f64, t: f64) -> Result<f64> {
    Ok(density(sampler(x, t)?))
}

pub fn flux_at<S: Fn(f64, f64) -> Result<C64>>(sampler: &S, m: f64, x: f64, t: f64) -> Result<f64> {
    let psi = sampler(x, t)?;
    let d = richardson_derivative(|y| sampler(y, t), x, H_X)?;
    Ok(flux_from(psi, d, m))
}

/// Local average frequency as `hbar * omega_av` in eV.
pub fn omega_av_at<S: Fn(f64, f64) -> Result<C64>>(
    sampler: &S,
    x: f64,
    t: f64,
) -> Result<Option<f64>> {
    let psi = sampler(x, t)?;
    let d = if t >= H_T {
        richardson_derivative(|s| sampler(x, s), t, H_T)?
    } else {
        forward_derivative(|s| sampler(x, s), t, H_T.min(0.25 * t.max(1e-6)))?
    };
    Ok(hbar_omega_from(psi, d))
}

pub fn observe<S: Fn(f64, f64) -> Result<C64>>(
    sampler: &S,
    m: f64,
    x: f64,
    t: f64,
) -> Result<ObservableSample> {
    let psi = sampler(x, t)?;
    Ok(ObservableSample {
        x,
        t,
        density: density(psi),
        flux: flux_at(sampler, m, x, t)?,
        hbar_omega: omega_av_at(sampler, x, t)?,
    })
}
