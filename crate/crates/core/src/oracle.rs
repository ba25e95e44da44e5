//! Brute-force reference for the transient terms.
//!
//! Each term is integrated directly in its own momentum plane, with the
//! integrand built from the scattering amplitudes and the full exponent
//! `exp(-i(a k^2 + b k))`. No Faddeeva function, no saddle-point frame and
//! no pole subtraction are involved. The path runs parallel to the real
//! axis at height `+-eps` on the side prescribed for the term, steps over
//! a vertical branch cut if it meets one, and leaves along rays tilted into
//! the decaying sectors of the Gaussian. By Cauchy's theorem every `eps > 0`
//! gives the same value; `eps` only controls the size of the integrand.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::composer::Composer;
use crate::error::{Error, Result};
use crate::model::{
    derive_momenta, units::HBAR, Incidence, MomentumMap, MomentumSet, Scenario, Side,
};
use crate::quad::{integrate, integrate_segment, QuadOptions, QuadResult};
use crate::transient::{Alpha, Plane, Support, DEFAULT_TOL};

/// Tilt of the outgoing rays below (right) and above (left) the real axis.
pub const RAY_ANGLE: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    /// Side of the singularities the path runs on.
    pub side: Side,
    /// Height of the horizontal part; `None` picks the largest value keeping
    /// the integrand bounded by `e`.
    pub eps: Option<f64>,
    /// Absolute quadrature tolerance.
    pub tol: f64,
}

impl ContourSpec {
    pub fn new(side: Side) -> Self {
        ContourSpec {
            side,
            eps: None,
            tol: 1e-11,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: C64,
    pub error: f64,
}

/// Static layout of one term, restated from the expansion in eigenstates of
/// the new step.
#[derive(Debug, Clone, Copy)]
struct Layout {
    plane: Plane,
    support: Support,
    side: Side,
    wave_sign: f64,
    c: C64,
    phase: bool,
}

fn layout(j: u8, alpha: Alpha) -> Layout {
    let left = j <= 2;
    let (plane, support, wave_sign) = match (left, alpha) {
        (true, Alpha::I) => (Plane::Q, Support::Left, 1.0),
        (true, Alpha::R) => (Plane::Q, Support::Left, -1.0),
        (true, Alpha::T) => (Plane::P, Support::Right, 1.0),
        (false, Alpha::I) => (Plane::P, Support::Right, 1.0),
        (false, Alpha::R) => (Plane::P, Support::Right, -1.0),
        (false, Alpha::T) => (Plane::Q, Support::Left, 1.0),
    };
    Layout {
        plane,
        support,
        side: if left { Side::Pos } else { Side::Neg },
        wave_sign,
        c: C64::new(0.0, if left { 1.0 } else { -1.0 } / (2.0 * PI)),
        phase: support == Support::Right,
    }
}

fn initial_pole(j: u8, ms: &MomentumSet) -> C64 {
    match j {
        1 => ms.q0,
        2 => -ms.q0,
        3 => ms.p0,
        _ => -ms.p0,
    }
}

/// Amplitude factor of a term without the exponential, in the term's variable.
fn integrand(j: u8, alpha: Alpha, map: &MomentumMap, pole: C64, k: C64, side: Side) -> C64 {
    if j <= 2 {
        match alpha {
            Alpha::I => 1.0 / (k - pole),
            Alpha::R => map.left_amplitudes(k, side).0 / (k - pole),
            Alpha::T => {
                // dq = (p / q) dp
                let q = map.q_of_p(k, side);
                map.left_amplitudes(q, side).1 * (k / q) / (q - pole)
            }
        }
    } else {
        match alpha {
            Alpha::I => 1.0 / (k - pole),
            Alpha::R => map.right_amplitudes(k, side).0 / (k - pole),
            Alpha::T => {
                let p = map.p_of_q(k, side);
                map.right_amplitudes(p, side).1 * (k / p) / (p - pole)
            }
        }
    }
}

/// Oracle value of `psi_{j alpha}(x, t)`, prefactors included.
pub fn oracle_term(
    j: u8,
    alpha: Alpha,
    s: &Scenario,
    x: f64,
    t: f64,
    tol: f64,
) -> Result<OracleValue> {
    let lay = layout_checked(j, alpha)?;
    if !lay.support.contains(x) {
        return Ok(OracleValue {
            value: C64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let spec = ContourSpec {
        tol,
        ..ContourSpec::new(lay.side)
    };
    let r = raw_integral(j, alpha, s, x, t, &spec)?;
    let f = phase_factor(lay, s, t);
    Ok(OracleValue {
        value: lay.c * f * r.value,
        error: (lay.c * f).norm() * r.error,
    })
}

fn layout_checked(j: u8, alpha: Alpha) -> Result<Layout> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "term index j must be 1..=4, got {j}"
        )));
    }
    Ok(layout(j, alpha))
}

fn phase_factor(lay: Layout, s: &Scenario, t: f64) -> C64 {
    if lay.phase {
        C64::new(0.0, s.v0_new * t / HBAR).exp()
    } else {
        C64::new(1.0, 0.0)
    }
}

/// `int dk exp(-i(a k^2 + b k)) g(k)` along a path on `spec.side`, ignoring
/// the support of the term and its prefactors. A path on the wrong side
/// gives a wrong value; this is used as a negative control.
pub fn raw_integral(
    j: u8,
    alpha: Alpha,
    s: &Scenario,
    x: f64,
    t: f64,
    spec: &ContourSpec,
) -> Result<QuadResult> {
    let lay = layout_checked(j, alpha)?;
    if t < 0.0 || !t.is_finite() || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "oracle needs finite x and t >= 0, got x = {x}, t = {t}"
        )));
    }
    let ms = derive_momenta(s)?;
    let m = s.m();
    let map = MomentumMap::for_depth(s.v0_new, m);
    let pole = initial_pole(j, &ms);
    let a = t / (2.0 * m * HBAR);
    let b = -lay.wave_sign * x / HBAR;
    let sigma = spec.side.sign();
    let has_cut = alpha != Alpha::I && map.kappa2 != 0.0;
    let cut = match lay.plane {
        Plane::Q => map.q_branch_point(),
        Plane::P => map.p_branch_point(),
    };
    let vertical_cut = has_cut && cut.im.abs() > cut.re.abs();
    let side = spec.side;
    let kernel = move |k: C64| (C64::new(0.0, -1.0) * (a * k * k + b * k)).exp();
    let f = move |k: C64| kernel(k) * integrand(j, alpha, &map, pole, k, side);

    // Horizontal extent: past the saddle and every singularity.
    let ks = if a > 0.0 { -b / (2.0 * a) } else { 0.0 };
    let sing = pole.norm().max(if has_cut { cut.norm() } else { 0.0 });
    let k_max = ks.abs() + sing + 1.0;
    let eps = spec.eps.unwrap_or_else(|| {
        if a > 0.0 {
            (0.5 / (a * (k_max + ks.abs()))).min(0.5 * sing.max(1e-3))
        } else {
            1e-2 * sing.max(1e-3)
        }
    });
    let y = sigma * eps;
    let opts = QuadOptions {
        abs_tol: spec.tol,
        rel_tol: 1e-13,
        initial_panels: 1,
        max_panels: 400_000,
    };
    let phase_panels = |z0: C64, z1: C64| -> usize {
        // phase derivative 2 a k + b bounded on the segment
        let slope = 2.0 * a * z0.norm().max(z1.norm()) + b.abs();
        let phase = slope * (z1 - z0).norm();
        ((phase / PI).ceil() as usize * 2).clamp(4, 200_000)
    };

    let mut nodes = vec![C64::new(-k_max, y)];
    if vertical_cut && eps < 1.1 * cut.norm() {
        let h = 1.2 * cut.norm();
        let mut w = 0.2 * cut.norm();
        if a > 0.0 {
            w = w.min(0.25 / (a * h));
        }
        nodes.extend([
            C64::new(-w, y),
            C64::new(-w, sigma * h),
            C64::new(w, sigma * h),
            C64::new(w, y),
        ]);
    }
    nodes.push(C64::new(k_max, y));
    let mut total = QuadResult::zero();
    for seg in nodes.windows(2) {
        let n = phase_panels(seg[0], seg[1]);
        total = total + integrate_segment(f, seg[0], seg[1], &opts.with_panels(n))?;
    }

    // Tails.
    let (dir_right, dir_left) = if a > 0.0 {
        (
            C64::from_polar(1.0, -RAY_ANGLE),
            C64::from_polar(1.0, PI - RAY_ANGLE),
        )
    } else {
        if b == 0.0 {
            return Err(Error::InvalidArgument(
                "oracle at t = 0 needs x != 0".into(),
            ));
        }
        let d = C64::new(0.0, -b.signum());
        (d, d)
    };
    for (start, dir, sign) in [
        (nodes[nodes.len() - 1], dir_right, 1.0),
        (nodes[0], dir_left, -1.0),
    ] {
        let len = ray_length(&kernel, start, dir);
        let seg = |r: f64| f(start + dir * r) * dir;
        let n = phase_panels(start, start + dir * len);
        let r = integrate(seg, 0.0, len, &opts.with_panels(n))?;
        // The left tail runs from infinity towards the start point.
        total = total
            + QuadResult {
                value: sign * r.value,
                ..r
            };
    }
    Ok(total)
}

/// Distance along a ray after which the kernel has dropped below `1e-20`.
fn ray_length<K: Fn(C64) -> C64>(kernel: &K, start: C64, dir: C64) -> f64 {
    let mut len = 1.0;
    for _ in 0..80 {
        let z = start + dir * len;
        if kernel(z).norm() < 1e-20 * (1.0 + z.norm()) {
            return len;
        }
        len *= 1.5;
    }
    len
}

/// Oracle of the partial wave `psi_j = sum_alpha psi_{j alpha}`.
pub fn oracle_psi_j(j: u8, s: &Scenario, x: f64, t: f64, tol: f64) -> Result<OracleValue> {
    let mut acc = OracleValue {
        value: C64::new(0.0, 0.0),
        error: 0.0,
    };
    for alpha in Alpha::ALL {
        let v = oracle_term(j, alpha, s, x, t, tol)?;
        acc.value += v.value;
        acc.error += v.error;
    }
    Ok(acc)
}

/// Oracle of the full transient wavefunction for the scenario's incidence.
pub fn oracle_psi(s: &Scenario, x: f64, t: f64, tol: f64) -> Result<OracleValue> {
    let ms = derive_momenta(s)?;
    let weights: [(u8, C64); 3] = match s.incidence {
        Incidence::Left => [(1, C64::new(1.0, 0.0)), (2, ms.r0_l), (3, ms.t0_l)],
        Incidence::Right => [(4, C64::new(1.0, 0.0)), (3, ms.r0_r), (2, ms.t0_r)],
    };
    let mut acc = OracleValue {
        value: C64::new(0.0, 0.0),
        error: 0.0,
    };
    for (j, w) in weights {
        if w == C64::new(0.0, 0.0) {
            continue;
        }
        let v = oracle_psi_j(j, s, x, t, tol)?;
        acc.value += w * v.value;
        acc.error += w.norm() * v.error;
    }
    Ok(acc)
}

/// One exact-vs-oracle comparison of a partial wave.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareRow {
    pub j: u8,
    pub x: f64,
    pub t: f64,
    pub exact: C64,
    pub oracle: C64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// `max |delta| / max |psi_j|` over the samples.
    pub max_rel: f64,
}

/// Semianalytic `psi_j` against the oracle at every sample, for the partial
/// waves that enter the scenario's incidence.
pub fn compare_report(s: &Scenario, samples: &[(f64, f64)], tol: f64) -> Result<CompareReport> {
    let comp = Composer::new(s)?.with_tol(tol.min(DEFAULT_TOL));
    let js: Vec<u8> = (1..=4u8)
        .filter(|&j| comp.weight(j) != C64::new(0.0, 0.0))
        .collect();
    let jobs: Vec<(u8, f64, f64)> = js
        .iter()
        .flat_map(|&j| samples.iter().map(move |&(x, t)| (j, x, t)))
        .collect();
    let rows: Vec<CompareRow> = jobs
        .par_iter()
        .map(|&(j, x, t)| {
            let exact = if t == 0.0 {
                oracle_psi_j(j, s, x, t, tol)?.value
            } else {
                comp.psi_j(j, x, t)?
            };
            let oracle = oracle_psi_j(j, s, x, t, tol)?.value;
            Ok(CompareRow {
                j,
                x,
                t,
                exact,
                oracle,
                abs_diff: (exact - oracle).norm(),
            })
        })
        .collect::<Result<_>>()?;
    let n = rows.len().max(1) as f64;
    let max_abs = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    let mean_abs = rows.iter().map(|r| r.abs_diff).sum::<f64>() / n;
    let scale = rows.iter().map(|r| r.oracle.norm()).fold(0.0, f64::max);
    Ok(CompareReport {
        rows,
        max_abs,
        mean_abs,
        max_rel: if scale > 0.0 {
            max_abs / scale
        } else {
            max_abs
        },
    })
}
