//! The twelve contributions `psi_{j alpha}` to the transient wavefunction.
//!
//! Each term is a contour integral `int_C dk exp(-i(a k^2 + b k)) g(k)` in
//! the left (q) or right (p) momentum plane, with `a = t / (2 m hbar)` and
//! `b = -/+ x / hbar`. Writing `k = k_s + f u` with the saddle
//! `k_s = -b / 2a` and `f = (1 - i) sqrt(m hbar / t)` turns the exponent
//! into `exp(i m x^2 / (2 hbar t)) exp(-u^2)`. The simple pole of `g` is
//! integrated in closed form with the Faddeeva function (`I'`); the
//! remainder `H` (`I''`) is integrated numerically along the steepest
//! descent line, detouring around the part of the branch cut that the line
//! leaves on the wrong side.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::faddeeva;
use crate::model::{derive_momenta, units::HBAR, MomentumMap, Scenario, Side};
use crate::quad::{integrate_polyline, integrate_segment, QuadOptions, QuadResult};

/// Real-u truncation of the steepest-descent integral (`exp(-64)`).
pub const U_MAX: f64 = 8.0;
/// Default absolute tolerance for `I''`.
pub const DEFAULT_TOL: f64 = 1e-10;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alpha {
    I,
    T,
    R,
}

impl Alpha {
    pub const ALL: [Alpha; 3] = [Alpha::I, Alpha::T, Alpha::R];
}

/// Integration variable of a term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    Q,
    P,
}

/// Half-line on which a term lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// `x < 0`
    Left,
    /// `x >= 0`
    Right,
}

impl Support {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Support::Left => x < 0.0,
            Support::Right => x >= 0.0,
        }
    }
}

/// One row of the term table.
#[derive(Debug, Clone, Copy)]
pub struct TermDescriptor {
    pub j: u8,
    pub alpha: Alpha,
    pub support: Support,
    pub plane: Plane,
    /// `Pos`: the contour passes above every singularity; `Neg`: below.
    pub contour: Side,
    /// `+1` for `exp(+ikx/hbar)`, `-1` for `exp(-ikx/hbar)`.
    pub wave_sign: f64,
    /// Whether `F = exp(i V0' t / hbar)` multiplies the term.
    pub phase_flag: bool,
    /// Whether `g` has a branch cut (so `H` is not identically zero).
    pub has_cut: bool,
    /// Pole of the initial state in its own plane: `+-q0` or `+-p0`.
    pub pole: C64,
    /// Pole of `g` in the integration variable.
    pub k0: C64,
    /// Side of the integration-plane cut the pole belongs to, if it lies on it.
    pub k0_side: Side,
    /// Residue of `g` at `k0`.
    pub a0: C64,
    /// Mass, eV fs^2 / nm^2.
    pub m: f64,
    pub v_new: f64,
    map: MomentumMap,
}

/// Steepest-descent frame of a term at `(x, t)`.
#[derive(Debug, Clone, Copy)]
pub struct SaddleFrame {
    pub x: f64,
    pub t: f64,
    /// `t / (2 m hbar)`
    pub a: f64,
    /// Saddle point `-b / 2a`, real.
    pub saddle_k: f64,
    /// `(1 - i) sqrt(m hbar / t)`
    pub f: C64,
    pub u0: C64,
    /// `exp(i m x^2 / (2 hbar t))`
    pub quad_prefactor: C64,
}

impl SaddleFrame {
    pub fn u_of(&self, k: C64) -> C64 {
        (k - self.saddle_k) / self.f
    }

    pub fn k_of(&self, u: C64) -> C64 {
        self.saddle_k + self.f * u
    }

    /// `exp(-i (a k^2 + b k))`
    pub fn kernel(&self, k: C64) -> C64 {
        let u = self.u_of(k);
        self.quad_prefactor * (-u * u).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsecondMethod {
    /// `H` vanishes identically.
    Zero,
    Series,
    Quadrature,
}

#[derive(Debug, Clone, Copy)]
pub struct IsecondValue {
    pub value: C64,
    pub error: f64,
    pub method: IsecondMethod,
}

/// Pieces of one term at `(x, t)`: `psi = factor * (iprime + isecond)`.
#[derive(Debug, Clone, Copy)]
pub struct TermParts {
    pub factor: C64,
    pub iprime: C64,
    pub isecond: IsecondValue,
}

impl TermParts {
    pub fn value(&self) -> C64 {
        self.factor * (self.iprime + self.isecond.value)
    }

    pub fn zero() -> Self {
        TermParts {
            factor: C64::new(0.0, 0.0),
            iprime: C64::new(0.0, 0.0),
            isecond: IsecondValue {
                value: C64::new(0.0, 0.0),
                error: 0.0,
                method: IsecondMethod::Zero,
            },
        }
    }
}

pub const ALL_TERMS: [(u8, Alpha); 12] = [
    (1, Alpha::I),
    (1, Alpha::T),
    (1, Alpha::R),
    (2, Alpha::I),
    (2, Alpha::T),
    (2, Alpha::R),
    (3, Alpha::I),
    (3, Alpha::T),
    (3, Alpha::R),
    (4, Alpha::I),
    (4, Alpha::T),
    (4, Alpha::R),
];

pub fn term_descriptor(j: u8, alpha: Alpha, s: &Scenario) -> Result<TermDescriptor> {
    if !(1..=4).contains(&j) {
        return Err(Error::InvalidArgument(format!(
            "term index j must be 1..=4, got {j}"
        )));
    }
    let ms = derive_momenta(s)?;
    let m = s.m();
    let map = MomentumMap::for_depth(s.v0_new, m);
    let left_start = j <= 2;
    let pole = match j {
        1 => ms.q0,
        2 => -ms.q0,
        3 => ms.p0,
        _ => -ms.p0,
    };
    // Contour above the singularities for the left-starting waves, below otherwise.
    let contour = if left_start { Side::Pos } else { Side::Neg };
    // The i0 of the initial-state pole sits opposite the contour.
    let pole_side = contour.flip();
    let (support, plane, wave_sign) = match (left_start, alpha) {
        (true, Alpha::I) => (Support::Left, Plane::Q, 1.0),
        (true, Alpha::R) => (Support::Left, Plane::Q, -1.0),
        (true, Alpha::T) => (Support::Right, Plane::P, 1.0),
        (false, Alpha::I) => (Support::Right, Plane::P, 1.0),
        (false, Alpha::R) => (Support::Right, Plane::P, -1.0),
        (false, Alpha::T) => (Support::Left, Plane::Q, 1.0),
    };
    let d = TermDescriptor {
        j,
        alpha,
        support,
        plane,
        contour,
        wave_sign,
        phase_flag: support == Support::Right,
        has_cut: alpha != Alpha::I && map.kappa2 != 0.0,
        pole,
        k0: pole,
        k0_side: pole_side,
        a0: C64::new(1.0, 0.0),
        m,
        v_new: s.v0_new,
        map,
    };
    if alpha == Alpha::I {
        return Ok(d);
    }
    let src_plane = match alpha {
        Alpha::R => plane,
        _ if left_start => Plane::Q,
        _ => Plane::P,
    };
    let default = with_boundary(
        d,
        src_plane,
        side_on_cut(d.cut_end_of(src_plane), pole_side),
    );
    if !default.on_cut_line(default.k0) {
        return Ok(default);
    }
    // A pole on the cut is a boundary value, and either boundary gives an
    // exact split into I' + I''. Keep the one whose remainder dies out at
    // late times.
    let other = with_boundary(d, src_plane, default_flip(&default, src_plane, pole_side));
    let late = |c: &TermDescriptor| -> f64 { late_remainder(c).unwrap_or(f64::INFINITY) };
    if late(&other) < late(&default) {
        Ok(other)
    } else {
        Ok(default)
    }
}

fn default_flip(d: &TermDescriptor, src_plane: Plane, pole_side: Side) -> Side {
    side_on_cut(d.cut_end_of(src_plane), pole_side).flip()
}

/// Places the pole of an R or T term using the boundary value of the
/// source-plane map on `src_side`.
fn with_boundary(mut d: TermDescriptor, src_plane: Plane, src_side: Side) -> TermDescriptor {
    let pole = d.pole;
    match d.alpha {
        Alpha::I => {}
        Alpha::R => {
            d.k0 = pole;
            d.k0_side = src_side;
            let o = d.other(pole, src_side);
            // g = R(k) / (k - pole): residue R(pole)
            d.a0 = (pole - o) / (pole + o);
        }
        Alpha::T => {
            let k0 = d.map_from(src_plane, pole, src_side);
            d.k0 = k0;
            d.k0_side = image_side(&d, src_plane, pole, src_side, k0);
            d.a0 = 2.0 * pole / (pole + k0);
        }
    }
    d
}

/// `|I''|` deep in the long-time regime (`|u0| = 25`) close to the step.
fn late_remainder(d: &TermDescriptor) -> Result<f64> {
    let x = match d.support {
        Support::Left => -1.0,
        Support::Right => 1.0,
    };
    let k = d.k0.norm().max(1e-3);
    let t = 2.0 * d.m * HBAR * (25.0 / k).powi(2);
    let frame = d.map_to_u(x, t)?;
    Ok(d.isecond_quadrature(&frame, 1e-8)?.value.norm())
}

/// All twelve descriptors, ordered as [`ALL_TERMS`].
pub fn all_terms(s: &Scenario) -> Result<Vec<TermDescriptor>> {
    ALL_TERMS
        .iter()
        .map(|&(j, a)| term_descriptor(j, a, s))
        .collect()
}

/// Boundary of a (possibly vertical) cut picked by an `i0` displacement.
fn side_on_cut(cut_end: C64, i0: Side) -> Side {
    if is_vertical(cut_end) {
        // An imaginary displacement runs along a vertical cut; take the
        // right-hand boundary value.
        Side::Pos
    } else {
        i0
    }
}

fn is_vertical(cut_end: C64) -> bool {
    cut_end.im.abs() > cut_end.re.abs()
}

/// Side of the integration-plane cut from which the image `k0` is approached.
fn image_side(d: &TermDescriptor, src_plane: Plane, pole: C64, src_side: Side, k0: C64) -> Side {
    let src_end = d.cut_end_of(src_plane);
    let scale = pole.norm().max(d.map.kappa2.abs().sqrt()).max(1e-300);
    let delta = if is_vertical(src_end) {
        C64::new(src_side.sign(), 0.0)
    } else {
        C64::new(0.0, src_side.sign())
    } * (1e-7 * scale);
    let img = d.map_from(src_plane, pole + delta, src_side) - k0;
    let transverse = if is_vertical(d.cut_end()) {
        img.re
    } else {
        img.im
    };
    if transverse < 0.0 {
        Side::Neg
    } else {
        Side::Pos
    }
}

impl TermDescriptor {
    pub fn c_j(&self) -> C64 {
        let s = if self.j <= 2 { 1.0 } else { -1.0 };
        C64::new(0.0, s / (2.0 * PI))
    }

    /// `F`: `exp(i V0' t / hbar)` on the right half-line, 1 on the left.
    pub fn phase_factor(&self, t: f64) -> C64 {
        if self.phase_flag {
            C64::new(0.0, self.v_new * t / HBAR).exp()
        } else {
            C64::new(1.0, 0.0)
        }
    }

    /// Upper endpoint `z_b` of the cut `[-z_b, z_b]` of `g` in the integration plane.
    pub fn cut_end(&self) -> C64 {
        self.cut_end_of(self.plane)
    }

    fn cut_end_of(&self, plane: Plane) -> C64 {
        match plane {
            Plane::Q => self.map.q_branch_point(),
            Plane::P => self.map.p_branch_point(),
        }
    }

    /// The other momentum as a function of `k` in `plane`.
    fn map_from(&self, plane: Plane, k: C64, side: Side) -> C64 {
        match plane {
            Plane::Q => self.map.p_of_q(k, side),
            Plane::P => self.map.q_of_p(k, side),
        }
    }

    fn other(&self, k: C64, side: Side) -> C64 {
        self.map_from(self.plane, k, side)
    }

    /// `g` from the integration variable `k` and the mapped momentum `o`.
    fn analytic(&self, k: C64, o: C64) -> C64 {
        match self.alpha {
            Alpha::I => 1.0 / (k - self.pole),
            Alpha::R => (k - o) / ((k + o) * (k - self.pole)),
            Alpha::T => 2.0 * k / ((k + o) * (o - self.pole)),
        }
    }

    /// `g(k)` on the principal sheet; `side` only matters on the cut.
    pub fn g(&self, k: C64, side: Side) -> C64 {
        self.analytic(k, self.other(k, side))
    }

    /// `g` continued across the cut from the pole's side, for residue checks
    /// when the pole lies on the cut.
    pub fn g_continued(&self, k: C64) -> C64 {
        let o = self.other(k, self.k0_side);
        if !self.has_cut || !self.on_cut_line(self.k0) {
            return self.analytic(k, o);
        }
        let transverse = if is_vertical(self.cut_end()) {
            k.re - self.k0.re
        } else {
            k.im - self.k0.im
        };
        let wrong_side = transverse * self.k0_side.sign() < 0.0;
        if wrong_side {
            self.analytic(k, -o)
        } else {
            self.analytic(k, o)
        }
    }

    /// Whether `z` sits on the cut segment of `g`.
    pub fn on_cut_line(&self, z: C64) -> bool {
        if !self.has_cut {
            return false;
        }
        let zb = self.cut_end();
        let tau = (z / zb).re;
        let off = (z - zb * tau).norm();
        tau.abs() <= 1.0 && off <= 1e-12 * zb.norm()
    }

    /// `h(k) = g(k) - A0 / (k - k0)`
    pub fn h(&self, k: C64) -> C64 {
        if !self.has_cut {
            return C64::new(0.0, 0.0);
        }
        self.g(k, self.contour) - self.a0 / (k - self.k0)
    }

    pub fn saddle(&self, x: f64, t: f64) -> f64 {
        self.wave_sign * x * self.m / t
    }

    /// `u0` from the steepest-descent frame; `t > 0` required.
    pub fn map_to_u(&self, x: f64, t: f64) -> Result<SaddleFrame> {
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "transient terms need t > 0 (use the initial state at t = 0), got {t}"
            )));
        }
        let saddle_k = self.saddle(x, t);
        let f = C64::new(1.0, -1.0) * (self.m * HBAR / t).sqrt();
        Ok(SaddleFrame {
            x,
            t,
            a: t / (2.0 * self.m * HBAR),
            saddle_k,
            f,
            u0: (self.k0 - saddle_k) / f,
            quad_prefactor: C64::new(0.0, self.m * x * x / (2.0 * HBAR * t)).exp(),
        })
    }

    /// Closed-form pole contribution.
    pub fn eval_iprime(&self, frame: &SaddleFrame) -> Result<C64> {
        if self.a0 == C64::new(0.0, 0.0) {
            return Ok(C64::new(0.0, 0.0));
        }
        let ipi = C64::new(0.0, PI);
        let v = match self.contour {
            Side::Pos => -ipi * faddeeva::w(-frame.u0)?,
            Side::Neg => ipi * faddeeva::w(frame.u0)?,
        };
        Ok(frame.quad_prefactor * self.a0 * v)
    }

    /// `H(0)`, evaluated on the contour side when the saddle sits on the cut.
    pub fn h_at_saddle(&self, frame: &SaddleFrame) -> C64 {
        if !self.has_cut {
            return C64::new(0.0, 0.0);
        }
        let k = C64::new(frame.saddle_k, 0.0);
        self.g(k, self.contour) + self.a0 / (frame.f * frame.u0)
    }

    /// Remainder integral `I''` (including the prefactor and `f`).
    pub fn eval_isecond(&self, frame: &SaddleFrame, tol: f64) -> Result<IsecondValue> {
        if !self.has_cut {
            return Ok(IsecondValue {
                value: C64::new(0.0, 0.0),
                error: 0.0,
                method: IsecondMethod::Zero,
            });
        }
        let geo = self.detour(frame);
        if geo.is_none() && frame.u0.norm() > 2.0 {
            if let Some(v) = self.isecond_series(frame, tol) {
                return Ok(v);
            }
        }
        self.isecond_quadrature(frame, tol)
    }

    /// `I''` by direct quadrature along the steepest-descent line.
    pub fn isecond_quadrature(&self, frame: &SaddleFrame, tol: f64) -> Result<IsecondValue> {
        if !self.has_cut {
            return Ok(IsecondValue {
                value: C64::new(0.0, 0.0),
                error: 0.0,
                method: IsecondMethod::Zero,
            });
        }
        let opts = QuadOptions {
            abs_tol: tol,
            rel_tol: 1e-12,
            initial_panels: 1,
            max_panels: 200_000,
        };
        let integrand = |k: C64| frame.kernel(k) * self.h(k);
        let start = frame.k_of(C64::new(-U_MAX, 0.0));
        let end = frame.k_of(C64::new(U_MAX, 0.0));
        let mut path = vec![start];
        let mut loop_pts = None;
        match self.detour(frame) {
            None => {}
            Some(Detour::Excursion(pts)) => path.extend(pts),
            Some(Detour::Loop(pts)) => loop_pts = Some(pts),
        }
        path.push(end);
        let mut total = QuadResult::zero();
        for w in path.windows(2) {
            let panels = oscillation_panels(frame, w[0], w[1]);
            total = total + integrate_segment(integrand, w[0], w[1], &opts.with_panels(panels))?;
        }
        if let Some(pts) = loop_pts {
            let mut acc = QuadResult::zero();
            for w in pts.windows(2) {
                let panels = oscillation_panels(frame, w[0], w[1]);
                acc = acc + integrate_polyline(integrand, w, &opts.with_panels(panels))?;
            }
            total = total + acc;
        }
        Ok(IsecondValue {
            value: total.value,
            error: total.error,
            method: IsecondMethod::Quadrature,
        })
    }

    /// Term-by-term integration of the Taylor expansion of `H` about the
    /// saddle, `sum_n H^(2n)(0)/(2n)! Gamma(n + 1/2)`. The series is
    /// asymptotic; returns `None` when it does not reach `tol`.
    pub fn isecond_series(&self, frame: &SaddleFrame, tol: f64) -> Option<IsecondValue> {
        if !self.has_cut {
            return None;
        }
        let zb = self.cut_end();
        let bp_dist = frame.u_of(zb).norm().min(frame.u_of(-zb).norm());
        let cut_dist = segment_distance(C64::new(0.0, 0.0), frame.u_of(-zb), frame.u_of(zb));
        let radius = 1.0f64
            .min(0.5 * frame.u0.norm())
            .min(0.5 * cut_dist.min(bp_dist));
        if radius < 0.25 {
            return None;
        }
        let coeffs = taylor_even_coeffs(|u| self.h(frame.k_of(u)), radius, 64);
        let scale = frame.quad_prefactor * frame.f;
        let mut sum = C64::new(0.0, 0.0);
        let mut gamma = SQRT_PI; // Gamma(1/2)
        let mut last = f64::INFINITY;
        for (n, c) in coeffs.iter().enumerate() {
            let term = *c * gamma;
            let size = (term * scale).norm();
            sum += term;
            if size < tol {
                return Some(IsecondValue {
                    value: scale * sum,
                    error: size,
                    method: IsecondMethod::Series,
                });
            }
            if size > last {
                return None;
            }
            last = size;
            gamma *= n as f64 + 0.5;
        }
        None
    }

    /// Where the steepest-descent line leaves part of the cut on the wrong side.
    fn detour(&self, frame: &SaddleFrame) -> Option<Detour> {
        if !self.has_cut {
            return None;
        }
        let zb = self.cut_end();
        let ks = frame.saddle_k;
        let sigma = self.contour.sign();
        // beta(z) > 0 on the left of the line's direction d = (1 - i)/sqrt 2.
        let beta = |z: C64| z.re - ks + z.im;
        let wrong = |z: C64| sigma * beta(z) > 0.0;
        let (lo, hi) = (-zb, zb);
        let eta_u = |u_far: f64| 0.2f64.min(0.5 / u_far.max(1.0));
        match (wrong(lo), wrong(hi)) {
            (false, false) => None,
            (true, true) => {
                let u_far = frame.u_of(lo).norm().max(frame.u_of(hi).norm());
                let eta = eta_u(u_far) * frame.f.norm();
                let e = zb / zb.norm();
                let n = C64::i() * e;
                let mut pts = vec![
                    zb + eta * (e + n),
                    -zb + eta * (-e + n),
                    -zb + eta * (-e - n),
                    zb + eta * (e - n),
                    zb + eta * (e + n),
                ];
                // Counter-clockwise as built; the region must sit on the
                // right of the path when the contour runs above.
                if self.contour == Side::Pos {
                    pts.reverse();
                }
                Some(Detour::Loop(pts))
            }
            (wl, _) => {
                // Crossing point: beta(tau zb) = 0.
                let c = zb.re + zb.im;
                let tau_c = ks / c;
                let zc = zb * tau_c;
                let z_end = if wl { lo } else { hi };
                let uc = frame.u_of(zc).re;
                if uc.abs() >= U_MAX || (z_end - zc).norm() < 1e-14 * zb.norm() {
                    return None;
                }
                let u_far = frame.u_of(z_end).norm();
                let eta = eta_u(u_far) * frame.f.norm();
                let e = (z_end - zc) / (z_end - zc).norm();
                let d = frame.f / frame.f.norm();
                let mut n = C64::i() * e;
                if (n.conj() * (-d)).re < 0.0 {
                    n = -n;
                }
                let rho = eta;
                Some(Detour::Excursion(vec![
                    zc - rho * d,
                    zc + eta * n,
                    z_end + eta * e + eta * n,
                    z_end + eta * e - eta * n,
                    zc - eta * n,
                    zc + rho * d,
                ]))
            }
        }
    }

    /// Full term at `(x, t)` split into pole and remainder parts.
    pub fn parts(&self, x: f64, t: f64, tol: f64) -> Result<TermParts> {
        if !self.support.contains(x) {
            return Ok(TermParts::zero());
        }
        let frame = self.map_to_u(x, t)?;
        let iprime = self.eval_iprime(&frame)?;
        let isecond = self.eval_isecond(&frame, tol)?;
        Ok(TermParts {
            factor: self.c_j() * self.phase_factor(t),
            iprime,
            isecond,
        })
    }

    pub fn eval(&self, x: f64, t: f64, tol: f64) -> Result<C64> {
        Ok(self.parts(x, t, tol)?.value())
    }

    /// Pole term plus the leading term of the remainder series.
    pub fn eval_approx(&self, x: f64, t: f64) -> Result<C64> {
        if !self.support.contains(x) {
            return Ok(C64::new(0.0, 0.0));
        }
        let frame = self.map_to_u(x, t)?;
        let iprime = self.eval_iprime(&frame)?;
        let first = frame.quad_prefactor * frame.f * SQRT_PI * self.h_at_saddle(&frame);
        Ok(self.c_j() * self.phase_factor(t) * (iprime + first))
    }
}

enum Detour {
    /// Points inserted between the two halves of the steepest-descent line.
    Excursion(Vec<C64>),
    /// Closed loop around the whole cut.
    Loop(Vec<C64>),
}

/// Panel count resolving the Gaussian-kernel phase along a segment.
fn oscillation_panels(frame: &SaddleFrame, z0: C64, z1: C64) -> usize {
    let u0 = frame.u_of(z0);
    let u1 = frame.u_of(z1);
    let umax = u0.norm().max(u1.norm());
    let phase = 2.0 * umax * (u1 - u0).norm();
    ((phase / PI).ceil() as usize * 2).clamp(4, 40_000)
}

fn segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let d = b - a;
    let s = if d.norm_sqr() == 0.0 {
        0.0
    } else {
        ((p - a) * d.conj()).re / d.norm_sqr()
    };
    (p - (a + d * s.clamp(0.0, 1.0))).norm()
}

/// Even Taylor coefficients `c_{2n}` of an analytic function about 0 from
/// samples on a circle of the given radius (trapezoid rule).
fn taylor_even_coeffs<F: Fn(C64) -> C64>(f: F, radius: f64, samples: usize) -> Vec<C64> {
    let vals: Vec<C64> = (0..samples)
        .map(|k| {
            f(C64::from_polar(
                radius,
                2.0 * PI * k as f64 / samples as f64,
            ))
        })
        .collect();
    (0..samples / 4)
        .map(|n| {
            let m = 2 * n;
            let s: C64 = vals
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (m * k) as f64 / samples as f64))
                .sum();
            s / (samples as f64 * radius.powi(m as i32))
        })
        .collect()
}

/// Residue of `g` at `k0` by a Cauchy integral over a small circle.
pub fn numeric_residue(d: &TermDescriptor, radius: f64) -> C64 {
    let n = 256;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..n {
        let e = C64::from_polar(radius, 2.0 * PI * k as f64 / n as f64);
        acc += d.g_continued(d.k0 + e) * e;
    }
    acc / n as f64
}

/// `psi_{j alpha}(x, t)`.
pub fn eval_term(j: u8, alpha: Alpha, s: &Scenario, x: f64, t: f64) -> Result<C64> {
    term_descriptor(j, alpha, s)?.eval(x, t, DEFAULT_TOL)
}

pub fn eval_term_approx(j: u8, alpha: Alpha, s: &Scenario, x: f64, t: f64) -> Result<C64> {
    term_descriptor(j, alpha, s)?.eval_approx(x, t)
}
