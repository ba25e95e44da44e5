//! Scenario definition, unit system, the q <-> p momentum maps with their
//! branch cuts, and the reflection/transmission amplitudes of the step.
//!
//! Units throughout: energies in eV, lengths in nm, times in fs. Momenta are
//! carried as hbar * wavenumber (eV fs / nm) so plane waves read
//! `exp(i k x / hbar)`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants in the eV / nm / fs system.
pub mod units {
    /// Reduced Planck constant, eV fs.
    pub const HBAR: f64 = 0.658_211_956_9;
    /// hbar^2 / m_e, eV nm^2.
    pub const HBAR2_OVER_ME: f64 = 0.076_199_682;

    /// Electron mass in eV fs^2 / nm^2.
    pub fn electron_mass() -> f64 {
        HBAR * HBAR / HBAR2_OVER_ME
    }
}

use units::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Incidence {
    Left,
    Right,
}

/// Which step depth a stationary state refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Potential {
    Old,
    New,
}

/// Side from which a point lying exactly on a branch cut is approached.
///
/// For a cut along the real axis `Pos` means `+i0`; for a cut along the
/// imaginary axis `Pos` means `+0` in the real part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pos,
    Neg,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Pos => 1.0,
            Side::Neg => -1.0,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Pos => Side::Neg,
            Side::Neg => Side::Pos,
        }
    }
}

/// Physical inputs. The switch happens at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Effective mass in units of the electron mass.
    pub mass: f64,
    /// Energy measured from the left (x < 0) level, eV.
    pub e_q: f64,
    /// Step depth before the switch, eV.
    pub v0_old: f64,
    /// Step depth after the switch, eV.
    pub v0_new: f64,
    pub incidence: Incidence,
}

impl Scenario {
    pub fn new(
        mass: f64,
        e_q: f64,
        v0_old: f64,
        v0_new: f64,
        incidence: Incidence,
    ) -> Result<Self> {
        let s = Scenario {
            mass,
            e_q,
            v0_old,
            v0_new,
            incidence,
        };
        s.validate()?;
        Ok(s)
    }

    /// mass 0.067, E = 0.3 eV, V0 = 0.3 eV, V0' = 0.8 eV, left incidence.
    pub fn set_a() -> Self {
        Scenario {
            mass: 0.067,
            e_q: 0.3,
            v0_old: 0.3,
            v0_new: 0.8,
            incidence: Incidence::Left,
        }
    }

    /// mass 0.042, E = 0.04 eV, V0 = 0.42 eV, V0' = 0.62 eV, left incidence.
    pub fn set_b() -> Self {
        Scenario {
            mass: 0.042,
            e_q: 0.04,
            v0_old: 0.42,
            v0_new: 0.62,
            incidence: Incidence::Left,
        }
    }

    /// Lowered step: V0 = 0.8 eV switched to V0' = 0.2 eV (set A mass and energy).
    pub fn lowered_step() -> Self {
        Scenario {
            v0_old: 0.8,
            v0_new: 0.2,
            ..Self::set_a()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("e_q", self.e_q),
            ("v0_old", self.v0_old),
            ("v0_new", self.v0_new),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidScenario(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if self.mass <= 0.0 {
            return Err(Error::InvalidScenario(format!(
                "mass must be > 0, got {}",
                self.mass
            )));
        }
        if self.e_q == 0.0 {
            return Err(Error::InvalidScenario(
                "e_q = 0 puts the incident momentum on a branch point".into(),
            ));
        }
        match self.incidence {
            Incidence::Left if self.e_q < 0.0 => Err(Error::InvalidScenario(
                "left incidence needs e_q > 0 (no propagating wave on the left otherwise)".into(),
            )),
            Incidence::Right if self.e_q + self.v0_old <= 0.0 => Err(Error::InvalidScenario(
                "right incidence needs e_q + v0_old > 0".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Mass in eV fs^2 / nm^2.
    pub fn m(&self) -> f64 {
        self.mass * units::electron_mass()
    }

    /// 2 m V for the given step depth: the squared branch-point distance.
    pub fn kappa2(&self, which: Potential) -> f64 {
        2.0 * self.m() * self.depth(which)
    }

    pub fn depth(&self, which: Potential) -> f64 {
        match which {
            Potential::Old => self.v0_old,
            Potential::New => self.v0_new,
        }
    }

    pub fn momenta(&self) -> Result<MomentumSet> {
        derive_momenta(self)
    }
}

/// The square-root maps between the left momentum q and the right momentum
/// p for one step depth, `p^2 = q^2 + kappa2`.
///
/// `p(q)` is cut along the segment between the roots of `q^2 = -kappa2`
/// (the imaginary segment `+-i sqrt(kappa2)` for a positive depth) and
/// `q(p)` along the segment between the roots of `p^2 = kappa2`. Both maps
/// are odd and reduce to the identity far from the cut, so q and p share
/// their sign on the real axis outside the cuts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMap {
    pub kappa2: f64,
}

impl MomentumMap {
    pub fn new(kappa2: f64) -> Self {
        MomentumMap { kappa2 }
    }

    pub fn for_depth(v: f64, m: f64) -> Self {
        MomentumMap {
            kappa2: 2.0 * m * v,
        }
    }

    /// Upper endpoint of the cut of `p(q)` in the q-plane.
    pub fn q_branch_point(&self) -> C64 {
        C64::new(-self.kappa2, 0.0).sqrt()
    }

    /// Upper endpoint of the cut of `q(p)` in the p-plane.
    pub fn p_branch_point(&self) -> C64 {
        C64::new(self.kappa2, 0.0).sqrt()
    }

    pub fn p_of_q(&self, q: C64, side: Side) -> C64 {
        odd_root(q, self.kappa2, side)
    }

    pub fn q_of_p(&self, p: C64, side: Side) -> C64 {
        odd_root(p, -self.kappa2, side)
    }

    /// Same as [`p_of_q`](Self::p_of_q) but also reports whether `q` sits on a branch point.
    pub fn p_of_q_checked(&self, q: C64, side: Side) -> (C64, bool) {
        let bp = on_branch_point(q, self.kappa2);
        if bp {
            (C64::new(0.0, 0.0), true)
        } else {
            (self.p_of_q(q, side), false)
        }
    }

    pub fn q_of_p_checked(&self, p: C64, side: Side) -> (C64, bool) {
        let bp = on_branch_point(p, -self.kappa2);
        if bp {
            (C64::new(0.0, 0.0), true)
        } else {
            (self.q_of_p(p, side), false)
        }
    }

    /// Left-incidence amplitudes `(R^l, T^l)` at left momentum `q`.
    pub fn left_amplitudes(&self, q: C64, side: Side) -> (C64, C64) {
        let p = self.p_of_q(q, side);
        left_rt(q, p)
    }

    /// Right-incidence amplitudes `(R^r, T^r)` at right momentum `p`.
    pub fn right_amplitudes(&self, p: C64, side: Side) -> (C64, C64) {
        let q = self.q_of_p(p, side);
        right_rt(q, p)
    }
}

pub(crate) fn left_rt(q: C64, p: C64) -> (C64, C64) {
    let d = q + p;
    debug_assert!(d.norm() > 0.0, "q + p vanished off the branch points");
    ((q - p) / d, 2.0 * q / d)
}

pub(crate) fn right_rt(q: C64, p: C64) -> (C64, C64) {
    let d = q + p;
    debug_assert!(d.norm() > 0.0, "q + p vanished off the branch points");
    ((p - q) / d, 2.0 * p / d)
}

fn on_branch_point(z: C64, shift: f64) -> bool {
    // z^2 + shift == 0
    let r = z * z + shift;
    r.norm() <= 4.0 * f64::EPSILON * (z.norm_sqr() + shift.abs())
}

/// `z * sqrt(1 + shift / z^2)`: the odd branch of `sqrt(z^2 + shift)` whose
/// cut joins the two roots of `z^2 = -shift`.
fn odd_root(z: C64, shift: f64, side: Side) -> C64 {
    if shift == 0.0 {
        return z;
    }
    if z.re == 0.0 && z.im == 0.0 {
        // Midpoint of the cut; only the side decides.
        let b = C64::new(shift, 0.0).sqrt();
        return approach_limit(z, shift, side, b, -b);
    }
    let arg = C64::new(1.0, 0.0) + shift / (z * z);
    if arg.im == 0.0 && arg.re <= 0.0 {
        let c = z * C64::new(0.0, (-arg.re).sqrt());
        return approach_limit(z, shift, side, c, -c);
    }
    z * arg.sqrt()
}

/// Picks between the two boundary values `a`, `b` of the cut at `z` by
/// evaluating slightly off the cut on the requested side.
fn approach_limit(z: C64, shift: f64, side: Side, a: C64, b: C64) -> C64 {
    let scale = shift.abs().sqrt().max(z.norm());
    // Cut of odd_root(., shift) lies along sqrt(-shift): real for shift < 0.
    let normal = if shift < 0.0 {
        C64::new(0.0, 1.0)
    } else {
        C64::new(1.0, 0.0)
    };
    let probe = z + normal * (side.sign() * 1e-7 * scale);
    let arg = C64::new(1.0, 0.0) + shift / (probe * probe);
    let v = probe * arg.sqrt();
    if (v - a).norm() <= (v - b).norm() {
        a
    } else {
        b
    }
}

/// Derived momenta and amplitudes of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumSet {
    /// Left momentum; `i|q0|` for an evanescent left component.
    pub q0: C64,
    /// Right momentum under the old step.
    pub p0: C64,
    /// Right momentum under the new step, same energy.
    pub p0_new: C64,
    pub r0_l: C64,
    pub t0_l: C64,
    pub r0_r: C64,
    pub t0_r: C64,
    /// New-step amplitudes at `q0` (left) and `p0_new` (right).
    pub rl: C64,
    pub tl: C64,
    pub rr: C64,
    pub tr: C64,
}

pub fn derive_momenta(s: &Scenario) -> Result<MomentumSet> {
    s.validate()?;
    let m = s.m();
    let old = MomentumMap::for_depth(s.v0_old, m);
    let new = MomentumMap::for_depth(s.v0_new, m);
    let two_m_e = 2.0 * m * s.e_q;
    let q0 = if two_m_e > 0.0 {
        C64::new(two_m_e.sqrt(), 0.0)
    } else {
        C64::new(0.0, (-two_m_e).sqrt())
    };
    let p0 = match s.incidence {
        Incidence::Left => old.p_of_q(q0, Side::Pos),
        Incidence::Right => C64::new((2.0 * m * (s.e_q + s.v0_old)).sqrt(), 0.0),
    };
    let p0_new = new.p_of_q(q0, Side::Pos);
    let (r0_l, t0_l) = left_rt(q0, p0);
    let (r0_r, t0_r) = right_rt(q0, p0);
    let (rl, tl) = left_rt(q0, p0_new);
    let (rr, tr) = right_rt(q0, p0_new);
    Ok(MomentumSet {
        q0,
        p0,
        p0_new,
        r0_l,
        t0_l,
        r0_r,
        t0_r,
        rl,
        tl,
        rr,
        tr,
    })
}

/// Convenience wrapper mirroring the free-function form of the maps.
pub fn p_of_q(q: C64, v: f64, m: f64, side: Side) -> C64 {
    MomentumMap::for_depth(v, m).p_of_q(q, side)
}

pub fn q_of_p(p: C64, v: f64, m: f64, side: Side) -> C64 {
    MomentumMap::for_depth(v, m).q_of_p(p, side)
}

/// Left-incidence `(R^l(k), T^l(k))` or right-incidence `(R^r(k), T^r(k))`.
pub fn amplitudes(k: C64, v: f64, m: f64, incidence: Incidence, side: Side) -> (C64, C64) {
    let map = MomentumMap::for_depth(v, m);
    match incidence {
        Incidence::Left => map.left_amplitudes(k, side),
        Incidence::Right => map.right_amplitudes(k, side),
    }
}

/// Stationary scattering state with unit incident amplitude.
pub fn stationary_state(s: &Scenario, which: Potential, x: f64) -> Result<C64> {
    let ms = derive_momenta(s)?;
    Ok(stationary_from(s.incidence, &ms, which, x))
}

pub(crate) fn stationary_from(
    incidence: Incidence,
    ms: &MomentumSet,
    which: Potential,
    x: f64,
) -> C64 {
    let (p, r, t) = match (incidence, which) {
        (Incidence::Left, Potential::Old) => (ms.p0, ms.r0_l, ms.t0_l),
        (Incidence::Left, Potential::New) => (ms.p0_new, ms.rl, ms.tl),
        (Incidence::Right, Potential::Old) => (ms.p0, ms.r0_r, ms.t0_r),
        (Incidence::Right, Potential::New) => (ms.p0_new, ms.rr, ms.tr),
    };
    let q = ms.q0;
    let e = |k: C64| (C64::i() * k * x / HBAR).exp();
    match incidence {
        Incidence::Left => {
            if x < 0.0 {
                e(q) + r * e(-q)
            } else {
                t * e(p)
            }
        }
        Incidence::Right => {
            if x < 0.0 {
                t * e(-q)
            } else {
                e(-p) + r * e(p)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn equal_energy_and_depth_gives_sqrt2_ratio() {
        let s = Scenario::set_a();
        let ms = derive_momenta(&s).unwrap();
        assert!((ms.p0.re / ms.q0.re - 2f64.sqrt()).abs() < 1e-14);
        let sq2 = 2f64.sqrt();
        let expect = (1.0 - sq2) / (1.0 + sq2);
        assert!((ms.r0_l.re - expect).abs() < 1e-14);
        assert!((ms.r0_l.re + 0.171_572_875).abs() < 1e-8);
    }

    #[test]
    fn no_step_is_transparent() {
        let s = Scenario::new(0.067, 0.3, 0.0, 0.0, Incidence::Left).unwrap();
        let ms = derive_momenta(&s).unwrap();
        assert_eq!(ms.p0, ms.q0);
        assert!(ms.r0_l.norm() < 1e-15);
        assert!((ms.t0_l - 1.0).norm() < 1e-15);
        let (r, t) = amplitudes(c(0.3, 0.0), 0.0, s.m(), Incidence::Left, Side::Pos);
        assert_eq!(r, c(0.0, 0.0));
        assert_eq!(t, c(1.0, 0.0));
    }

    #[test]
    fn new_step_ratios() {
        let s = Scenario::set_a();
        let ms = derive_momenta(&s).unwrap();
        let ratio = (11.0f64 / 3.0).sqrt();
        assert!((ms.p0_new.re / ms.q0.re - ratio).abs() < 1e-13);
        assert!((ms.tl.re - 2.0 / (1.0 + ratio)).abs() < 1e-13);
        assert!((ms.tl.re - 0.686_14).abs() < 1e-5);
        assert!((ms.rl.re - (1.0 - ratio) / (1.0 + ratio)).abs() < 1e-13);
        assert!((ms.rl.re + 0.313_86).abs() < 1e-5);
    }

    #[test]
    fn branch_conventions() {
        let m = Scenario::set_a().m();
        let v = 0.8;
        let k2 = 2.0 * m * v;
        let p = p_of_q(c(0.4, 0.0), v, m, Side::Pos);
        assert!((p.re - (0.16 + k2).sqrt()).abs() < 1e-14 && p.im == 0.0);
        let p = p_of_q(c(-0.4, 0.0), v, m, Side::Pos);
        assert!(p.re < 0.0);
        // q = 0: limit from q -> 0+
        let p = p_of_q(c(0.0, 0.0), v, m, Side::Pos);
        assert!((p.re - k2.sqrt()).abs() < 1e-14);
        let p = p_of_q(c(0.0, 0.0), v, m, Side::Neg);
        assert!((p.re + k2.sqrt()).abs() < 1e-14);
        let (p, bp) = MomentumMap::new(k2).p_of_q_checked(c(0.0, k2.sqrt()), Side::Pos);
        assert!(bp && p == c(0.0, 0.0));
        // real p above threshold maps to real q of the same sign
        let q = q_of_p(c(-1.2, 0.0), v, m, Side::Pos);
        assert!(q.re < 0.0 && q.im.abs() < 1e-15);
        // p = 0 -> q = +- i kappa by side
        let q = q_of_p(c(0.0, 0.0), v, m, Side::Pos);
        let q2 = q_of_p(c(0.0, 0.0), v, m, Side::Neg);
        assert!((q.im.abs() - k2.sqrt()).abs() < 1e-14);
        assert!((q + q2).norm() < 1e-14);
    }

    #[test]
    fn cut_sides_are_boundary_limits() {
        let map = MomentumMap::new(0.6);
        // p on (0, kappa): +i0 gives the upper-half-plane q.
        let p = c(0.3, 0.0);
        let up = map.q_of_p(p, Side::Pos);
        let dn = map.q_of_p(p, Side::Neg);
        assert!(up.im > 0.0 && dn.im < 0.0);
        let above = map.q_of_p(c(0.3, 1e-10), Side::Neg);
        assert!((above - up).norm() < 1e-6);
        // right side of the upper q cut maps to positive p
        let q = c(0.0, 0.4);
        let right = map.p_of_q(q, Side::Pos);
        assert!(right.re > 0.0);
        let off = map.p_of_q(c(1e-10, 0.4), Side::Neg);
        assert!((off - right).norm() < 1e-6);
    }

    #[test]
    fn stationary_state_continuity_and_free_limit() {
        let s = Scenario::set_a();
        let ms = derive_momenta(&s).unwrap();
        let at0 = stationary_state(&s, Potential::Old, 0.0).unwrap();
        assert!((at0 - (1.0 + ms.r0_l)).norm() < 1e-14);
        assert!((at0 - ms.t0_l).norm() < 1e-14);
        let free = Scenario::new(0.067, 0.3, 0.0, 0.0, Incidence::Left).unwrap();
        for x in [-7.0, -0.5, 3.0, 40.0] {
            let psi = stationary_state(&free, Potential::Old, x).unwrap();
            let expect = (C64::i() * ms.q0 * x / HBAR).exp();
            assert!((psi - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn left_density_envelope() {
        let s = Scenario::set_a();
        let ms = derive_momenta(&s).unwrap();
        let r = ms.r0_l.norm();
        let lambda = std::f64::consts::PI * HBAR / ms.q0.re;
        let (mut lo, mut hi) = (f64::MAX, f64::MIN);
        for i in 0..2000 {
            let x = -30.0 + 3.0 * lambda * i as f64 / 2000.0;
            let d = stationary_state(&s, Potential::Old, x).unwrap().norm_sqr();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        assert!((lo - (1.0 - r).powi(2)).abs() < 1e-5);
        assert!((hi - (1.0 + r).powi(2)).abs() < 1e-5);
        // period
        let a = stationary_state(&s, Potential::Old, -20.0)
            .unwrap()
            .norm_sqr();
        let b = stationary_state(&s, Potential::Old, -20.0 + lambda)
            .unwrap()
            .norm_sqr();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn stationary_state_solves_schroedinger() {
        let s = Scenario::set_a();
        let m = s.m();
        let h = 1e-3;
        for x in [-13.3, -2.1, 1.7, 25.0] {
            let v = if x < 0.0 { 0.0 } else { -s.v0_old };
            let f = |x| stationary_state(&s, Potential::Old, x).unwrap();
            let d2 = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
            let rhs = -(2.0 * m / (HBAR * HBAR)) * (s.e_q - v) * f(x);
            assert!((d2 - rhs).norm() < 1e-5 * rhs.norm().max(1.0), "x={x}");
        }
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::new(0.0, 0.3, 0.3, 0.8, Incidence::Left).is_err());
        assert!(Scenario::new(0.067, f64::NAN, 0.3, 0.8, Incidence::Left).is_err());
        assert!(Scenario::new(0.067, -0.1, 0.3, 0.8, Incidence::Left).is_err());
        assert!(Scenario::new(0.067, -0.1, 0.3, 0.8, Incidence::Right).is_ok());
    }

    #[test]
    fn evanescent_right_incidence() {
        let s = Scenario::new(0.067, -0.1, 0.3, 0.8, Incidence::Right).unwrap();
        let ms = derive_momenta(&s).unwrap();
        assert!(ms.q0.re == 0.0 && ms.q0.im > 0.0);
        assert!(ms.p0_new.re > 0.0 && ms.p0_new.im.abs() < 1e-14);
        // flux of the initial state vanishes: |R0^r| = 1
        assert!((ms.r0_r.norm() - 1.0).abs() < 1e-13);
    }
}
