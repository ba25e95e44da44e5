//! Full wavefunctions from the partial waves `psi_j`, plus the `t = 0` and
//! `t -> infinity` reference states.
//!
//! Left incidence: `psi = psi_1 + R0^l psi_2 + T0^l psi_3`.
//! Right incidence: `psi = psi_4 + R0^r psi_3 + T0^r psi_2`, the mirror image
//! of the left combination with the old right-incidence amplitudes.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    derive_momenta, stationary_from, units::HBAR, Incidence, MomentumMap, MomentumSet, Potential,
    Scenario, Side,
};
use crate::oracle;
use crate::transient::{all_terms, Alpha, TermDescriptor, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Approx,
    Oracle,
    Grid,
    Limit,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Approx => "approx",
            Method::Oracle => "oracle",
            Method::Grid => "grid",
            Method::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveSample {
    pub x: f64,
    pub t: f64,
    pub psi: C64,
    pub method: Method,
}

/// Which terms enter the analytic approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ApproxMode {
    /// All twelve terms.
    #[default]
    Full,
    /// Incident, old and new waves only: `1I, 2I, 1R` for `x < 0`, `1T, 3I`
    /// for `x >= 0`. Meaningful for left incidence.
    Dominant,
}

/// Assembles wavefunctions for one scenario; holds the twelve term
/// descriptors so repeated evaluation does not rebuild them.
#[derive(Debug, Clone)]
pub struct Composer {
    pub scenario: Scenario,
    pub momenta: MomentumSet,
    terms: Vec<TermDescriptor>,
    /// Weight of `psi_j`, index `j - 1`.
    weights: [C64; 4],
    pub tol: f64,
}

impl Composer {
    pub fn new(s: &Scenario) -> Result<Self> {
        let ms = derive_momenta(s)?;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let weights = match s.incidence {
            Incidence::Left => [one, ms.r0_l, ms.t0_l, zero],
            Incidence::Right => [zero, ms.t0_r, ms.r0_r, one],
        };
        Ok(Composer {
            scenario: *s,
            momenta: ms,
            terms: all_terms(s)?,
            weights,
            tol: DEFAULT_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn terms(&self) -> &[TermDescriptor] {
        &self.terms
    }

    pub fn weight(&self, j: u8) -> C64 {
        self.weights[(j - 1) as usize]
    }

    fn active(&self) -> impl Iterator<Item = (C64, &TermDescriptor)> {
        self.terms
            .iter()
            .map(|d| (self.weight(d.j), d))
            .filter(|(w, _)| *w != C64::new(0.0, 0.0))
    }

    /// Old stationary state.
    pub fn initial(&self, x: f64) -> C64 {
        stationary_from(self.scenario.incidence, &self.momenta, Potential::Old, x)
    }

    pub fn exact(&self, x: f64, t: f64) -> Result<C64> {
        check_t(t)?;
        if t == 0.0 {
            return Ok(self.initial(x));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (w, d) in self.active() {
            acc += w * d.eval(x, t, self.tol)?;
        }
        Ok(acc)
    }

    /// Partial wave `psi_j` (unweighted).
    pub fn psi_j(&self, j: u8, x: f64, t: f64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for d in self.terms.iter().filter(|d| d.j == j) {
            acc += d.eval(x, t, self.tol)?;
        }
        Ok(acc)
    }

    /// Contribution of all `I''` integrals to `psi`.
    pub fn isecond_part(&self, x: f64, t: f64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        for (w, d) in self.active() {
            let p = d.parts(x, t, self.tol)?;
            acc += w * p.factor * p.isecond.value;
        }
        Ok(acc)
    }

    pub fn approx(&self, x: f64, t: f64, mode: ApproxMode) -> Result<C64> {
        check_t(t)?;
        if t == 0.0 {
            return Ok(self.initial(x));
        }
        let mut acc = C64::new(0.0, 0.0);
        for (w, d) in self.active() {
            if mode == ApproxMode::Dominant && !is_dominant(d.j, d.alpha) {
                continue;
            }
            acc += w * d.eval_approx(x, t)?;
        }
        Ok(acc)
    }

    /// Energy of the long-time state: `E_q` for left incidence; for right
    /// incidence the right momentum `p0` is kept, so `p0^2/2m - V0'`.
    pub fn longtime_energy(&self) -> f64 {
        let s = &self.scenario;
        match s.incidence {
            Incidence::Left => s.e_q,
            Incidence::Right => s.e_q + s.v0_old - s.v0_new,
        }
    }

    /// Long-time state without its time factor.
    pub fn longtime(&self, x: f64) -> C64 {
        let s = &self.scenario;
        match s.incidence {
            Incidence::Left => stationary_from(Incidence::Left, &self.momenta, Potential::New, x),
            Incidence::Right => {
                let map = MomentumMap::for_depth(s.v0_new, s.m());
                let p = self.momenta.p0;
                let (r, t) = map.right_amplitudes(p, Side::Pos);
                let e = |k: C64| (C64::i() * k * x / HBAR).exp();
                if x < 0.0 {
                    t * e(-map.q_of_p(p, Side::Pos))
                } else {
                    e(-p) + r * e(p)
                }
            }
        }
    }

    /// `exp(-i E t / hbar) psi_infinity(x)`
    pub fn longtime_at(&self, x: f64, t: f64) -> C64 {
        C64::new(0.0, -self.longtime_energy() * t / HBAR).exp() * self.longtime(x)
    }

    pub fn oracle(&self, x: f64, t: f64) -> Result<C64> {
        check_t(t)?;
        Ok(oracle::oracle_psi(&self.scenario, x, t, self.tol.min(1e-11))?.value)
    }

    pub fn sample(&self, x: f64, t: f64, method: Method) -> Result<WaveSample> {
        let psi = match method {
            Method::Exact => self.exact(x, t)?,
            Method::Approx => self.approx(x, t, ApproxMode::Full)?,
            Method::Oracle => self.oracle(x, t)?,
            Method::Limit => self.longtime_at(x, t),
            Method::Grid => {
                return Err(Error::InvalidArgument(
                    "grid samples come from the grid simulator, not the composer".into(),
                ))
            }
        };
        Ok(WaveSample { x, t, psi, method })
    }

    /// Samples at every `(x, t)` pair, in parallel; order is preserved.
    pub fn sample_many(&self, points: &[(f64, f64)], method: Method) -> Result<Vec<WaveSample>> {
        points
            .par_iter()
            .map(|&(x, t)| self.sample(x, t, method))
            .collect()
    }
}

fn is_dominant(j: u8, alpha: Alpha) -> bool {
    matches!(
        (j, alpha),
        (1, Alpha::I) | (2, Alpha::I) | (1, Alpha::R) | (1, Alpha::T) | (3, Alpha::I)
    )
}

fn check_t(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "t must be finite and >= 0, got {t}"
        )))
    }
}

pub fn psi_exact(s: &Scenario, x: f64, t: f64) -> Result<C64> {
    Composer::new(s)?.exact(x, t)
}

pub fn psi_approx(s: &Scenario, x: f64, t: f64, mode: ApproxMode) -> Result<C64> {
    Composer::new(s)?.approx(x, t, mode)
}

/// Long-time limit, modulo its time factor (see [`Composer::longtime_energy`]).
pub fn psi_longtime(s: &Scenario, x: f64) -> Result<C64> {
    Ok(Composer::new(s)?.longtime(x))
}

pub fn psi_initial(s: &Scenario, x: f64) -> Result<C64> {
    let ms = derive_momenta(s)?;
    Ok(stationary_from(s.incidence, &ms, Potential::Old, x))
}
