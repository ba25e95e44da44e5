//! Crank-Nicolson (Cayley) propagation of the switched step on a finite box,
//! with Mains-Haddad open edges or a closed box.
//!
//! Grid: `x_i = -L/2 + i dx`, `dx = L/(N-1)`. The potential is `0` left of
//! the node nearest `x = 0` and `-V0'` from that node on. The initial state
//! is the old stationary state, so the switch happens at `t = 0`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{derive_momenta, stationary_from, units::HBAR, Incidence, Potential, Scenario};
use crate::observables::flux_from;

/// Edge treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Linear-envelope update at both edges: incident plus reflected wave
    /// on the left, a single outgoing wave on the right.
    #[default]
    MainsHaddad,
    /// Edges pinned to zero.
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridParams {
    /// Box length, nm.
    pub length: f64,
    pub n: usize,
    /// Time step, fs.
    pub dt: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

impl GridParams {
    pub fn new(length: f64, n: usize, dt: f64) -> Self {
        GridParams {
            length,
            n,
            dt,
            boundary: Boundary::MainsHaddad,
        }
    }

    pub fn closed(mut self) -> Self {
        self.boundary = Boundary::Closed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "box length must be positive, got {}",
                self.length
            )));
        }
        if self.n < 3 {
            return Err(Error::InvalidArgument(format!(
                "need at least 3 grid points, got {}",
                self.n
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GridState {
    pub scenario: Scenario,
    pub params: GridParams,
    pub psi: Vec<C64>,
    pub t: f64,
    pub dx: f64,
    pub steps: u64,
    /// Incident amplitude at `t = 0`.
    pub a_inc: C64,
    /// Edge values before the last step, `[left, right]`.
    pub prev_edges: [C64; 2],
    /// Accuracy warnings raised at initialization.
    pub warnings: Vec<String>,
    m: f64,
    q0: f64,
    p_new: f64,
    /// `-i dt hbar / (4 m dx^2)`: off-diagonal of `1 + i H dt / 2 hbar`.
    off: C64,
    /// Diagonal of `1 - i H dt / 2 hbar` on interior nodes.
    rhs_diag: Vec<C64>,
    /// Thomas factors of the constant left-hand matrix.
    c_prime: Vec<C64>,
    inv_denom: Vec<C64>,
    scratch: Vec<C64>,
}

pub fn init_grid(s: &Scenario, params: GridParams) -> Result<GridState> {
    params.validate()?;
    if s.incidence != Incidence::Left || s.e_q <= 0.0 {
        return Err(Error::InvalidScenario(
            "the grid simulator handles left incidence with E_q > 0".into(),
        ));
    }
    let ms = derive_momenta(s)?;
    let m = s.m();
    let n = params.n;
    let dx = params.length / (n - 1) as f64;
    let x0 = -0.5 * params.length;
    let x = |i: usize| x0 + i as f64 * dx;

    let mut psi: Vec<C64> = (0..n)
        .map(|i| stationary_from(Incidence::Left, &ms, Potential::Old, x(i)))
        .collect();
    if params.boundary == Boundary::Closed {
        psi[0] = C64::new(0.0, 0.0);
        psi[n - 1] = C64::new(0.0, 0.0);
    }

    let step_at = ((-x0 / dx).round() as usize).min(n - 1);
    let potential = |i: usize| if i >= step_at { -s.v0_new } else { 0.0 };
    let kin = HBAR * HBAR / (2.0 * m * dx * dx);
    let r = C64::new(0.0, params.dt / (2.0 * HBAR));
    let off = -r * kin;
    let interior = n - 2;
    let mut rhs_diag = Vec::with_capacity(interior);
    let mut c_prime = Vec::with_capacity(interior);
    let mut inv_denom = Vec::with_capacity(interior);
    for k in 0..interior {
        let h = 2.0 * kin + potential(k + 1);
        let d = 1.0 + r * h;
        rhs_diag.push(1.0 - r * h);
        let denom = if k == 0 { d } else { d - off * c_prime[k - 1] };
        assert!(denom.norm() > 0.0, "tridiagonal solve broke down");
        let inv = 1.0 / denom;
        inv_denom.push(inv);
        c_prime.push(off * inv);
    }

    let mut warnings = Vec::new();
    let e_max = 4.0 * kin + s.v0_new.abs().max(s.v0_old.abs());
    let cfl = params.dt * e_max / HBAR;
    if cfl > 0.5 {
        warnings.push(format!(
            "dt*E_max/hbar = {cfl:.3} > 0.5: the fastest grid modes are poorly resolved in time"
        ));
    }

    let edges = [psi[0], psi[n - 1]];
    Ok(GridState {
        scenario: *s,
        params,
        psi,
        t: 0.0,
        dx,
        steps: 0,
        a_inc: C64::new(1.0, 0.0),
        prev_edges: edges,
        warnings,
        m,
        q0: ms.q0.re,
        p_new: ms.p0_new.re,
        off,
        rhs_diag,
        c_prime,
        inv_denom,
        scratch: vec![C64::new(0.0, 0.0); interior],
    })
}

impl GridState {
    pub fn n(&self) -> usize {
        self.psi.len()
    }

    pub fn x(&self, i: usize) -> f64 {
        -0.5 * self.params.length + i as f64 * self.dx
    }

    /// Index of the node nearest `x`, clamped to the box.
    pub fn index_of(&self, x: f64) -> usize {
        let i = ((x + 0.5 * self.params.length) / self.dx).round();
        (i.max(0.0) as usize).min(self.n() - 1)
    }

    /// `sum |psi_i|^2 dx`.
    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.dx
    }

    pub fn density(&self, i: usize) -> f64 {
        self.psi[i].norm_sqr()
    }

    /// Flux at node `i`: centered difference inside, second-order one-sided
    /// at the edges.
    pub fn flux(&self, i: usize) -> f64 {
        let n = self.n();
        let p = &self.psi;
        let h = self.dx;
        let d = if i == 0 {
            (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h)
        } else if i == n - 1 {
            (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * h)
        } else {
            (p[i + 1] - p[i - 1]) / (2.0 * h)
        };
        flux_from(p[i], d, self.m)
    }

    fn phase(k: f64, x: f64) -> C64 {
        C64::new(0.0, k * x / HBAR).exp()
    }

    /// New edge values from the current state.
    fn edge_update(&self) -> [C64; 2] {
        let n = self.n();
        if self.params.boundary == Boundary::Closed {
            return [C64::new(0.0, 0.0); 2];
        }
        let dt = self.params.dt;
        let rot = C64::new(0.0, -self.scenario.e_q * dt / HBAR).exp();
        let a = self.a_inc * C64::new(0.0, -self.scenario.e_q * self.t / HBAR).exp();

        let (x0, x1) = (self.x(0), self.x(1));
        let b = |i: usize, x: f64| {
            (self.psi[i] - a * Self::phase(self.q0, x)) * Self::phase(self.q0, x)
        };
        let db = (b(1, x1) - b(0, x0)) / self.dx;
        let left = self.psi[0] * rot + self.q0 / self.m * db * Self::phase(-self.q0, x0) * dt;

        let (xa, xb) = (self.x(n - 2), self.x(n - 1));
        let c = |i: usize, x: f64| self.psi[i] * Self::phase(-self.p_new, x);
        let dc = (c(n - 1, xb) - c(n - 2, xa)) / self.dx;
        let right =
            self.psi[n - 1] * rot - self.p_new / self.m * dc * Self::phase(self.p_new, xb) * dt;
        [left, right]
    }

    pub fn step(&mut self) {
        let n = self.n();
        let new_edges = self.edge_update();
        let off = self.off;
        let interior = n - 2;
        // right-hand side (1 - iH dt/2hbar) psi^n, edge terms at both levels
        for k in 0..interior {
            let i = k + 1;
            self.scratch[k] =
                self.rhs_diag[k] * self.psi[i] - off * (self.psi[i - 1] + self.psi[i + 1]);
        }
        self.scratch[0] -= off * new_edges[0];
        self.scratch[interior - 1] -= off * new_edges[1];
        // forward sweep; c'_k = off / denom_k keeps one product off the chain
        let mut prev = C64::new(0.0, 0.0);
        for k in 0..interior {
            prev = self.scratch[k] * self.inv_denom[k] - self.c_prime[k] * prev;
            self.scratch[k] = prev;
        }
        // back substitution
        let mut next = self.scratch[interior - 1];
        self.psi[interior] = next;
        for k in (0..interior - 1).rev() {
            next = self.scratch[k] - self.c_prime[k] * next;
            self.psi[k + 1] = next;
        }
        self.prev_edges = [self.psi[0], self.psi[n - 1]];
        self.psi[0] = new_edges[0];
        self.psi[n - 1] = new_edges[1];
        self.steps += 1;
        self.t = self.steps as f64 * self.params.dt;
    }
}

/// One recorded probe sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub t: f64,
    pub psi: C64,
    pub density: f64,
    pub flux: f64,
    /// `hbar` times the phase rotation rate over the last step; `None` at
    /// `t = 0` or where `psi` vanishes.
    pub hbar_omega: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSeries {
    /// Requested position.
    pub x: f64,
    /// Position of the node actually sampled.
    pub x_grid: f64,
    pub index: usize,
    pub records: Vec<ProbeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRun {
    pub series: Vec<ProbeSeries>,
    pub warnings: Vec<String>,
    pub steps: u64,
}

/// Steps to `t_end`, recording every `stride` steps (and at `t = 0`).
pub fn run_probes(
    s: &Scenario,
    params: GridParams,
    t_end: f64,
    probes: &[f64],
    stride: usize,
) -> Result<ProbeRun> {
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be finite and >= 0, got {t_end}"
        )));
    }
    if stride == 0 {
        return Err(Error::InvalidArgument("stride must be at least 1".into()));
    }
    let mut g = init_grid(s, params)?;
    let mut series: Vec<ProbeSeries> = probes
        .iter()
        .map(|&x| {
            let index = g.index_of(x);
            ProbeSeries {
                x,
                x_grid: g.x(index),
                index,
                records: Vec::new(),
            }
        })
        .collect();
    let total = (t_end / params.dt).round() as u64;
    let mut last: Vec<C64> = series.iter().map(|p| g.psi[p.index]).collect();
    let record = |g: &GridState, series: &mut [ProbeSeries], last: &[C64], first: bool| {
        for (p, &before) in series.iter_mut().zip(last) {
            let psi = g.psi[p.index];
            let hbar_omega = if first
                || psi.norm() <= crate::observables::OMEGA_THRESHOLD
                || before.norm() == 0.0
            {
                None
            } else {
                Some(-HBAR * (psi / before).arg() / g.params.dt)
            };
            p.records.push(ProbeRecord {
                t: g.t,
                psi,
                density: g.density(p.index),
                flux: g.flux(p.index),
                hbar_omega,
            });
        }
    };
    record(&g, &mut series, &last, true);
    for k in 1..=total {
        if k % stride as u64 == 0 {
            for (l, p) in last.iter_mut().zip(&series) {
                *l = g.psi[p.index];
            }
        }
        g.step();
        if k % stride as u64 == 0 {
            record(&g, &mut series, &last, false);
        }
    }
    Ok(ProbeRun {
        series,
        warnings: g.warnings.clone(),
        steps: g.steps,
    })
}
